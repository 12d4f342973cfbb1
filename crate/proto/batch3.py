import numpy as np
from scipy.integrate import solve_ivp
from ideal import g_pulse
import fullband as fb
from common import geometry, band, lamb_pert, evolve

# ---- L=1 plateau diagnostics ----
def run_diag(L, kap_mhz, dOfrac, eta=1.0, margin=10*np.pi, rtol=1e-10, atol=1e-12):
    kap = 2*np.pi*kap_mhz*1e6; kt = kap/eta
    mc, wc, v, fsr = geometry(L)
    ms, wm, G1, G2 = band(L, mc, wc, kap, v)
    Om = wc + dOfrac*kap
    G1 = np.sqrt(kap*v*wm/(2*Om*L)); G2 = G1*((-1.0)**ms)
    tp = L/v; td = tp; T = 0.5*(td + 2*margin/kt)
    g1f = lambda t: g_pulse(t + td/2, kt, kap)
    g2f = lambda t: g_pulse(-t + td/2, kt, kap)
    yc = evolve(0.0, Om - wc, wm - wc, G1, G2, g1f, g2f, -T, T, rtol=rtol, atol=atol)
    inf = 1 - abs(yc[1])**2
    psi = yc[4:]
    i_c = np.where(ms == mc)[0][0]
    res_q1 = abs(yc[0])**2
    res_c = abs(yc[2])**2 + abs(yc[3])**2
    p_res = abs(psi[i_c])**2
    p_nb1 = abs(psi[i_c-1])**2 + abs(psi[i_c+1])**2
    p_nb2 = abs(psi[i_c-2])**2 + abs(psi[i_c+2])**2
    p_rest = np.sum(np.abs(psi)**2) - p_res - p_nb1 - p_nb2
    return inf, res_q1, res_c, p_res, p_nb1, p_nb2, p_rest

print("L=1 diagnostics:", flush=True)
for tag, kw in [
    ("base      ", dict()),
    ("tight-tol ", dict(rtol=1e-11, atol=1e-13)),
    ("margin15pi", dict(margin=15*np.pi)),
    ("eta2      ", dict(eta=2.0)),
]:
    inf, q1, cres, pr, p1, p2, prest = run_diag(1, 1.0, 0.0119, **kw)
    print(f" {tag}: inf={inf:.3e} q1={q1:.2e} c={cres:.2e} "
          f"res={pr:.2e} nb1={p1:.2e} nb2={p2:.2e} rest={prest:.2e}", flush=True)

# ---- emission refinement ----
def emission2(kap_mhz=1.0, winfac=18.0, margin=20*np.pi, safety=1.25):
    kap = 2*np.pi*kap_mhz*1e6; kt = kap
    C, KCUT = fb.c, fb.kcut
    wc_t = 2*np.pi*8.4e9
    v_est = fb.vg(wc_t)
    dur = 2*(2*margin/kt)/2
    L = safety*v_est*dur
    mc, wc, v, fsr = geometry(L)
    ms, wm, G1, _ = band(L, mc, wc, kap, v, half_w=winfac*kt)
    lam = lamb_pert(wc, wm, G1, mc, ms)
    Om = wc - lam
    G1 = np.sqrt(kap*v*wm/(2*Om*L))
    dw = wm - wc
    N = len(ms)
    T = margin/kt
    def rhs(t, y):
        yc = y[:len(y)//2] + 1j*y[len(y)//2:]
        q1, c1 = yc[0], yc[1]
        psi = yc[2:]
        g = g_pulse(t, kt, kap)
        d_q1 = -1j*(g*c1)
        d_c1 = -1j*((Om-wc)*c1 + np.dot(G1, psi) + g*q1)
        dpsi = -1j*(dw*psi + G1*c1)
        out = np.concatenate(([d_q1, d_c1], dpsi))
        return np.concatenate((out.real, out.imag))
    y0 = np.zeros(2*(N+2)); y0[0] = 1.0
    ts = np.linspace(-T, T, 4001)
    sol = solve_ivp(rhs, (-T, T), y0, method='DOP853', rtol=1e-10, atol=1e-12, t_eval=ts)
    c1t = sol.y[1, :] + 1j*sol.y[N+3, :]
    out = np.sqrt(kap)*np.abs(c1t)
    ref = np.sqrt(kt/4)/np.cosh(kt*ts/2)
    l2 = np.sqrt(np.trapezoid((out-ref)**2, ts)/np.trapezoid(ref**2, ts))
    # locate worst residual region
    resid = np.abs(out-ref)
    i = np.argmax(resid)
    return l2, L, N, ts[i]*kt, resid[i]/ref.max()

print("emission refinement:", flush=True)
for winfac, margin, safety in [(18.0, 20*np.pi, 1.25), (9.0, 20*np.pi, 2.0),
                               (18.0, 25*np.pi, 1.25)]:
    l2, Lx, N, xw, rw = emission2(winfac=winfac, margin=margin, safety=safety)
    print(f" win={winfac}kt margin={margin/np.pi:.0f}pi safety={safety}: "
          f"L2={l2:.4f} (L={Lx:.0f}m N={N}) worst at kt*t={xw:+.1f} rel={rw:.3f}", flush=True)

# ---- cphase: discrete-sum quasi-mono theory vs continuum ----
def cphase_theory(L, kap_mhz, eta, discrete):
    kap = 2*np.pi*kap_mhz*1e6; kt = kap/eta; chi = 0.5*kap
    mc, wc, v, fsr = geometry(L)
    tp = L/v
    D = 1.04e6
    hprop = 2*tp*D/(2*v**2)
    devs = []
    for x in [0, 1]:
        Om2 = wc + ((-1)**(x+1))*chi
        if discrete:
            ms, wm, _, _ = band(L, mc, wc, kap, v, half_w=max(9*kt, 3*kap))
            nu = wm - wc
        else:
            nu = np.linspace(-8*kt, 8*kt, 20001)
        w8 = 1/np.cosh(np.pi*nu/kt)**2
        w8 /= np.sum(w8)
        d = (nu + wc) - Om2
        phi = np.angle((1j*d + kap/2)/(1j*d - kap/2))
        phi0 = np.angle((1j*(wc - Om2) + kap/2)/(1j*(wc - Om2) - kap/2))
        dphi = np.unwrap(phi) - phi0
        # remove common linear (delay) slope used by the protocol: phi'(wc) = 2/kap
        lin = (4*kap/(kap**2 + 4*(Om2-wc)**2))*nu
        z = np.sum(w8*np.exp(1j*(dphi - lin - hprop*nu**2)))
        devs.append(np.angle(z))
    return np.pi + devs[1] - devs[0]

print("cphase quasi-mono theory (L=5, k=100MHz):", flush=True)
for eta in [2, 3, 4, 6]:
    cont = cphase_theory(5, 100, eta, False)
    disc = cphase_theory(5, 100, eta, True)
    print(f" eta={eta}: continuum={cont:.5f} discrete={disc:.5f} "
          f"eq17={np.pi+2/(3*eta**2):.5f}", flush=True)
