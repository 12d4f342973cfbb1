import numpy as np
import fullband as fb
from rscan import run_r

# single-node eigen lamb with resonant mode excluded, full band
def lamb_eigen(L, kap_mhz, wc_hz=8.4e9):
    c, kcut = fb.c, fb.kcut
    kap = 2*np.pi*kap_mhz*1e6
    wc_t = 2*np.pi*wc_hz
    k_c = np.sqrt((wc_t/c)**2 - kcut**2)
    mc = int(round(k_c*L/np.pi))
    wc = fb.omega_m(mc, L); v = fb.vg(wc)
    ms = np.arange(1, 2*mc); wm = fb.omega_m(ms, L)
    keep = ms != mc
    wmk = wm[keep]
    G = np.sqrt(kap*v*wmk/(2*wc*L))
    N = len(wmk)
    H = np.zeros((N+1, N+1))
    H[0,0] = wc; H[0,1:] = G; H[1:,0] = G
    H[np.arange(1,N+1), np.arange(1,N+1)] = wmk
    ev, V = np.linalg.eigh(H)
    i = np.argmax(V[0,:]**2)
    pert = np.sum(G**2/(wc-wmk))
    return (ev[i]-wc)/kap, pert/kap, V[0,i]**2

for kmhz in [1.0, 5.0]:
    le, lp, w = lamb_eigen(30, kmhz)
    print(f"lamb L=30 k={kmhz}: eigen={le:+.5f} pert={lp:+.5f} weight={w:.4f}", flush=True)
le, lp, w = lamb_eigen(1, 1.0)
print(f"lamb L=1 k=1: eigen={le:+.5f} pert={lp:+.5f} weight={w:.4f}", flush=True)

inf, d = run_r(1, 1.0)
print(f"L=1 pert-res-comp dO/k={d:+.5f}: 1-eff={inf:.3e}", flush=True)

# off-resonant: carrier at midpoint between modes, dressed resonance there too
def run_offres(L, kap_mhz, eta=1.0, wc_hz=8.4e9, rtol=1e-10, atol=1e-12):
    from scipy.integrate import solve_ivp
    from ideal import g_pulse
    c, kcut = fb.c, fb.kcut
    kap = 2*np.pi*kap_mhz*1e6; kt = kap/eta
    wc_t = 2*np.pi*wc_hz
    k_c = np.sqrt((wc_t/c)**2 - kcut**2)
    mc = int(round(k_c*L/np.pi))
    wc = 0.5*(fb.omega_m(mc, L) + fb.omega_m(mc+1, L))
    v = fb.vg(wc); tp = L/v
    ms = np.arange(1, 2*mc); wm = fb.omega_m(ms, L)
    N = len(ms)
    Gc = np.sqrt(kap*v*wm/(2*wc*L))
    lam = np.sum(Gc**2/(wc-wm))
    Om = wc - lam
    G1 = np.sqrt(kap*v*wm/(2*Om*L)); G2 = G1*((-1.0)**ms)
    td = tp; T = 0.5*(td + 20*np.pi/kt)
    dq, dO, dw = 0.0, Om - wc, wm - wc
    def rhs(t, y):
        yc = y[:len(y)//2] + 1j*y[len(y)//2:]
        q1, q2, c1, c2 = yc[0], yc[1], yc[2], yc[3]
        psi = yc[4:]
        g1 = g_pulse(t + td/2, kt, kap); g2 = g_pulse(-t + td/2, kt, kap)
        dq1 = -1j*(dq*q1 + g1*c1); dq2 = -1j*(dq*q2 + g2*c2)
        dc1 = -1j*(dO*c1 + np.dot(G1, psi) + g1*q1)
        dc2 = -1j*(dO*c2 + np.dot(G2, psi) + g2*q2)
        dpsi = -1j*(dw*psi + G1*c1 + G2*c2)
        out = np.concatenate(([dq1, dq2, dc1, dc2], dpsi))
        return np.concatenate((out.real, out.imag))
    y0 = np.zeros(2*(N+4)); y0[0] = 1.0
    sol = solve_ivp(rhs, (-T, T), y0, method='DOP853', rtol=rtol, atol=atol)
    yf = sol.y[:, -1]
    yc = yf[:len(yf)//2] + 1j*yf[len(yf)//2:]
    return 1-np.abs(yc[1])**2

inf = run_offres(30, 1.0)
print(f"L=30 off-resonant: 1-eff={inf:.3e}", flush=True)
