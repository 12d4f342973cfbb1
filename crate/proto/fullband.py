import numpy as np
from scipy.integrate import solve_ivp
from ideal import g_pulse

c = 2.998e8
l1 = 0.02286
kcut = np.pi/l1

def omega_m(m, L): return c*np.sqrt(kcut**2 + (m*np.pi/L)**2)
def vg(w): return c**2*np.sqrt((w/c)**2 - kcut**2)/w

def run_full(L, kap_mhz, eta=1.0, comp="dressed", offres=False, wc_hz=8.4e9,
             rtol=1e-10, atol=1e-12):
    kap = 2*np.pi*kap_mhz*1e6
    kt = kap/eta
    wc_t = 2*np.pi*wc_hz
    k_c = np.sqrt((wc_t/c)**2 - kcut**2)
    mc = int(round(k_c*L/np.pi))
    fsr = omega_m(mc+1, L) - omega_m(mc, L)
    wc = omega_m(mc, L) + (0.5*fsr if offres else 0.0)
    Om = wc
    v = vg(wc)
    tp = L/v
    ms = np.arange(1, 2*mc)          # full physical band
    wm = omega_m(ms, L)
    G1 = np.sqrt(kap*v*wm/(2*Om*L))
    G2 = G1*((-1.0)**ms)
    N = len(ms)
    if comp == "dressed":
        H = np.zeros((N+2, N+2))
        H[0,0] = Om; H[1,1] = Om
        H[0,2:] = G1; H[2:,0] = G1
        H[1,2:] = G2; H[2:,1] = G2
        H[np.arange(2,N+2), np.arange(2,N+2)] = wm
        ev, V = np.linalg.eigh(H)
        wgt = V[0,:]**2 + V[1,:]**2
        wt0 = ev[np.argmax(wgt)]
    elif comp == "pert":
        det = Om - wm
        mask = np.abs(det) > 0.45*fsr
        wt0 = Om + np.sum(G1[mask]**2/det[mask])
    else:
        wt0 = Om
    lam = wt0 - Om
    td = tp
    T = 0.5*(td + 20*np.pi/kt)
    dq = wt0 - wc; dO = Om - wc; dw = wm - wc
    def rhs(t, y):
        yc = y[:len(y)//2] + 1j*y[len(y)//2:]
        q1, q2, c1, c2 = yc[0], yc[1], yc[2], yc[3]
        psi = yc[4:]
        g1 = g_pulse(t + td/2, kt, kap)
        g2 = g_pulse(-t + td/2, kt, kap)
        dq1 = -1j*(dq*q1 + g1*c1)
        dq2 = -1j*(dq*q2 + g2*c2)
        dc1 = -1j*(dO*c1 + np.dot(G1, psi) + g1*q1)
        dc2 = -1j*(dO*c2 + np.dot(G2, psi) + g2*q2)
        dpsi = -1j*(dw*psi + G1*c1 + G2*c2)
        out = np.concatenate(([dq1, dq2, dc1, dc2], dpsi))
        return np.concatenate((out.real, out.imag))
    y0 = np.zeros(2*(N+4)); y0[0] = 1.0
    sol = solve_ivp(rhs, (-T, T), y0, method='DOP853', rtol=rtol, atol=atol)
    yf = sol.y[:, -1]
    yc = yf[:len(yf)//2] + 1j*yf[len(yf)//2:]
    nd = np.sum(np.abs(yc)**2) - 1
    return 1-np.abs(yc[1])**2, lam/kap, N, nd

if __name__ == "__main__":
    import sys
    for L in [5, 30]:
        inf, lk, N, nd = run_full(L, 1.0, comp="dressed")
        print(f"L={L} kappa=1 dressed: 1-eff={inf:.3e} lam/k={lk:+.5f} modes={N} nd={nd:.1e}", flush=True)
    inf, lk, N, nd = run_full(30, 1.0, comp="none")
    print(f"L=30 kappa=1 none: 1-eff={inf:.3e} modes={N}", flush=True)
    inf, lk, N, nd = run_full(30, 1.0, comp="dressed", offres=True)
    print(f"L=30 kappa=1 off-res dressed: 1-eff={inf:.3e} lam/k={lk:+.5f}", flush=True)
