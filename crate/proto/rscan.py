import numpy as np
from scipy.integrate import solve_ivp
from ideal import g_pulse
import fullband as fb

def run_r(L, kap_mhz, dOfrac=None, eta=1.0, wc_hz=8.4e9, rtol=1e-10, atol=1e-12,
          margin=10*np.pi):
    c, kcut = fb.c, fb.kcut
    kap = 2*np.pi*kap_mhz*1e6; kt = kap/eta
    wc_t = 2*np.pi*wc_hz
    k_c = np.sqrt((wc_t/c)**2 - kcut**2)
    mc = int(round(k_c*L/np.pi))
    wc = fb.omega_m(mc, L)
    v = fb.vg(wc); tp = L/v
    ms = np.arange(1, 2*mc); wm = fb.omega_m(ms, L)
    N = len(ms)
    if dOfrac is None:
        # perturbative full-band local shift at the carrier, resonant mode excluded
        Gc = np.sqrt(kap*v*wm/(2*wc*L))
        det = wc - wm
        mask = ms != mc
        lam = np.sum(Gc[mask]**2/det[mask])
        dOfrac = -lam/kap
    Om = wc + dOfrac*kap
    G1 = np.sqrt(kap*v*wm/(2*Om*L)); G2 = G1*((-1.0)**ms)
    td = tp; T = 0.5*(td + 2*margin/kt)
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
    return 1-np.abs(yc[1])**2, dOfrac

inf, d = run_r(30, 1.0)
print(f"L=30 pert-res-comp dO/k={d:+.5f}: 1-eff={inf:.3e}", flush=True)
for d in [0.0105, 0.0113, 0.0116, 0.0120]:
    inf, _ = run_r(30, 1.0, dOfrac=d)
    print(f"L=30 dO/k={d:+.5f}: 1-eff={inf:.3e}", flush=True)
