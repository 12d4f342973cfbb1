import numpy as np
from scipy.integrate import solve_ivp
from ideal import g_pulse
import fullband as fb

def run_td(L, kap_mhz, alpha, eta=1.0, wc_hz=8.4e9, per_mode_vg=False,
           rtol=1e-10, atol=1e-12):
    c, kcut = fb.c, fb.kcut
    kap = 2*np.pi*kap_mhz*1e6; kt = kap/eta
    wc_t = 2*np.pi*wc_hz
    k_c = np.sqrt((wc_t/c)**2 - kcut**2)
    mc = int(round(k_c*L/np.pi))
    wc = fb.omega_m(mc, L); Om = wc
    v = fb.vg(wc); tp = L/v
    ms = np.arange(1, 2*mc); wm = fb.omega_m(ms, L)
    vv = fb.vg(wm) if per_mode_vg else v
    G1 = np.sqrt(kap*vv*wm/(2*Om*L)); G2 = G1*((-1.0)**ms)
    N = len(ms)
    H = np.zeros((N+2, N+2))
    H[0,0] = Om; H[1,1] = Om
    H[0,2:] = G1; H[2:,0] = G1
    H[1,2:] = G2; H[2:,1] = G2
    H[np.arange(2,N+2), np.arange(2,N+2)] = wm
    ev, V = np.linalg.eigh(H)
    wt0 = ev[np.argmax(V[0,:]**2 + V[1,:]**2)]
    td = tp*(1+alpha)
    T = 0.5*(tp + 20*np.pi/kt) + abs(alpha)*tp
    dq = wt0 - wc; dw = wm - wc
    def rhs(t, y):
        yc = y[:len(y)//2] + 1j*y[len(y)//2:]
        q1, q2, c1, c2 = yc[0], yc[1], yc[2], yc[3]
        psi = yc[4:]
        g1 = g_pulse(t + td/2, kt, kap); g2 = g_pulse(-t + td/2, kt, kap)
        dq1 = -1j*(dq*q1 + g1*c1); dq2 = -1j*(dq*q2 + g2*c2)
        dc1 = -1j*(np.dot(G1, psi) + g1*q1)
        dc2 = -1j*(np.dot(G2, psi) + g2*q2)
        dpsi = -1j*(dw*psi + G1*c1 + G2*c2)
        out = np.concatenate(([dq1, dq2, dc1, dc2], dpsi))
        return np.concatenate((out.real, out.imag))
    y0 = np.zeros(2*(N+4)); y0[0] = 1.0
    sol = solve_ivp(rhs, (-T, T), y0, method='DOP853', rtol=rtol, atol=atol)
    yf = sol.y[:, -1]
    yc = yf[:len(yf)//2] + 1j*yf[len(yf)//2:]
    return 1-np.abs(yc[1])**2, (wt0-Om)/kap

for a in [-0.04, -0.02, 0.0, 0.02, 0.04]:
    inf, lk = run_td(30, 1.0, a)
    print(f"L=30 alpha={a:+.3f}: 1-eff={inf:.4e}", flush=True)
inf, lk = run_td(30, 1.0, 0.0, per_mode_vg=True)
print(f"L=30 per-mode-vg alpha=0: 1-eff={inf:.4e} lam/k={lk:+.5f}", flush=True)
