import numpy as np
from scipy.integrate import solve_ivp
from ideal import g_pulse
import fullband as fb

def base(L, kap, wc_hz=8.4e9, half_w=None):
    c, kcut = fb.c, fb.kcut
    wc_t = 2*np.pi*wc_hz
    k_c = np.sqrt((wc_t/c)**2 - kcut**2)
    mc = int(round(k_c*L/np.pi))
    wc = fb.omega_m(mc, L); v = fb.vg(wc)
    fsr = fb.omega_m(mc+1, L) - fb.omega_m(mc, L)
    if half_w is None:
        half_w = 40*fsr
    nh = max(2, int(np.ceil(half_w/fsr)))
    ms = np.arange(max(1, mc-nh), mc+nh+1)
    wm = fb.omega_m(ms, L)
    G1 = np.sqrt(kap*v*wm/(2*wc*L)); G2 = G1*((-1.0)**ms)
    return wc, v, fsr, ms, wm, G1, G2, L/v

def evolve(wc, wm, G1, G2, g1f, g2f, dq, T0, T1, rtol=1e-10, atol=1e-12):
    dw = wm - wc
    N = len(wm)
    def rhs(t, y):
        yc = y[:len(y)//2] + 1j*y[len(y)//2:]
        q1, q2, c1, c2 = yc[0], yc[1], yc[2], yc[3]
        psi = yc[4:]
        g1, g2 = g1f(t), g2f(t)
        dq1 = -1j*(dq*q1 + g1*c1); dq2 = -1j*(dq*q2 + g2*c2)
        dc1 = -1j*(np.dot(G1, psi) + g1*q1)
        dc2 = -1j*(np.dot(G2, psi) + g2*q2)
        dpsi = -1j*(dw*psi + G1*c1 + G2*c2)
        out = np.concatenate(([dq1, dq2, dc1, dc2], dpsi))
        return np.concatenate((out.real, out.imag))
    y0 = np.zeros(2*(N+4)); y0[0] = 1.0
    sol = solve_ivp(rhs, (T0, T1), y0, method='DOP853', rtol=rtol, atol=atol)
    yf = sol.y[:, -1]
    yc = yf[:len(yf)//2] + 1j*yf[len(yf)//2:]
    return 1-np.abs(yc[1])**2

def run_stirap(L, T, comp=True):
    # kappa = FSR (mode spacing), g0 = kappa/2; counterintuitive ramps over [-T, T]
    c = fb.c
    wc_hz = 8.4e9
    # need fsr first: bootstrap
    wc, v, fsr, ms, wm, G1, G2, tp = base(L, 1.0, wc_hz)  # dummy kap to get fsr
    kap = fsr
    wc, v, fsr, ms, wm, G1, G2, tp = base(L, kap, wc_hz)
    g0 = kap/2
    dq = 0.0
    if comp:
        det = wc - wm
        mask = np.abs(det) > 0.45*fsr
        dq = np.sum(G1[mask]**2/det[mask])
    g1f = lambda t: g0*np.sin(np.pi*(t+T)/(4*T)) if abs(t) <= T else 0.0
    g2f = lambda t: g0*np.cos(np.pi*(t+T)/(4*T)) if abs(t) <= T else 0.0
    return evolve(wc, wm, G1, G2, g1f, g2f, dq, -T, T)

def run_sech(L, eta=1.0, margin=10.0):
    wc, v, fsr, ms, wm, G1, G2, tp = base(L, 1.0, 8.4e9)
    kap = fsr; kt = kap/eta
    wc, v, fsr, ms, wm, G1, G2, tp = base(L, kap, 8.4e9)
    det = wc - wm
    mask = np.abs(det) > 0.45*fsr
    dq = np.sum(G1[mask]**2/det[mask])
    td = tp
    T = 0.5*(td + 2*margin*np.pi/kt)
    g1f = lambda t: g_pulse(t + td/2, kt, kap)
    g2f = lambda t: g_pulse(-t + td/2, kt, kap)
    return evolve(wc, wm, G1, G2, g1f, g2f, dq, -T, T), 2*T

if __name__ == "__main__":
    L = 5
    inf, dur = run_sech(L)
    print(f"sech: 1-eff={inf:.3e} duration={dur*1e6:.3f}us", flush=True)
    for Tus in [0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2]:
        T = Tus*1e-6
        inf_s = run_stirap(L, T)
        print(f"stirap 2T={2*Tus:.2f}us: 1-eff={inf_s:.3e}", flush=True)
