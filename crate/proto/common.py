import numpy as np
from scipy.integrate import solve_ivp
from ideal import g_pulse
import fullband as fb

C, KCUT = fb.c, fb.kcut

def geometry(L, wc_hz=8.4e9, offres=False):
    wc_t = 2*np.pi*wc_hz
    k_c = np.sqrt((wc_t/C)**2 - KCUT**2)
    mc = int(round(k_c*L/np.pi))
    if offres:
        wc = 0.5*(fb.omega_m(mc, L) + fb.omega_m(mc+1, L))
    else:
        wc = fb.omega_m(mc, L)
    v = fb.vg(wc)
    fsr = fb.omega_m(mc+1, L) - fb.omega_m(mc, L)
    return mc, wc, v, fsr

def band(L, mc, wc, kap, v, half_w=None, Om=None):
    if Om is None: Om = wc
    if half_w is None:
        ms = np.arange(1, 2*mc)
    else:
        nh = max(2, int(np.ceil(half_w/(fb.omega_m(mc+1,L)-fb.omega_m(mc,L)))))
        ms = np.arange(max(1, mc-nh), mc+nh+1)
    wm = fb.omega_m(ms, L)
    G1 = np.sqrt(kap*v*wm/(2*Om*L))
    G2 = G1*((-1.0)**ms)
    return ms, wm, G1, G2

def lamb_pert(wc, wm, G, mc, ms, exclude_nearest=True):
    if exclude_nearest:
        keep = ms != mc
    else:
        keep = np.ones(len(ms), bool)
    return np.sum(G[keep]**2/(wc - wm[keep]))

def evolve(dq, dO, dw, G1, G2, g1f, g2f, T0, T1, rtol=1e-10, atol=1e-12, y0q=1.0):
    N = len(dw)
    def rhs(t, y):
        yc = y[:len(y)//2] + 1j*y[len(y)//2:]
        q1, q2, c1, c2 = yc[0], yc[1], yc[2], yc[3]
        psi = yc[4:]
        g1, g2 = g1f(t), g2f(t)
        dq1 = -1j*(dq*q1 + g1*c1); dq2 = -1j*(dq*q2 + g2*c2)
        dc1 = -1j*(dO*c1 + np.dot(G1, psi) + g1*q1)
        dc2 = -1j*(dO*c2 + np.dot(G2, psi) + g2*q2)
        dpsi = -1j*(dw*psi + G1*c1 + G2*c2)
        out = np.concatenate(([dq1, dq2, dc1, dc2], dpsi))
        return np.concatenate((out.real, out.imag))
    y0 = np.zeros(2*(N+4)); y0[0] = y0q
    sol = solve_ivp(rhs, (T0, T1), y0, method='DOP853', rtol=rtol, atol=atol)
    yf = sol.y[:, -1]
    yc = yf[:len(yf)//2] + 1j*yf[len(yf)//2:]
    return yc

