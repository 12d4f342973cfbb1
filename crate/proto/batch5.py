import numpy as np
from scipy.integrate import solve_ivp
from ideal import g_pulse
from common import geometry, band

# L=1 floor mechanism discrimination: delay convention, kappa scaling, and
# a g^2(t)-proportional Stark compensation probe.

def evolve_t(dqf, dO, dw, G1, G2, g1f, g2f, T0, T1, rtol=1e-10, atol=1e-12):
    N = len(dw)
    def rhs(t, y):
        yc = y[:len(y)//2] + 1j*y[len(y)//2:]
        q1, q2, c1, c2 = yc[0], yc[1], yc[2], yc[3]
        psi = yc[4:]
        g1, g2 = g1f(t), g2f(t)
        d1, d2 = dqf(t, g1), dqf(t, g2)
        dq1 = -1j*(d1*q1 + g1*c1); dq2 = -1j*(d2*q2 + g2*c2)
        dc1 = -1j*(dO*c1 + np.dot(G1, psi) + g1*q1)
        dc2 = -1j*(dO*c2 + np.dot(G2, psi) + g2*q2)
        dpsi = -1j*(dw*psi + G1*c1 + G2*c2)
        out = np.concatenate(([dq1, dq2, dc1, dc2], dpsi))
        return np.concatenate((out.real, out.imag))
    y0 = np.zeros(2*(N+4)); y0[0] = 1.0
    sol = solve_ivp(rhs, (T0, T1), y0, method='DOP853', rtol=rtol, atol=atol)
    yf = sol.y[:, -1]
    yc = yf[:len(yf)//2] + 1j*yf[len(yf)//2:]
    return yc

def setup(L, kap_mhz, nh_fsr=8):
    kap = 2*np.pi*kap_mhz*1e6
    mc, wc, v, fsr = geometry(L)
    ms_f, wm_f, G1_f, _ = band(L, mc, wc, kap, v)
    ms, wm, G1, G2 = band(L, mc, wc, kap, v, half_w=nh_fsr*fsr)
    far = ~np.isin(ms_f, ms)
    lam_far = np.sum(G1_f[far]**2/(wc - wm_f[far]))
    return dict(kap=kap, mc=mc, wc=wc, v=v, fsr=fsr, ms=ms, wm=wm, lam_far=lam_far, L=L)

def run(st, dOfrac, dqfrac, td_frac=1.0, X=0.0, eta=1.0, margin=10*np.pi):
    kap = st['kap']; kt = kap/eta
    L, wc, v, ms, wm = st['L'], st['wc'], st['v'], st['ms'], st['wm']
    Om = wc + dOfrac*kap
    G1 = np.sqrt(kap*v*wm/(2*Om*L)); G2 = G1*((-1.0)**ms)
    tp = L/v; td = td_frac*tp; T = 0.5*(td + 2*margin/kt)
    g1f = lambda t: g_pulse(t + td/2, kt, kap)
    g2f = lambda t: g_pulse(-t + td/2, kt, kap)
    dqf = lambda t, g: dqfrac*kap + X*g*g
    yc = evolve_t(dqf, Om - wc + st['lam_far'], wm - wc, G1, G2, g1f, g2f, -T, T)
    return 1 - abs(yc[1])**2

st1 = setup(1, 1.0)
print("delay scan at (0.0119, 0.0010):", flush=True)
for tdf in [0.0, 0.25, 0.5, 1.0, 2.0]:
    print(f" td={tdf}tp: {run(st1, 0.0119, 0.0010, td_frac=tdf):.3e}", flush=True)

print("stark-comp scan X (x1e-10):", flush=True)
for X in [-10, -3, -1, 1, 3, 10, 30]:
    print(f" X={X}: {run(st1, 0.0119, 0.0010, X=X*1e-10):.3e}", flush=True)

print("kappa scaling (mini 2D scan each):", flush=True)
for kmhz in [0.5, 2.0]:
    st = setup(1, kmhz)
    best = 1.0
    for dO in 0.0119 + np.arange(-2, 3)*1e-3:
        for dq in 0.0010*kmhz**0 + np.arange(-2, 3)*5e-4:
            best = min(best, run(st, dO, dq))
    print(f" kappa={kmhz}MHz: best={best:.3e}", flush=True)
