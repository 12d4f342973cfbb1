import numpy as np
from scipy.integrate import solve_ivp

c = 2.998e8
l1 = 0.02286
kcut = np.pi/l1

def omega_m(m, L): return c*np.sqrt(kcut**2 + (m*np.pi/L)**2)
def vg(w): return c**2*np.sqrt((w/c)**2 - kcut**2)/w
def Dcurv(w):
    v = vg(w)
    return (c**2/w)*(1-(v/c)**2)

def g_pulse(t, kt, kap):
    # g(t) = (kap - kt*tanh(kt t/2)) / (2 sqrt((1+exp(-kt t)) kap/kt - 1))
    x = kt*t
    if x < -30:
        return 0.5*(kap+kt)*np.sqrt(kt/kap)*np.exp(x/2)
    if x > 30:
        r = kap/kt - 1.0
        if r < 1e-9:
            return kap*np.exp(-x/2)
        return (kap - kt)/(2*np.sqrt(r + (kap/kt)*np.exp(-x)))
    num = kap - kt*np.tanh(x/2)
    den = 2*np.sqrt((1+np.exp(-x))*kap/kt - 1)
    return num/den

def run_transfer(L, kappa_mhz, eta=1.0, compensate=True, resonant=True,
                 half_mult=9.0, rtol=1e-10, atol=1e-12):
    kappa = 2*np.pi*kappa_mhz*1e6
    kt = kappa/eta
    wc_t = 2*np.pi*8.4e9
    k_c = np.sqrt((wc_t/c)**2 - kcut**2)
    mc = int(round(k_c*L/np.pi))
    w_mc = omega_m(mc, L)
    fsr = omega_m(mc+1, L) - omega_m(mc, L)
    Om = w_mc if resonant else w_mc + 0.5*fsr
    frame = Om
    v = vg(Om)
    tp = L/v
    # window
    half_w = half_mult*kt
    nh = max(1, int(np.ceil(half_w/fsr)))
    ms = np.arange(mc-nh, mc+nh+1)
    wm = omega_m(ms, L)
    G = np.sqrt(kappa*v*wm/(2*Om*L))
    G1 = G.copy()
    G2 = G*((-1.0)**ms)
    # lamb (pert, window, excluding resonant)
    det = Om - wm
    mask = np.abs(det) > 0.45*fsr
    lam = np.sum(G[mask]**2/det[mask])
    delta = Om + lam if compensate else Om
    td = tp
    T = 0.5*(tp + 20*np.pi/kt)
    N = len(ms)
    dq = delta - frame
    dO = Om - frame
    dw = wm - frame
    def rhs(t, y):
        yc = y[:len(y)//2] + 1j*y[len(y)//2:]
        q1, q2, c1, c2 = yc[0], yc[1], yc[2], yc[3]
        psi = yc[4:]
        g1 = g_pulse(t + td/2, kt, kappa)
        g2 = g_pulse(-t + td/2, kt, kappa)
        dq1 = -1j*(dq*q1 + g1*c1)
        dq2 = -1j*(dq*q2 + g2*c2)
        dc1 = -1j*(dO*c1 + np.dot(G1, psi) + g1*q1)
        dc2 = -1j*(dO*c2 + np.dot(G2, psi) + g2*q2)
        dpsi = -1j*(dw*psi + G1*c1 + G2*c2)
        out = np.concatenate(([dq1, dq2, dc1, dc2], dpsi))
        return np.concatenate((out.real, out.imag))
    y0 = np.zeros(2*(N+4)); y0[0] = 1.0
    sol = solve_ivp(rhs, (-T, T), y0, method='RK45', rtol=rtol, atol=atol, dense_output=False)
    yf = sol.y[:, -1]
    yc = yf[:len(yf)//2] + 1j*yf[len(yf)//2:]
    norm = np.sum(np.abs(yc)**2)
    eff = np.abs(yc[1])**2
    D = Dcurv(Om)
    pred = (L**2)*(D**2)*(kappa**4)/(180*(v**6)*(eta**4))
    return 1-eff, pred, 1-norm, 2*nh+1, lam/kappa

print("short photon, L=30:")
for kmhz in [20, 50, 100]:
    inf, pred, nd, nm, lk = run_transfer(30, kmhz)
    print(f" kappa={kmhz}MHz: 1-eff={inf:.3e} eq6={pred:.3e} ratio={inf/pred:.2f} normdrift={nd:.1e} modes={nm}")
inf, pred, nd, nm, lk = run_transfer(30, 50, eta=4)
print(f" kappa=50 eta=4: 1-eff={inf:.3e} eq6={pred:.3e} ratio={inf/pred:.2f} modes={nm}")
print("long photon, kappa=1MHz:")
for L in [1, 5, 30]:
    inf, pred, nd, nm, lk = run_transfer(L, 1, rtol=1e-12, atol=1e-14)
    print(f" L={L}m: 1-eff={inf:.3e} normdrift={nd:.1e} modes={nm} lam/k={lk:+.5f}")
inf, pred, nd, nm, lk = run_transfer(30, 1, resonant=False, rtol=1e-12, atol=1e-14)
print(f" off-resonant L=30: 1-eff={inf:.3e}")
inf, pred, nd, nm, lk = run_transfer(30, 1, compensate=False, rtol=1e-12, atol=1e-14)
print(f" uncompensated L=30: 1-eff={inf:.3e}")
