import numpy as np
from scipy.integrate import solve_ivp

def g_pulse(t, kt, kap):
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

def run_ideal(kappa_mhz, fsr_mhz, nhalf, eta=1.0, margin=10*np.pi, td_mode="tp"):
    kappa = 2*np.pi*kappa_mhz*1e6
    kt = kappa/eta
    fsr = 2*np.pi*fsr_mhz*1e6
    # linear dispersion, constant G; tp = 2pi/fsr * ... propagation: L/vg = pi/fsr
    tp = np.pi/fsr
    G0 = np.sqrt(kappa*fsr/(2*np.pi))
    ms = np.arange(-nhalf, nhalf+1)
    dw = ms*fsr  # frame at omega_c = central mode
    G1 = np.full(len(ms), G0)
    G2 = G0*((-1.0)**ms)
    td = tp if td_mode == "tp" else 0.0
    T = 0.5*(tp + 2*margin/kt)
    def rhs(t, y):
        yc = y[:len(y)//2] + 1j*y[len(y)//2:]
        q1, q2, c1, c2 = yc[0], yc[1], yc[2], yc[3]
        psi = yc[4:]
        g1 = g_pulse(t + td/2, kt, kappa)
        g2 = g_pulse(-t + td/2, kt, kappa)
        dq1 = -1j*(g1*c1)
        dq2 = -1j*(g2*c2)
        dc1 = -1j*(np.dot(G1, psi) + g1*q1)
        dc2 = -1j*(np.dot(G2, psi) + g2*q2)
        dpsi = -1j*(dw*psi + G1*c1 + G2*c2)
        out = np.concatenate(([dq1, dq2, dc1, dc2], dpsi))
        return np.concatenate((out.real, out.imag))
    y0 = np.zeros(2*(len(ms)+4)); y0[0] = 1.0
    sol = solve_ivp(rhs, (-T, T), y0, method='RK45', rtol=1e-12, atol=1e-14)
    yf = sol.y[:, -1]
    yc = yf[:len(yf)//2] + 1j*yf[len(yf)//2:]
    return 1-np.abs(yc[1])**2, np.sum(np.abs(yc)**2)-1

if __name__ == "__main__":
    # long-photon-like: kappa=1MHz, FSR=3.1MHz (like L=30m), ideal linear dispersion
    for nhalf in [3, 6, 12]:
        inf, nd = run_ideal(1.0, 3.1, nhalf)
        print(f"ideal kappa=1 fsr=3.1 nhalf={nhalf}: 1-eff={inf:.3e} nd={nd:.1e}")
    # kappa scaling
    for kmhz in [0.5, 2.0]:
        inf, nd = run_ideal(kmhz, 3.1, 6)
        print(f"ideal kappa={kmhz} fsr=3.1: 1-eff={inf:.3e}")
    # eta scaling
    inf, nd = run_ideal(1.0, 3.1, 6, eta=4)
    print(f"ideal kappa=1 eta=4: 1-eff={inf:.3e}")
    # td=0 variant
    inf, nd = run_ideal(1.0, 3.1, 6, td_mode="zero")
    print(f"ideal kappa=1 td=0: 1-eff={inf:.3e}")
    # continuum-like: FSR much smaller than kappa (short photon in ideal guide)
    inf, nd = run_ideal(1.0, 0.05, 400)
    print(f"ideal kappa=1 fsr=0.05 (continuum): 1-eff={inf:.3e} nd={nd:.1e}")
