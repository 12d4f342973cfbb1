import numpy as np

c = 2.998e8
l1 = 0.02286
wc_target = 2*np.pi*8.4e9
L = 30.0
kcut = np.pi/l1

def omega_m(m):
    return c*np.sqrt(kcut**2 + (m*np.pi/L)**2)

def vg(w):
    k = np.sqrt((w/c)**2 - kcut**2)
    return c**2*k/w

def D(w):
    v = vg(w)
    return (c**2/w)*(1-(v/c)**2)

# central mode
k_c = np.sqrt((wc_target/c)**2 - kcut**2)
mc = int(round(k_c*L/np.pi))
print("mc =", mc, "omega_mc/2pi GHz =", omega_m(mc)/2/np.pi/1e9)
print("vg/c =", vg(wc_target)/c, "D =", D(wc_target))

def lamb(kappa, half_modes, resonant=True):
    Om = omega_m(mc) if resonant else omega_m(mc) + 0.5*(omega_m(mc+1)-omega_m(mc))
    ms = np.arange(mc-half_modes, mc+half_modes+1)
    wm = omega_m(ms)
    v = vg(Om)
    G = np.sqrt(kappa*v*wm/(2*Om*L))
    N = len(ms)
    H = np.zeros((N+1, N+1))
    H[0,0] = Om
    H[0,1:] = G
    H[1:,0] = G
    H[np.arange(1,N+1), np.arange(1,N+1)] = wm
    ev, evec = np.linalg.eigh(H)
    w = evec[0,:]**2
    order = np.argsort(w)[::-1]
    lam_max = ev[order[0]] - Om
    lam_mid = 0.5*(ev[order[0]]+ev[order[1]]) - Om
    # perturbative sum excluding resonant-mode pole
    det = Om - wm
    mask = np.abs(det) > 1e-3*kappa
    lam_pert = np.sum(G[mask]**2/det[mask])
    return lam_max/kappa, lam_mid/kappa, lam_pert/kappa, w[order[0]], w[order[1]]

for kappa_mhz in [1.0, 5.0]:
    kappa = 2*np.pi*kappa_mhz*1e6
    for half in [300, 600, 1200, 2400, 4000]:
        r = lamb(kappa, half, resonant=True)
        print(f"res kappa={kappa_mhz} half={half}: max={r[0]:.4f} mid={r[1]:.4f} pert={r[2]:.4f} w0={r[3]:.3f} w1={r[4]:.3f}")
    for half in [300, 1200, 4000]:
        r = lamb(kappa, half, resonant=False)
        print(f"off kappa={kappa_mhz} half={half}: max={r[0]:.4f} mid={r[1]:.4f} pert={r[2]:.4f} w0={r[3]:.3f}")
