import numpy as np

c = 2.998e8
l1 = 0.02286
L = 30.0
kcut = np.pi/l1
wc_target = 2*np.pi*8.4e9

def omega_m(m): return c*np.sqrt(kcut**2 + (m*np.pi/L)**2)
def vg(w): return c**2*np.sqrt((w/c)**2 - kcut**2)/w

k_c = np.sqrt((wc_target/c)**2 - kcut**2)
mc = int(round(k_c*L/np.pi))

def lamb_variants(kappa, half, vg_mode=False, resonant=True):
    Om = omega_m(mc) if resonant else 0.5*(omega_m(mc)+omega_m(mc+1))
    ms = np.arange(max(1, mc-half), mc+half+1)
    wm = omega_m(ms)
    v = vg(wm) if vg_mode else vg(Om)
    G = np.sqrt(kappa*v*wm/(2*Om*L))
    N = len(ms)
    H = np.zeros((N+1, N+1))
    H[0,0] = Om; H[0,1:] = G; H[1:,0] = G
    H[np.arange(1,N+1), np.arange(1,N+1)] = wm
    ev, evec = np.linalg.eigh(H)
    w = evec[0,:]**2
    order = np.argsort(w)[::-1]
    lam_max = ev[order[0]] - Om
    lam_mid = 0.5*(ev[order[0]]+ev[order[1]]) - Om
    det = Om - wm
    mask = np.abs(det) > 1e-3*kappa
    lam_pert = np.sum(G[mask]**2/det[mask])
    return lam_max/kappa, lam_mid/kappa, lam_pert/kappa

kappa = 2*np.pi*1e6
print("=== vg(omega_c), resonant ===")
for half in [5, 10, 20, 50, 100, 200, 400, 700, 1000]:
    r = lamb_variants(kappa, half, vg_mode=False)
    print(f"half={half:5d} mid={r[1]:+.5f} pert={r[2]:+.5f}")
print("=== vg(omega_m) per mode, resonant ===")
for half in [5, 10, 20, 50, 100, 200, 400, 700, 1000]:
    r = lamb_variants(kappa, half, vg_mode=True)
    print(f"half={half:5d} mid={r[1]:+.5f} pert={r[2]:+.5f}")
print("=== vg(omega_m) per mode, off-resonant max-weight ===")
for half in [5, 10, 20, 50, 100, 200, 400, 700, 1000]:
    r = lamb_variants(kappa, half, vg_mode=True, resonant=False)
    print(f"half={half:5d} max={r[0]:+.5f} pert={r[2]:+.5f}")
