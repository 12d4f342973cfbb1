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

def study(kappa, mlo, mhi, vg_mode=False):
    Om = omega_m(mc)
    ms = np.arange(mlo, mhi+1)
    wm = omega_m(ms)
    v = vg(wm) if vg_mode else vg(Om)
    G = np.sqrt(kappa*v*wm/(2*Om*L))
    det = Om - wm
    mask = np.abs(det) > 1e-3*kappa
    lam_pert = np.sum(G[mask]**2/det[mask])
    N = len(ms)
    H = np.zeros((N+1, N+1))
    H[0,0] = Om; H[0,1:] = G; H[1:,0] = G
    H[np.arange(1,N+1), np.arange(1,N+1)] = wm
    ev, evec = np.linalg.eigh(H)
    w = evec[0,:]**2
    order = np.argsort(w)[::-1]
    lam_mid = 0.5*(ev[order[0]]+ev[order[1]]) - Om
    return lam_pert/kappa, lam_mid/kappa

kappa = 2*np.pi*1e6
# full physical band, symmetric in index
for (lo,hi,tag) in [(1, 2*mc-1, "sym-index full"), (1, 2*mc, "1..2mc"),
                    (mc-1000, mc+1000, "half1000"), (mc-1050, mc+1050, "half1050"),
                    (1, 3*mc, "1..3mc"), (1, 4*mc, "1..4mc")]:
    p, m = study(kappa, max(1,lo), hi)
    print(f"{tag:15s} vgc: pert={p:+.5f} mid={m:+.5f}")
for (lo,hi,tag) in [(1, 2*mc-1, "sym-index full")]:
    p, m = study(kappa, lo, hi, vg_mode=True)
    print(f"{tag:15s} vgm: pert={p:+.5f} mid={m:+.5f}")
# kappa scaling at full band
for kmhz in [1,5]:
    kap = 2*np.pi*kmhz*1e6
    p, m = study(kap, 1, 2*mc-1)
    print(f"kappa={kmhz}MHz full: pert={p:+.5f} mid={m:+.5f}")
