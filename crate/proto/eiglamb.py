import numpy as np
import fullband as fb

def doublet(L, kap_mhz, offres=False):
    C, KCUT = fb.c, fb.kcut
    kap = 2*np.pi*kap_mhz*1e6
    wc_t = 2*np.pi*8.4e9
    k_c = np.sqrt((wc_t/C)**2 - KCUT**2)
    mc = int(round(k_c*L/np.pi))
    if offres:
        Om = 0.5*(fb.omega_m(mc, L) + fb.omega_m(mc+1, L))
    else:
        Om = fb.omega_m(mc, L)
    v = fb.vg(Om)
    ms = np.arange(1, 2*mc)
    wm = fb.omega_m(ms, L)
    G = np.sqrt(kap*v*wm/(2*Om*L))
    N = len(ms)
    # arrowhead: index 0 = resonator
    diag = np.concatenate(([Om], wm))
    A = np.diag(diag)
    A[0, 1:] = G; A[1:, 0] = G
    w, V = np.linalg.eigh(A)
    wt = V[0, :]**2
    order = np.argsort(wt)[::-1]
    w1, w2 = wt[order[0]], wt[order[1]]
    if w1 > 0.9:
        lam = w[order[0]] - Om
        tag = f"single wt={w1:.3f}"
    else:
        lam = 0.5*(w[order[0]] + w[order[1]]) - Om
        tag = f"doublet wts={w1:.3f},{w2:.3f}"
    # pert reference
    if offres:
        lam_p = np.sum(G**2/(Om - wm))
    else:
        mask = ms != mc
        lam_p = np.sum(G[mask]**2/(Om - wm[mask]))
    return lam/kap, lam_p/kap, tag

for L, k, off in [(30,1.0,False),(30,5.0,False),(5,1.0,False),(1,1.0,False),(30,1.0,True)]:
    le, lp, tag = doublet(L, k, off)
    print(f"L={L} k={k} off={off}: eig={le:+.6f} pert={lp:+.6f} diff={le-lp:+.2e} [{tag}]", flush=True)
