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

def lamb_eig(kappa, ms, Om, drop_resonant=True):
    wm = omega_m(ms)
    if drop_resonant:
        keep = np.abs(wm - Om) > 0.45*(omega_m(mc+1)-omega_m(mc))
        ms = ms[keep]; wm = wm[keep]
    v = vg(Om)
    G = np.sqrt(kappa*v*wm/(2*Om*L))
    N = len(ms)
    H = np.zeros((N+1, N+1))
    H[0,0] = Om; H[0,1:] = G; H[1:,0] = G
    H[np.arange(1,N+1), np.arange(1,N+1)] = wm
    ev, evec = np.linalg.eigh(H)
    w = evec[0,:]**2
    i = np.argmax(w)
    return (ev[i]-Om)/kappa, w[i]

full = np.arange(1, 2*mc)
for kmhz in [1, 5]:
    kap = 2*np.pi*kmhz*1e6
    lam, w = lamb_eig(kap, full, omega_m(mc))
    print(f"kappa={kmhz}MHz full-band drop-res: lam/kappa={lam:+.5f} weight={w:.4f}")

# small protocol-style windows (resonant alignment), drop-res
for half in [3, 10, 50, 150, 300]:
    ms = np.arange(mc-half, mc+half+1)
    lam, w = lamb_eig(2*np.pi*1e6, ms, omega_m(mc))
    print(f"half={half:4d} drop-res: lam/kappa={lam:+.6f} weight={w:.4f}")

# synthetic symmetric: constant G, equispaced, Om centered on a mode
def synth():
    Om = 0.0
    wm = np.linspace(-50., 50., 101)   # Om on central mode
    keep = np.abs(wm - Om) > 0.45
    wm = wm[keep]
    G = np.full(len(wm), 0.5)
    N = len(wm)
    H = np.zeros((N+1, N+1))
    H[0,0] = Om; H[0,1:] = G; H[1:,0] = G
    H[np.arange(1,N+1), np.arange(1,N+1)] = wm
    ev, evec = np.linalg.eigh(H)
    w = evec[0,:]**2
    i = np.argmax(w)
    return ev[i]-Om, w[i]
print("synthetic symmetric:", synth())
