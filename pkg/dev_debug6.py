import math
import numpy as np

from needleperc import geometry, formulas
from needleperc.formulas import ThreeStateParams, h_units, _two_group_delta, _group_excess
from needleperc.geometry import DirPair

def mk(a_ratio, b_ratio, alpha=0.7, beta=2.0, r0=0.3, probs=(1/3, 1/3, 1/3)):
    sg = math.sin(beta - alpha); sb = math.sin(beta); sa = math.sin(alpha)
    h0 = r0 / sg
    return ThreeStateParams(alpha, beta, r0, a_ratio * h0 * sb, b_ratio * h0 * sa, *probs)

def setup(P, case):
    hu = h_units(P)
    dirs = P.dirs
    sa, sb, sg = math.sin(P.alpha), math.sin(P.beta), math.sin(dirs.gap)
    cbv, cav = math.cos(P.beta), math.cos(P.alpha)
    A = np.array([[1/sg, -cbv/(sb*sg)], [-1/sg, cav/(sa*sg)]])
    def from_h(ha_val, hb_val):
        x = np.linalg.solve(A, np.array([ha_val, hb_val]))
        return (float(x[0]), float(x[1]))
    if case == "ii":
        boxes = ((P.r0, P.r_alpha - 0.5*hu.h_beta*sb), (0.5*hu.h_beta*sg, 0.5*P.r_beta))
    else:
        boxes = ((0.5*hu.h_alpha*sg, 0.5*P.r_alpha), (0.5*hu.h_beta*sg, 0.5*P.r_beta))
    def core_of(ca, cb):
        exc_a = _group_excess(DirPair(0.0, P.alpha), *boxes[0], ca)
        exc_b = _group_excess(DirPair(0.0, P.beta), *boxes[1], cb)
        core = (exc_a + exc_b) / hu.c
        if case == "iii":
            hs = [geometry.h_coords(p, dirs) for p in ca + cb]
            core += (2*hu.h0 - hu.h_beta) * geometry.max_spread([h.h_bar0 for h in hs])
        return core
    return from_h, core_of, hu

def sweep(P, case, n_trials, max_h, seed):
    from_h, core_of, hu = setup(P, case)
    dirs = P.dirs
    rng = np.random.default_rng(seed)
    h0 = hu.h0
    worst_up = (-1e9, None)
    worst_lo = (-1e9, None)
    for _ in range(n_trials):
        na, nb = rng.integers(1, 5), rng.integers(1, 5)
        ca = [from_h(rng.uniform(-1, 1)*max_h*h0, rng.uniform(-1, 1)*max_h*h0)
              for _ in range(na-1)] + [(0.0, 0.0)]
        cb = [from_h(rng.uniform(-1, 1)*max_h*h0, rng.uniform(-1, 1)*max_h*h0)
              for _ in range(nb-1)] + [(0.0, 0.0)]
        hs_a = [geometry.h_coords(p, dirs) for p in ca]
        hs_b = [geometry.h_coords(p, dirs) for p in cb]
        ma_x = geometry.max_spread([h.h_alpha for h in hs_a])
        mb_x = geometry.max_spread([h.h_beta for h in hs_a])
        ma_y = geometry.max_spread([h.h_alpha for h in hs_b])
        mb_y = geometry.max_spread([h.h_beta for h in hs_b])
        # hypothesis windows
        if case == "ii":
            if not (ma_x + ma_y < hu.h_alpha - hu.h_beta and mb_x + mb_y < hu.h_beta):
                continue
            up_corr = 0.5*mb_x**2 + 0.5*mb_y**2
            lo_corr = -(mb_x*mb_y + mb_x*ma_y + mb_x**2 + ma_y**2)
        else:
            if not (ma_x + ma_y < hu.h_alpha and mb_x + mb_y < hu.h_beta):
                continue
            mbar_x = geometry.max_spread([h.h_bar0 for h in hs_a])
            mbar_y = geometry.max_spread([h.h_bar0 for h in hs_b])
            mbar = geometry.max_spread([h.h_bar0 for h in hs_a + hs_b])
            up_corr = 0.5*mb_x**2 + 0.5*ma_y**2 + ma_y*mb_y + mb_x*ma_x
            lo_corr = -(0.5*mbar**2 + min(mbar_x, mbar_y)*(mb_x + ma_y))
        exact = _two_group_delta(ca, cb, (0.0, 0.0), P, hu)
        core = core_of(ca, cb)
        d = exact - core
        vu = d - up_corr        # >0 means upper violated
        vl = lo_corr - d        # >0 means lower violated
        if vu > worst_up[0]:
            worst_up = (vu, (ca, cb, d, up_corr))
        if vl > worst_lo[0]:
            worst_lo = (vl, (ca, cb, d, lo_corr))
    return worst_up, worst_lo, hu

for P, case, tag in [(mk(3.0, 1.2), "ii", "ii a=3 b=1.2"),
                     (mk(1.2, 3.0), "ii(swap->direct)", None),
                     (mk(4.0, 1.9), "ii", "ii a=4 b=1.9"),
                     (mk(2.6, 0.7), "ii", "ii a=2.6 b=0.7"),
                     (mk(2.0, 2.0), "iii", "iii crit"),
                     (mk(1.7, 1.7), "iii", "iii a=b=1.7"),
                     (mk(0.8, 0.8), "iii", "iii a=b=0.8"),
                     (mk(1.0, 1.0), "iii", "iii a=b=1")]:
    if tag is None:
        continue
    wu, wl, hu = sweep(P, case, 3000, 0.06, 42)
    print(f"{tag}: worst upper viol {wu[0]/hu.h0**2:+.2e} h0^2, "
          f"worst lower viol {wl[0]/hu.h0**2:+.2e} h0^2")
    # larger spreads too (quarter of the window)
    wu, wl, hu = sweep(P, case, 2000, 0.2, 43)
    print(f"{tag} (wider): upper {wu[0]/hu.h0**2:+.2e}, lower {wl[0]/hu.h0**2:+.2e}")
