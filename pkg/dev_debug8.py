import math
import numpy as np

from needleperc import geometry
from needleperc.formulas import ThreeStateParams, h_units, _two_group_delta, _group_excess
from needleperc.geometry import DirPair

def mk(a_ratio, b_ratio, alpha=0.7, beta=2.0, r0=0.3, probs=(1/3, 1/3, 1/3)):
    sg = math.sin(beta - alpha); sb = math.sin(beta); sa = math.sin(alpha)
    h0 = r0 / sg
    return ThreeStateParams(alpha, beta, r0, a_ratio * h0 * sb, b_ratio * h0 * sa, *probs)

def setup(P, case):
    hu = h_units(P)
    sa, sb, sg = math.sin(P.alpha), math.sin(P.beta), math.sin(P.dirs.gap)
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
            hs = [geometry.h_coords(p, P.dirs) for p in ca + cb]
            core += (2*hu.h0 - hu.h_beta) * geometry.max_spread([h.h_bar0 for h in hs])
        return core
    return from_h, core_of, hu

def q_upper(case, sp):
    if case == "ii":
        return (0.5*sp["mb_x"]**2 + 0.5*sp["mb_y"]**2
                + sp["ma_x"]*sp["mb_x"] + sp["ma_y"]*sp["mb_y"])
    return (0.5*(sp["mb_x"] + sp["ma_y"])**2
            + sp["ma_x"]*sp["mb_x"] + sp["ma_y"]*sp["mb_y"]
            + min(sp["mbar_x"], sp["mbar_y"])*(sp["mbar_x"] + sp["mbar_y"]))

def q_lower(case, sp):
    if case == "ii":
        return -(sp["mb_x"]*sp["mb_y"] + sp["mb_x"]*sp["ma_y"]
                 + sp["mb_x"]**2 + sp["ma_y"]**2)
    mbar = max(sp["mbar_x"], sp["mbar_y"])  # joint spread bounded by per-group max when both pinned at 0
    return -(0.5*sp["mbar_xy"]**2
             + min(sp["mbar_x"], sp["mbar_y"])*(sp["mb_x"] + sp["ma_y"]))

def sweep(P, case, n_trials, frac, seed):
    """frac: per-group spread budget as a fraction of the hypothesis window."""
    from_h, core_of, hu = setup(P, case)
    rng = np.random.default_rng(seed)
    if case == "ii":
        wa, wb = hu.h_alpha - hu.h_beta, hu.h_beta
    else:
        wa, wb = hu.h_alpha, hu.h_beta
    lim_a, lim_b = 0.5*frac*wa, 0.5*frac*wb   # half-window per group, scaled
    worst_up, worst_lo = -1e9, -1e9
    n_done = 0
    for _ in range(n_trials):
        na, nb = rng.integers(1, 5), rng.integers(1, 5)
        ca = [from_h(rng.uniform(-0.5, 0.5)*lim_a, rng.uniform(-0.5, 0.5)*lim_b)
              for _ in range(na-1)] + [(0.0, 0.0)]
        cb = [from_h(rng.uniform(-0.5, 0.5)*lim_a, rng.uniform(-0.5, 0.5)*lim_b)
              for _ in range(nb-1)] + [(0.0, 0.0)]
        hs_a = [geometry.h_coords(p, P.dirs) for p in ca]
        hs_b = [geometry.h_coords(p, P.dirs) for p in cb]
        sp = dict(
            ma_x=geometry.max_spread([h.h_alpha for h in hs_a]),
            mb_x=geometry.max_spread([h.h_beta for h in hs_a]),
            ma_y=geometry.max_spread([h.h_alpha for h in hs_b]),
            mb_y=geometry.max_spread([h.h_beta for h in hs_b]),
            mbar_x=geometry.max_spread([h.h_bar0 for h in hs_a]),
            mbar_y=geometry.max_spread([h.h_bar0 for h in hs_b]),
            mbar_xy=geometry.max_spread([h.h_bar0 for h in hs_a + hs_b]),
        )
        if case == "ii":
            if not (sp["ma_x"] + sp["ma_y"] < wa and sp["mb_x"] + sp["mb_y"] < wb):
                continue
        else:
            if not (sp["ma_x"] + sp["ma_y"] < wa and sp["mb_x"] + sp["mb_y"] < wb):
                continue
        n_done += 1
        exact = _two_group_delta(ca, cb, (0.0, 0.0), P, hu)
        d = exact - core_of(ca, cb)
        worst_up = max(worst_up, d - q_upper(case, sp))
        worst_lo = max(worst_lo, q_lower(case, sp) - d)
    return worst_up, worst_lo, n_done, hu

import sys
frac = float(sys.argv[1]) if len(sys.argv) > 1 else 0.3
n = int(sys.argv[2]) if len(sys.argv) > 2 else 1200
for P, case, tag in [
        (mk(3.0, 1.2), "ii", "ii a=3.0 b=1.2"),
        (mk(4.0, 1.9), "ii", "ii a=4.0 b=1.9"),
        (mk(2.6, 0.7), "ii", "ii a=2.6 b=0.7"),
        (mk(3.0, 1.2, alpha=0.3, beta=2.9), "ii", "ii thin wedge"),
        (mk(2.0, 2.0), "iii", "iii a=b=2 crit"),
        (mk(1.7, 1.7), "iii", "iii a=b=1.7"),
        (mk(1.0, 1.0), "iii", "iii a=b=1.0"),
        (mk(0.8, 0.8), "iii", "iii a=b=0.8"),
        (mk(1.5, 1.5, alpha=0.3, beta=2.9), "iii", "iii thin wedge"),
]:
    wu, wl, nd, hu = sweep(P, case, n, frac, 7)
    print(f"{tag:18s} frac={frac}: n={nd:4d} upper viol {wu/hu.h0**2:+.3e} "
          f"lower viol {wl/hu.h0**2:+.3e}  [h0^2]")
