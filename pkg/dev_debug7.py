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

def describe(P, case, ca, cb):
    dirs = P.dirs
    hu = h_units(P)
    _, core_of, _ = setup(P, case)
    exact = _two_group_delta(ca, cb, (0.0, 0.0), P, hu)
    core = core_of(ca, cb)
    h0 = hu.h0
    print(f"  A-group h-coords (units h0):")
    for p in ca:
        h = geometry.h_coords(p, dirs)
        print(f"    ha={h.h_alpha/h0:+.4f} hb={h.h_beta/h0:+.4f} hbar={h.h_bar0/h0:+.4f}")
    print(f"  B-group h-coords:")
    for p in cb:
        h = geometry.h_coords(p, dirs)
        print(f"    ha={h.h_alpha/h0:+.4f} hb={h.h_beta/h0:+.4f} hbar={h.h_bar0/h0:+.4f}")
    print(f"  diff = (exact-core)/h0^2 = {(exact-core)/h0**2:+.6f}")
    return (exact - core) / h0**2

def sweep_report(P, case, n_trials, max_h, seed, q_fn, label):
    from_h, core_of, hu = setup(P, case)
    dirs = P.dirs
    rng = np.random.default_rng(seed)
    h0 = hu.h0
    worst = (-1e9, None)
    for _ in range(n_trials):
        na, nb = rng.integers(1, 4), rng.integers(1, 4)
        ca = [from_h(rng.uniform(-1, 1)*max_h*h0, rng.uniform(-1, 1)*max_h*h0)
              for _ in range(na-1)] + [(0.0, 0.0)]
        cb = [from_h(rng.uniform(-1, 1)*max_h*h0, rng.uniform(-1, 1)*max_h*h0)
              for _ in range(nb-1)] + [(0.0, 0.0)]
        hs_a = [geometry.h_coords(p, dirs) for p in ca]
        hs_b = [geometry.h_coords(p, dirs) for p in cb]
        sp = dict(
            ma_x=geometry.max_spread([h.h_alpha for h in hs_a]),
            mb_x=geometry.max_spread([h.h_beta for h in hs_a]),
            ma_y=geometry.max_spread([h.h_alpha for h in hs_b]),
            mb_y=geometry.max_spread([h.h_beta for h in hs_b]),
            mbar_x=geometry.max_spread([h.h_bar0 for h in hs_a]),
            mbar_y=geometry.max_spread([h.h_bar0 for h in hs_b]),
        )
        if case == "ii":
            if not (sp["ma_x"] + sp["ma_y"] < hu.h_alpha - hu.h_beta
                    and sp["mb_x"] + sp["mb_y"] < hu.h_beta):
                continue
        else:
            if not (sp["ma_x"] + sp["ma_y"] < hu.h_alpha
                    and sp["mb_x"] + sp["mb_y"] < hu.h_beta):
                continue
        exact = _two_group_delta(ca, cb, (0.0, 0.0), P, hu)
        core = core_of(ca, cb)
        d = exact - core
        v = d - q_fn(sp)
        if v > worst[0]:
            worst = (v, (ca, cb))
    print(f"== {label}: worst violation {worst[0]/h0**2:+.3e} h0^2")
    if worst[0] > 1e-12 and worst[1] is not None:
        describe(P, case, *worst[1])
    return worst

P_ii = mk(3.0, 1.2)
q_ii = lambda sp: 0.5*sp["mb_x"]**2 + 0.5*sp["mb_y"]**2
sweep_report(P_ii, "ii", 1500, 0.06, 42, q_ii, "case ii a=3 b=1.2, Q=.5Mbx^2+.5Mby^2")

P_17 = mk(1.7, 1.7)
q_iii = lambda sp: (0.5*sp["mb_x"]**2 + 0.5*sp["ma_y"]**2
                    + sp["ma_y"]*sp["mb_y"] + sp["mb_x"]*sp["ma_x"])
sweep_report(P_17, "iii", 1500, 0.06, 42, q_iii, "case iii a=b=1.7, Q=cand")
