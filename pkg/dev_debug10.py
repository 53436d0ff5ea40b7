import math
import numpy as np

from needleperc import geometry
from needleperc.formulas import ThreeStateParams, h_units, _two_group_delta
from needleperc.geometry import DirPair

def mk(a_ratio, b_ratio, alpha=0.7, beta=2.0, r0=0.3, probs=(1/3, 1/3, 1/3)):
    sg = math.sin(beta - alpha); sb = math.sin(beta); sa = math.sin(alpha)
    h0 = r0 / sg
    return ThreeStateParams(alpha, beta, r0, a_ratio * h0 * sb, b_ratio * h0 * sa, *probs)

def from_h_fn(P):
    sa, sb, sg = math.sin(P.alpha), math.sin(P.beta), math.sin(P.dirs.gap)
    cbv, cav = math.cos(P.beta), math.cos(P.alpha)
    A = np.array([[1/sg, -cbv/(sb*sg)], [-1/sg, cav/(sa*sg)]])
    def from_h(ha_val, hb_val):
        x = np.linalg.solve(A, np.array([ha_val, hb_val]))
        return (float(x[0]), float(x[1]))
    return from_h

def probe(P, case, n_trials, frac, seed):
    hu = h_units(P)
    from_h = from_h_fn(P)
    rng = np.random.default_rng(seed)
    h0 = hu.h0
    if case == "ii":
        wa, wb = hu.h_alpha - hu.h_beta, hu.h_beta
    else:
        wa, wb = hu.h_alpha, hu.h_beta
    worst = -1e9
    n_done = 0
    for _ in range(n_trials):
        na, nb = rng.integers(1, 4), rng.integers(1, 4)
        lim_a, lim_b = frac*wa/3, frac*wb/3
        ca = [from_h(rng.uniform(-0.5, 0.5)*lim_a, rng.uniform(-0.5, 0.5)*lim_b)
              for _ in range(na-1)] + [(0.0, 0.0)]
        cb = [from_h(rng.uniform(-0.5, 0.5)*lim_a, rng.uniform(-0.5, 0.5)*lim_b)
              for _ in range(nb-1)] + [(0.0, 0.0)]
        u = from_h(rng.uniform(-1, 1)*lim_a*0.5, rng.uniform(-1, 1)*lim_b*0.5)
        hs_a = [geometry.h_coords(p, P.dirs) for p in ca]
        hs_b = [geometry.h_coords(p, P.dirs) for p in cb]
        hu_u = geometry.h_coords(u, P.dirs)
        ma_x = geometry.max_spread([h.h_alpha for h in hs_a])
        ma_y = geometry.max_spread([h.h_alpha for h in hs_b])
        mb_x = geometry.max_spread([h.h_beta for h in hs_a])
        mb_y = geometry.max_spread([h.h_beta for h in hs_b])
        ma = ma_x + ma_y + abs(hu_u.h_alpha)
        mb = mb_x + mb_y + abs(hu_u.h_beta)
        if not (ma < wa and mb < wb):
            continue
        n_done += 1
        d_u = _two_group_delta(ca, cb, u, P, hu)
        d_0 = _two_group_delta(ca, cb, (0.0, 0.0), P, hu)
        if case == "ii":
            lhs = abs(d_u - d_0)
            rhs = (hu_u.h_beta**2 + (abs(hu_u.h_alpha) + abs(hu_u.h_beta))
                   * (ma_x + mb_x + ma_y + mb_y))
        else:
            bars_x = [h.h_bar0 for h in hs_a]
            bars_yu = [h.h_bar0 + hu_u.h_bar0 for h in hs_b]
            bars_y = [h.h_bar0 for h in hs_b]
            corr = (geometry.max_spread(bars_x + bars_yu) - abs(hu_u.h_bar0)
                    - geometry.max_spread(bars_x + bars_y))
            lhs = abs(d_u - d_0 - (2*hu.h0 - hu.h_beta)*corr)
            rhs = (hu_u.h_alpha**2 + hu_u.h_beta**2 + abs(corr)*(ma + mb)
                   + (abs(hu_u.h_alpha) + abs(hu_u.h_beta))*(ma_x + mb_x + ma_y + mb_y))
        worst = max(worst, lhs - rhs)
    print(f"{case}: n={n_done} worst violation {worst/h0**2:+.4e} h0^2")

probe(mk(3.0, 1.2), "ii", 700, 0.6, 11)
probe(mk(2.6, 0.7), "ii", 700, 0.6, 12)
probe(mk(4.0, 1.9), "ii", 700, 0.6, 16)
probe(mk(2.0, 2.0), "iii", 700, 0.35, 13)
probe(mk(1.7, 1.7), "iii", 700, 0.35, 14)
probe(mk(1.0, 1.0), "iii", 700, 0.6, 15)
probe(mk(0.8, 0.8), "iii", 700, 0.6, 17)
