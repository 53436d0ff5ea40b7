import math
import numpy as np

from needleperc import geometry, formulas
from needleperc.formulas import (
    ThreeStateParams, h_units, two_group_excess_bounds, _two_group_delta,
    _group_excess,
)
from needleperc.geometry import DirPair, SkewBox

rng = np.random.default_rng(7)

def mk(a_ratio, b_ratio, alpha=0.7, beta=2.0, r0=0.3, probs=(1/3, 1/3, 1/3)):
    sg = math.sin(beta - alpha)
    sb = math.sin(beta)
    sa = math.sin(alpha)
    h0 = r0 / sg
    return ThreeStateParams(alpha, beta, r0,
                            a_ratio * h0 * sb, b_ratio * h0 * sa, *probs)

P = mk(3.0, 1.2)
dirs = P.dirs
hu = h_units(P)

def rand_config(n, scale):
    ea, eb = geometry.direction(dirs.alpha), geometry.direction(dirs.beta)
    pts = []
    for _ in range(n - 1):
        u = (rng.random() * 2 - 1) * scale
        v = (rng.random() * 2 - 1) * scale
        pts.append((u * ea[0] + v * eb[0], u * ea[1] + v * eb[1]))
    pts.append((0.0, 0.0))
    return pts

# find a failing config
found = None
for trial in range(200):
    ca = rand_config(int(rng.integers(1, 4)), 0.02)
    cb = rand_config(int(rng.integers(1, 4)), 0.02)
    try:
        lo, up = two_group_excess_bounds("ii", ca, cb, P)
    except formulas.HypothesisError:
        continue
    exact = _two_group_delta(ca, cb, (0.0, 0.0), P, hu)
    if not (lo - 1e-9 <= exact <= up + 1e-9):
        found = (ca, cb, lo, exact, up)
        break

if not found:
    print("no failure found")
    raise SystemExit

ca, cb, lo, exact, up = found
print("config A:", ca)
print("config B:", cb)
print(f"lower {lo:.9f}  exact {exact:.9f}  upper {up:.9f}")
print(f"violation: exact - upper = {exact - up:.3e}")

# verify exact via raster
polys = [geometry.skewbox_polygon(SkewBox(p, DirPair(0.0, P.alpha), P.r0, P.r_alpha)) for p in ca] + \
        [geometry.skewbox_polygon(SkewBox(p, DirPair(0.0, P.beta), P.r0, P.r_beta)) for p in cb]
big, se1 = geometry.raster_area_oracle(polys, samples=2_000_000, seed=1)
base_polys = [geometry.skewbox_polygon(SkewBox((0.0, 0.0), DirPair(0.0, P.alpha), P.r0, P.r_alpha)),
              geometry.skewbox_polygon(SkewBox((0.0, 0.0), DirPair(0.0, P.beta), P.r0, P.r_beta))]
base, se2 = geometry.raster_area_oracle(base_polys, samples=2_000_000, seed=2)
exact_poly_big = geometry.union_area(polys)
exact_poly_base = geometry.union_area(base_polys)
print(f"raster big {big:.6f} +- {se1:.6f} vs poly {exact_poly_big:.6f}")
print(f"raster base {base:.6f} +- {se2:.6f} vs poly {exact_poly_base:.6f}")
print(f"delta from raster: {(big-base)/hu.c:.6f}, from poly: {exact:.6f}")

# term by term
sa, sb, sg = math.sin(P.alpha), math.sin(P.beta), math.sin(dirs.gap)
hs_a = [geometry.h_coords(p, dirs) for p in ca]
hs_b = [geometry.h_coords(p, dirs) for p in cb]
ma_x = geometry.max_spread([h.h_alpha for h in hs_a])
mb_x = geometry.max_spread([h.h_beta for h in hs_a])
ma_y = geometry.max_spread([h.h_alpha for h in hs_b])
mb_y = geometry.max_spread([h.h_beta for h in hs_b])
print(f"spreads: Ma(x)={ma_x:.6f} Mb(x)={mb_x:.6f} Ma(y)={ma_y:.6f} Mb(y)={mb_y:.6f}")
print(f"H: h0={hu.h0:.4f} ha={hu.h_alpha:.4f} hb={hu.h_beta:.4f}")

exc_a = _group_excess(DirPair(0.0, P.alpha), P.r0, P.r_alpha - 0.5 * hu.h_beta * sb, ca)
exc_b = _group_excess(DirPair(0.0, P.beta), 0.5 * hu.h_beta * sg, 0.5 * P.r_beta, cb)
core = (exc_a + exc_b) / hu.c
print(f"excA/C={exc_a/hu.c:.6f} excB/C={exc_b/hu.c:.6f} core={core:.6f}")
print(f"exact - core = {exact - core:.6e}")
print(f"upper corr = {0.5*mb_x**2 + 0.5*ma_y**2:.6e}")
print(f"Mb(x)^2={mb_x**2:.3e} Ma(y)^2={ma_y**2:.3e} Mb(x)*Ma(y)={mb_x*ma_y:.3e}")
print(f"candidate corr (no half) = {mb_x**2 + ma_y**2:.6e}")
print(f"candidate corr          = {0.5*(mb_x+ma_y)**2:.6e}")
print(f"candidate with cross    = {0.5*mb_x**2 + 0.5*ma_y**2 + mb_x*ma_y:.6e}")
