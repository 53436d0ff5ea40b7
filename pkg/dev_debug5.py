import math
import numpy as np

from needleperc import geometry, formulas
from needleperc.formulas import ThreeStateParams, h_units, _two_group_delta, _group_excess
from needleperc.geometry import DirPair

def mk(a_ratio, b_ratio, alpha=0.7, beta=2.0, r0=0.3, probs=(1/3, 1/3, 1/3)):
    sg = math.sin(beta - alpha); sb = math.sin(beta); sa = math.sin(alpha)
    h0 = r0 / sg
    return ThreeStateParams(alpha, beta, r0, a_ratio * h0 * sb, b_ratio * h0 * sa, *probs)

def setup(P):
    hu = h_units(P)
    dirs = P.dirs
    sa, sb, sg = math.sin(P.alpha), math.sin(P.beta), math.sin(dirs.gap)
    cbv, cav = math.cos(P.beta), math.cos(P.alpha)
    A = np.array([[1/sg, -cbv/(sb*sg)], [-1/sg, cav/(sa*sg)]])
    def from_h(ha_val, hb_val):
        x = np.linalg.solve(A, np.array([ha_val, hb_val]))
        return (float(x[0]), float(x[1]))
    boxes = ((0.5 * hu.h_alpha * sg, 0.5 * P.r_alpha),
             (0.5 * hu.h_beta * sg, 0.5 * P.r_beta))
    def diff(ca, cb):
        exact = _two_group_delta(ca, cb, (0.0, 0.0), P, hu)
        exc_a = _group_excess(DirPair(0.0, P.alpha), *boxes[0], ca)
        exc_b = _group_excess(DirPair(0.0, P.beta), *boxes[1], cb)
        hs = [geometry.h_coords(p, dirs) for p in ca + cb]
        mbar = geometry.max_spread([h.h_bar0 for h in hs])
        core = (exc_a + exc_b) / hu.c + (2*hu.h0 - hu.h_beta) * mbar
        return exact - core
    return from_h, diff, hu

P = mk(2.0, 2.0)
from_h, diff, hu = setup(P)
h0 = hu.h0
O = (0.0, 0.0)

# single B point (w, v) cost in units of h0^2, w,v in units of h0
print("single B point cost / h0^2; rows w, cols v (h_alpha, h_beta offsets)")
vals = [-0.04, -0.02, 0.02, 0.04]
print("      " + "".join(f"{v:>10.2f}" for v in vals))
for w in vals:
    row = []
    for v in vals:
        d = diff([O], [from_h(w*h0, v*h0), O])
        row.append(d / h0**2)
    print(f"{w:>5.2f} " + "".join(f"{r:>10.6f}" for r in row))

print()
print("candidates for f_B(w,v):")
for (w, v) in [(0.02, 0.04), (0.02, -0.04), (-0.02, 0.04), (-0.02, -0.04),
               (0.04, 0.02), (0.04, -0.02), (-0.04, 0.02), (-0.04, -0.02)]:
    d = diff([O], [from_h(w*h0, v*h0), O]) / h0**2
    hbar = w + v
    cands = {
        "w2/2": 0.5*w*w,
        "(w2+v2)/2": 0.5*(w*w+v*v),
        "w2/2+wv": 0.5*w*w + w*v,
        "hbar2/2": 0.5*hbar*hbar,
        "w2/2+|wv|": 0.5*w*w + abs(w*v),
        "(|w|+|v|)^2/2-v2/2": 0.5*(abs(w)+abs(v))**2 - 0.5*v*v,
    }
    best = min(cands, key=lambda k: abs(cands[k]-d))
    print(f"w={w:+.2f} v={v:+.2f}: f={d:.6f} best={best}({cands[best]:.6f}) "
          + " ".join(f"{k}={val:.6f}" for k, val in cands.items()))

print()
print("single A point cost (t_alpha, t_beta):")
for (w, v) in [(0.02, 0.04), (0.02, -0.04), (-0.02, 0.04), (-0.02, -0.04),
               (0.04, 0.02), (0.04, -0.02), (-0.04, 0.02), (-0.04, -0.02)]:
    d = diff([from_h(w*h0, v*h0), O], [O]) / h0**2
    hbar = w + v
    cands = {
        "v2/2": 0.5*v*v,
        "(w2+v2)/2": 0.5*(w*w+v*v),
        "v2/2+|wv|": 0.5*v*v + abs(w*v),
        "hbar2/2": 0.5*hbar*hbar,
    }
    best = min(cands, key=lambda k: abs(cands[k]-d))
    print(f"w={w:+.2f} v={v:+.2f}: f={d:.6f} best={best}({cands[best]:.6f}) "
          + " ".join(f"{k}={val:.6f}" for k, val in cands.items()))
