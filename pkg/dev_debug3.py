import math
import itertools
import numpy as np

from needleperc import geometry, formulas
from needleperc.formulas import ThreeStateParams, h_units, _two_group_delta, _group_excess
from needleperc.geometry import DirPair

def mk(a_ratio, b_ratio, alpha=0.7, beta=2.0, r0=0.3, probs=(1/3, 1/3, 1/3)):
    sg = math.sin(beta - alpha)
    sb = math.sin(beta)
    sa = math.sin(alpha)
    h0 = r0 / sg
    return ThreeStateParams(alpha, beta, r0, a_ratio * h0 * sb, b_ratio * h0 * sa, *probs)

def make_probe(P, case):
    hu = h_units(P)
    dirs = P.dirs
    sa, sb, sg = math.sin(P.alpha), math.sin(P.beta), math.sin(dirs.gap)
    cb_, ca_ = math.cos(P.beta), math.cos(P.alpha)
    A = np.array([[1/sg, -cb_/(sb*sg)], [-1/sg, ca_/(sa*sg)]])

    def from_h(ha_val, hb_val):
        x = np.linalg.solve(A, np.array([ha_val, hb_val]))
        return (float(x[0]), float(x[1]))

    if case == "ii":
        boxes = ((P.r0, P.r_alpha - 0.5 * hu.h_beta * sb),
                 (0.5 * hu.h_beta * sg, 0.5 * P.r_beta))
    else:
        boxes = ((0.5 * hu.h_alpha * sg, 0.5 * P.r_alpha),
                 (0.5 * hu.h_beta * sg, 0.5 * P.r_beta))

    def diff(ca, cb):
        exact = _two_group_delta(ca, cb, (0.0, 0.0), P, hu)
        exc_a = _group_excess(DirPair(0.0, P.alpha), *boxes[0], ca)
        exc_b = _group_excess(DirPair(0.0, P.beta), *boxes[1], cb)
        core = (exc_a + exc_b) / hu.c
        if case == "iii":
            hs = [geometry.h_coords(p, dirs) for p in ca + cb]
            core += (2 * hu.h0 - hu.h_beta) * geometry.max_spread([h.h_bar0 for h in hs])
        return exact - core

    return from_h, diff, hu

P2 = mk(3.0, 1.2)
from_h, diff, hu = make_probe(P2, "ii")
h0 = hu.h0
t, s, w = 0.03 * h0, 0.02 * h0, 0.025 * h0

print("== case ii interactions (units of h0^2) ==")
u2 = h0 * h0
def show(tag, ca, cb, *cands):
    d = diff(ca, cb)
    parts = " ".join(f"{c/u2:.6f}" for c in cands)
    print(f"{tag}: diff={d/u2:.6f}  cands: {parts}")

O = (0.0, 0.0)
# A beta +t, B beta +s (same sign)
show("Ab+t Bb+s", [from_h(0, t), O], [from_h(0, s), O],
     0.5*t*t + 0.5*s*s, 0.5*max(t, s)**2, 0.5*(t+s)**2)
# A beta +t, B beta -s
show("Ab+t Bb-s", [from_h(0, t), O], [from_h(0, -s), O],
     0.5*t*t + 0.5*s*s, 0.5*max(t, s)**2, 0.5*(t+s)**2)
# A beta spread both sides: points +t and -s in A
show("Ab+t Ab-s", [from_h(0, t), from_h(0, -s), O], [O],
     0.5*(t+s)**2, 0.5*t*t + 0.5*s*s)
# B beta spread both sides
show("Bb+t Bb-s", [O], [from_h(0, t), from_h(0, -s), O],
     0.5*(t+s)**2, 0.5*t*t + 0.5*s*s)
# B alpha +w with B beta +s
show("Ba+w Bb+s", [O], [from_h(w, s), O], 0.5*s*s, 0.5*(w*s), 0.5*s*s + w*s)
# B alpha -w with B beta s
show("Ba-w Bb+s", [O], [from_h(-w, s), O], 0.5*s*s, 0.5*s*s + w*s)
# A beta t with B alpha w
show("Ab+t Ba+w", [from_h(0, t), O], [from_h(w, 0), O], 0.5*t*t, 0.5*t*t + w*t)
show("Ab+t Ba-w", [from_h(0, t), O], [from_h(-w, 0), O], 0.5*t*t)
# A alpha big displacement with A beta
show("Aa+w Ab+t", [from_h(w, t), O], [O], 0.5*t*t)
# hbar-style: A point with ha = -hb (hbar=0)
show("A(+w,-w)", [from_h(w, -w), O], [O], 0.5*w*w)
print()
print("== case iii interactions ==")
P3 = mk(2.0, 2.0)
from_h3, diff3, hu3 = make_probe(P3, "iii")
h03 = hu3.h0
t, s, w = 0.03 * h03, 0.02 * h03, 0.025 * h03
u2 = h03 * h03
def show3(tag, ca, cb, *cands):
    d = diff3(ca, cb)
    parts = " ".join(f"{c/u2:.6f}" for c in cands)
    print(f"{tag}: diff={d/u2:.6f}  cands: {parts}")

show3("Ab+t", [from_h3(0, t), O], [O], 0.5*t*t)
show3("Ab-t", [from_h3(0, -t), O], [O], 0.5*t*t)
show3("Aa+t", [from_h3(t, 0), O], [O], 0.5*t*t, 0.0)
show3("Ba+t", [O], [from_h3(t, 0), O], 0.5*t*t, 0.0)
show3("Bb+t", [O], [from_h3(0, t), O], 0.5*t*t, 0.0)
show3("Ab+t Bb+s", [from_h3(0, t), O], [from_h3(0, s), O],
      0.5*t*t + 0.5*s*s, 0.5*max(t, s)**2)
show3("Ab+t Bb-s", [from_h3(0, t), O], [from_h3(0, -s), O],
      0.5*t*t + 0.5*s*s, 0.5*(t+s)**2)
show3("Aa+t Ba+s", [from_h3(t, 0), O], [from_h3(s, 0), O], 0.5*t*t + 0.5*s*s, 0.0)
show3("Aa+t Bb+s", [from_h3(t, 0), O], [from_h3(0, s), O], 0.5*t*t + 0.5*s*s, 0.5*s*s)
show3("A(+t,-t)", [from_h3(t, -t), O], [O], 0.5*t*t, t*t)
show3("B(+t,-t)", [O], [from_h3(t, -t), O], 0.5*t*t, t*t)
