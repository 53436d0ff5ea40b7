import math
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

def setup(P):
    hu = h_units(P)
    dirs = P.dirs
    sa, sb, sg = math.sin(P.alpha), math.sin(P.beta), math.sin(dirs.gap)
    cb_, ca_ = math.cos(P.beta), math.cos(P.alpha)
    A = np.array([[1/sg, -cb_/(sb*sg)], [-1/sg, ca_/(sa*sg)]])
    def from_h(ha_val, hb_val):
        x = np.linalg.solve(A, np.array([ha_val, hb_val]))
        return (float(x[0]), float(x[1]))
    boxes = ((0.5 * hu.h_alpha * sg, 0.5 * P.r_alpha),
             (0.5 * hu.h_beta * sg, 0.5 * P.r_beta))
    def parts(ca, cb):
        exact = _two_group_delta(ca, cb, (0.0, 0.0), P, hu)
        exc_a = _group_excess(DirPair(0.0, P.alpha), *boxes[0], ca)
        exc_b = _group_excess(DirPair(0.0, P.beta), *boxes[1], cb)
        hs_a = [geometry.h_coords(p, dirs) for p in ca]
        hs_b = [geometry.h_coords(p, dirs) for p in cb]
        mbar = geometry.max_spread([h.h_bar0 for h in hs_a + hs_b])
        core = (exc_a + exc_b) / hu.c + (2*hu.h0 - hu.h_beta) * mbar
        return exact, core, hs_a, hs_b, mbar
    return from_h, parts, hu

# dense random hunt at the critical equal-scale point
P = mk(2.0, 2.0)
from_h, parts, hu = setup(P)
h0 = hu.h0
rng = np.random.default_rng(123)
worst = (0.0, None)
for _ in range(400):
    na, nb = rng.integers(1, 4), rng.integers(1, 4)
    ca = [from_h(rng.uniform(-1, 1)*0.04*h0, rng.uniform(-1, 1)*0.04*h0) for _ in range(na-1)] + [(0.0, 0.0)]
    cb = [from_h(rng.uniform(-1, 1)*0.04*h0, rng.uniform(-1, 1)*0.04*h0) for _ in range(nb-1)] + [(0.0, 0.0)]
    exact, core, hs_a, hs_b, mbar = parts(ca, cb)
    mb_x = geometry.max_spread([h.h_beta for h in hs_a])
    ma_y = geometry.max_spread([h.h_alpha for h in hs_b])
    printed = 0.5*mb_x**2 + 0.5*ma_y**2
    viol = (exact - core) - printed
    if viol > worst[0]:
        worst = (viol, (ca, cb, exact, core, mb_x, ma_y, hs_a, hs_b))

print(f"worst violation: {worst[0]/h0**2:.6f} h0^2")
ca, cb, exact, core, mb_x, ma_y, hs_a, hs_b = worst[1]
print("A h-coords:", [(round(h.h_alpha/h0, 4), round(h.h_beta/h0, 4)) for h in hs_a])
print("B h-coords:", [(round(h.h_alpha/h0, 4), round(h.h_beta/h0, 4)) for h in hs_b])
d = exact - core
ma_x = geometry.max_spread([h.h_alpha for h in hs_a])
mb_y = geometry.max_spread([h.h_beta for h in hs_b])
u2 = h0*h0
print(f"diff={d/u2:.6f} printed={0.5*(mb_x**2+ma_y**2)/u2:.6f}")
print(f"Ma_x={ma_x/h0:.4f} Mb_x={mb_x/h0:.4f} Ma_y={ma_y/h0:.4f} Mb_y={mb_y/h0:.4f}")
# candidate corrections
c1 = 0.5*(mb_x + ma_y)**2
c2 = 0.5*mb_x**2 + 0.5*ma_y**2 + mb_x*ma_y
xplus = max(h.h_beta for h in hs_a); xminus = min(h.h_beta for h in hs_a)
yplus = max(h.h_alpha for h in hs_b); yminus = min(h.h_alpha for h in hs_b)
c3 = 0.5*(xplus**2 + xminus**2 + yplus**2 + yminus**2)
# cross-group end-matching like case ii
bxp = max(h.h_beta for h in hs_a); byp = max(h.h_beta for h in hs_b)
bxm = min(h.h_beta for h in hs_a); bym = min(h.h_beta for h in hs_b)
axp = max(h.h_alpha for h in hs_a); ayp = max(h.h_alpha for h in hs_b)
axm = min(h.h_alpha for h in hs_a); aym = min(h.h_alpha for h in hs_b)
c4 = 0.5*((bxp-byp)**2 + (bxm-bym)**2 + (ayp-axp)**2 + (aym-axm)**2)
print(f"cands: half-sum-sq={c1/u2:.6f} +cross={c2/u2:.6f} ends={c3/u2:.6f} crossends={c4/u2:.6f}")

# now systematic 2-end probes: A beta two-sided with B alpha two-sided
t, s = 0.03*h0, 0.02*h0
O = (0.0, 0.0)
def show(tag, ca, cb, *cands):
    exact, core, *_ = parts(ca, cb)
    d = exact - core
    print(f"{tag}: diff={d/u2:.6f} cands: " + " ".join(f"{c/u2:.6f}" for c in cands))

show("Ab(+t,-s)", [from_h(0, t), from_h(0, -s), O], [O], 0.5*t*t + 0.5*s*s, 0.5*(t+s)**2)
show("Ba(+t,-s)", [O], [from_h(t, 0), O, from_h(-s, 0)][:2] + [O], 0.5*t*t)
show("Ba(+t),Ba(-s)", [O], [from_h(t, 0), from_h(-s, 0), O], 0.5*t*t + 0.5*s*s, 0.5*(t+s)**2)
show("Ab+t Ba+s", [from_h(0, t), O], [from_h(s, 0), O], 0.5*t*t + 0.5*s*s, 0.5*(t+s)**2, 0.5*(t-s)**2)
show("Ab+t Ba-s", [from_h(0, t), O], [from_h(-s, 0), O], 0.5*t*t + 0.5*s*s, 0.5*(t+s)**2, 0.5*(t-s)**2)
show("Ab-t Ba+s", [from_h(0, -t), O], [from_h(s, 0), O], 0.5*t*t + 0.5*s*s, 0.5*(t+s)**2, 0.5*(t-s)**2)
# A alpha with B beta (the free directions) combined with the costly ones
show("Aa+t Ab+s", [from_h(t, s), O], [O], 0.5*s*s)
show("Ab+t Bb+s Ba+s", [from_h(0, t), O], [from_h(s, s), O], 0.5*t*t + 0.5*s*s, 0.5*(t-s)**2 + 0.5*s*s)
# hbar interplay at strict 2h0 > hb: a=b=1.7
print()
print("== a=b=1.7 (strict slack, hbar term active) ==")
P2 = mk(1.7, 1.7)
from_h2, parts2, hu2 = setup(P2)
h02 = hu2.h0
u2 = h02*h02
t, s = 0.03*h02, 0.02*h02
def show2(tag, ca, cb, *cands):
    exact, core, *_ = parts2(ca, cb)
    d = exact - core
    print(f"{tag}: diff={d/u2:.6f} cands: " + " ".join(f"{c/u2:.6f}" for c in cands))
show2("Ab+t", [from_h2(0, t), O], [O], 0.5*t*t)
show2("Ba+t", [O], [from_h2(t, 0), O], 0.5*t*t)
show2("Aa+t", [from_h2(t, 0), O], [O], 0.5*t*t, 0.0)
show2("Bb+t", [O], [from_h2(0, t), O], 0.5*t*t, 0.0)
show2("A(hbar+t)", [from_h2(0.5*t, 0.5*t), O], [O], 0.5*t*t, 0.25*t*t)
show2("B(hbar+t)", [O], [from_h2(0.5*t, 0.5*t), O], 0.5*t*t, 0.25*t*t)
show2("Ab+t Ba+s", [from_h2(0, t), O], [from_h2(s, 0), O], 0.5*t*t + 0.5*s*s, 0.5*(t-s)**2)
show2("Ahbar+t Bhbar-s", [from_h2(0.5*t, 0.5*t), O], [from_h2(-0.5*s, -0.5*s), O],
      0.5*t*t + 0.5*s*s, 0.0)
