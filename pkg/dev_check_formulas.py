import math
import numpy as np

from needleperc import geometry, formulas
from needleperc.formulas import (
    ThreeStateParams, TwoStateParams, h_units, contact_pair_union_area,
    shift_excess, free_box_halflengths, spread_excess_bounds,
    two_group_excess_bounds, shifted_excess_check, rate_exponent,
    vacancy_exponent, classify_regime, spread_weight, spread_integral,
    two_state_cluster_prob, composition_limit, entropy_rate,
    three_state_cluster_prob, cluster_decay_power, l1_threshold, l2_threshold,
    _two_group_delta, _pair_boxes,
)
from needleperc.geometry import DirPair, SkewBox

rng = np.random.default_rng(7)
fails = []

def check(name, ok, detail=""):
    if not ok:
        fails.append((name, detail))
        print(f"FAIL {name}: {detail}")
    else:
        print(f"ok   {name}")

# parameter sets spanning the regimes (alpha, beta, r0, ra, rb)
def mk(a_ratio, b_ratio, alpha=0.7, beta=2.0, r0=0.3, probs=(1/3, 1/3, 1/3)):
    sg = math.sin(beta - alpha)
    sb = math.sin(beta)
    sa = math.sin(alpha)
    h0 = r0 / sg
    return ThreeStateParams(alpha, beta, r0,
                            a_ratio * h0 * sb, b_ratio * h0 * sa, *probs)

P_far = mk(3.0, 4.5)          # both scales beyond twice h0
P_mixed = mk(3.0, 1.2)        # alpha large, beta within reach
P_mixed_rev = mk(1.2, 3.0)    # beta large, alpha within reach
P_crit = mk(2.0, 2.0)         # both exactly twice h0
P_inner = mk(1.4, 1.4)        # equal, below twice h0 (no prefactor)

# 1. contact_pair_union_area vs exact polygon union
for P in (P_far, P_mixed, P_mixed_rev, P_crit, P_inner):
    hu = h_units(P)
    ba, bb = _pair_boxes(P)
    exact = geometry.union_area([geometry.skewbox_polygon(ba), geometry.skewbox_polygon(bb)])
    closed = contact_pair_union_area(hu.h0, hu.h_alpha, hu.h_beta, hu.c)
    check(f"pair union a={hu.a:.2f} b={hu.b:.2f}", abs(exact - closed) < 1e-12, f"{exact} vs {closed}")

# boundary agreement min = 2 h0
Pb = mk(2.0, 3.7)
hub = h_units(Pb)
v1 = 4 * hub.c * hub.h0 * (hub.h_alpha + hub.h_beta - hub.h0)
v2 = hub.c * (4 * hub.h0 * max(hub.h_alpha, hub.h_beta) + min(hub.h_alpha, hub.h_beta) ** 2)
check("pair union branch boundary", abs(v1 - v2) < 1e-12, f"{v1} vs {v2}")

# 2. shift_excess closed form vs exact geometry on a grid
for P in (P_far, P_mixed, P_mixed_rev, P_crit, P_inner):
    hu = h_units(P)
    base = contact_pair_union_area(hu.h0, hu.h_alpha, hu.h_beta, hu.c)
    ba, _ = _pair_boxes(P)
    pa = geometry.skewbox_polygon(ba)
    worst = 0.0
    for _ in range(200):
        # sample x in a box 1.2x the coordinate box (h units), map back
        hx = (rng.random() * 2 - 1) * 1.2 * hu.h_alpha
        hy = (rng.random() * 2 - 1) * 1.2 * hu.h_beta
        # x = h_alpha * sin(b-a) * ... reconstruct: x = u e_a + v e_b with
        # h_alpha = u / sin(beta)*... easier: h_bar relation. Use direct:
        # from definitions h_alpha(x), h_beta(x) linear; solve 2x2 system.
        sa, sb, sg = math.sin(P.alpha), math.sin(P.beta), math.sin(P.beta - P.alpha)
        # h_alpha = (x1 sb - x2 cb)/(sb sg); h_beta = (-x1 sa + x2 ca)/(sa sg)
        cb, ca = math.cos(P.beta), math.cos(P.alpha)
        A = np.array([[sb / (sb * sg), -cb / (sb * sg)],
                      [-sa / (sa * sg), ca / (sa * sg)]])
        x = np.linalg.solve(A, np.array([hx, hy]))
        x = (float(x[0]), float(x[1]))
        got = shift_excess(x, P)
        bb = SkewBox(x, DirPair(0.0, P.beta), P.r0, P.r_beta)
        exact = (geometry.union_area([pa, geometry.skewbox_polygon(bb)]) - base) / hu.c
        worst = max(worst, abs(got - exact))
    check(f"shift_excess grid a={hu.a:.2f} b={hu.b:.2f}", worst < 1e-9, f"worst {worst}")

# example from the build contract: Delta = 0.005
P_ex = None
# spec example: alpha=pi/3, beta=2pi/3, R0=..., construct H0=1, Ha=Hb=2 crit, x with
# h_alpha=0.1,h_beta=0: Delta = h_beta^2 ... actually re-derive: use P_crit and
# x s.t. h_alpha(x)=0.1, h_beta(x)=0 -> case (ii) equal: hbar=0.1
hu = h_units(P_crit)
# solve for x with given h coords
sa, sb, sg = math.sin(P_crit.alpha), math.sin(P_crit.beta), math.sin(P_crit.beta - P_crit.alpha)
cb, ca = math.cos(P_crit.beta), math.cos(P_crit.alpha)
A = np.array([[1 / sg, -cb / (sb * sg)], [-1 / sg, ca / (sa * sg)]])
tgt = np.array([0.1 * hu.h0, 0.0])
x = np.linalg.solve(A, tgt)
d = shift_excess((float(x[0]), float(x[1])), P_crit)
# crit: Ha=Hb=2h0, t = 2h0-Hb = 0, gap=0, hbar=0.1h0>gap, e=0.1h0, |hb|=0<=t=0:
# case b: hb^2 + e^2/2 + (t-sgn*hb)e = 0 + 0.005 h0^2 + 0 = 0.005 h0^2
check("shift_excess crit example", abs(d - 0.005 * hu.h0 ** 2) < 1e-12, f"{d} vs {0.005 * hu.h0**2}")

# 3. free box: excess zero inside, positive outside
for P in (P_far, P_mixed, P_mixed_rev):
    fa, fb = free_box_halflengths(P)
    ea, eb = geometry.direction(P.alpha), geometry.direction(P.beta)
    ok = True
    for _ in range(50):
        s = (rng.random() * 2 - 1)
        t = (rng.random() * 2 - 1)
        x = (s * fa * ea[0] + t * fb * eb[0], s * fa * ea[1] + t * fb * eb[1])
        if shift_excess(x, P) > 1e-12:
            ok = False
        x_out = (1.05 * fa * ea[0] * (1 if fa else 0) + 1.05 * fb * eb[0],
                 1.05 * fa * ea[1] * (1 if fa else 0) + 1.05 * fb * eb[1])
    check(f"free box zero a={h_units(P).a:.2f} b={h_units(P).b:.2f}", ok)

# 4. spread_excess_bounds sandwich vs exact same-direction union
for trial in range(40):
    alpha = rng.random() * 2.0 + 0.2
    beta = alpha + rng.random() * (math.pi - alpha - 0.1) + 0.05
    dirs = DirPair(alpha, beta)
    ra, rb2 = rng.random() + 0.3, rng.random() + 0.3
    n = rng.integers(1, 5)
    ea, eb = geometry.direction(alpha), geometry.direction(beta)
    us = rng.random(n) * 0.4
    vs = rng.random(n) * 0.4
    us[0] = 0.0
    vs[0] = 0.0
    centers = [(float(u * ea[0] + v * eb[0]), float(u * ea[1] + v * eb[1])) for u, v in zip(us, vs)]
    exact = geometry.union_area_same_dirs(dirs, ra, rb2, centers) - 4 * ra * rb2 * math.sin(dirs.gap)
    lo1, lo2, up = spread_excess_bounds(dirs, ra, rb2, us.tolist(), vs.tolist())
    ok = lo1 - 1e-12 <= exact <= up + 1e-12
    # lower2 valid when union connected: all offsets within box size
    if max(us) <= 2 * ra and max(vs) <= 2 * rb2:
        ok = ok and (lo2 - 1e-12 <= exact)
    if not ok:
        check("spread bounds", False, f"{lo1} {lo2} {exact} {up}")
        break
else:
    check("spread bounds sandwich (40 random)", True)

# 5. two_group_excess_bounds sandwich vs exact delta
def rand_config(n, scale, dirs):
    ea, eb = geometry.direction(dirs.alpha), geometry.direction(dirs.beta)
    pts = []
    for _ in range(n - 1):
        u = (rng.random() * 2 - 1) * scale
        v = (rng.random() * 2 - 1) * scale
        pts.append((u * ea[0] + v * eb[0], u * ea[1] + v * eb[1]))
    pts.append((0.0, 0.0))
    return pts

cases = [("i", P_far, 0.05), ("ii", P_mixed, 0.02), ("ii", P_mixed_rev, 0.02), ("iii", P_crit, 0.03)]
for case, P, scale in cases:
    dirs = P.dirs
    worst = None
    ok = True
    for _ in range(25):
        ca_ = rand_config(int(rng.integers(1, 4)), scale, dirs)
        cb_ = rand_config(int(rng.integers(1, 4)), scale, dirs)
        lo, up = two_group_excess_bounds(case, ca_, cb_, P)
        hu = h_units(P)
        exact = _two_group_delta(ca_, cb_, (0.0, 0.0), P, hu)
        if not (lo - 1e-9 <= exact <= up + 1e-9):
            ok = False
            worst = (lo, exact, up)
            break
    check(f"two-group bounds case {case}", ok, str(worst))

# 6. shifted_excess_check holds on valid configs
for case, P, scale in cases:
    dirs = P.dirs
    ok = True
    for _ in range(15):
        ca_ = rand_config(int(rng.integers(1, 4)), scale, dirs)
        cb_ = rand_config(int(rng.integers(1, 4)), scale, dirs)
        ea, eb = geometry.direction(dirs.alpha), geometry.direction(dirs.beta)
        uu = (rng.random() * 2 - 1) * scale
        vv = (rng.random() * 2 - 1) * scale
        u = (uu * ea[0] + vv * eb[0], uu * ea[1] + vv * eb[1])
        if not shifted_excess_check(case, ca_, cb_, u, P):
            ok = False
            break
    check(f"shifted check case {case}", ok)

# hypothesis violations raise
try:
    two_group_excess_bounds("i", [(0.0, 0.0)], [(0.0, 0.0)], P_crit)
    check("case i hypothesis error", False, "no raise")
except formulas.HypothesisError:
    check("case i hypothesis error", True)

# 7. rate exponent spec examples: (a,b)=(3,4), uniform p, H0=1
P34 = mk(3.0, 4.0)
hu34 = h_units(P34)
h0sq = hu34.h0 ** 2
check("rate absent beta", abs(rate_exponent(P34, 2) / h0sq - (12.25 / 3 + 2.0)) < 1e-12,
      f"{rate_exponent(P34, 2)/h0sq}")
check("rate absent alpha", abs(rate_exponent(P34, 1) / h0sq - 6.75) < 1e-12,
      f"{rate_exponent(P34, 1)/h0sq}")
check("rate absent 0", abs(rate_exponent(P34, 0) / h0sq - 10.0) < 1e-12,
      f"{rate_exponent(P34, 0)/h0sq}")
v = classify_regime(P34)
check("classify (3,4)", v.survivors == ((0, 1),) and not v.fixation and v.case_label == "1i",
      str(v))

# a=b<1 case: rate(absent 0) = p0 a + (1-3/4 p0) a^2
Pa = mk(0.8, 0.8, probs=(0.5, 0.25, 0.25))
hua = h_units(Pa)
expect = (0.5 * 0.8 + (1 - 0.375) * 0.64) * hua.h0 ** 2
check("rate a=b<1", abs(rate_exponent(Pa, 0) - expect) < 1e-12,
      f"{rate_exponent(Pa, 0)} vs {expect}")

# classifier spec examples
v5 = classify_regime(mk(1.0, 1.0, probs=(1/3, 1/3, 1/3)))
check("classify 5iii", v5.survivors == ((0, 1), (0, 2), (1, 2)) and v5.fixation
      and v5.case_label == "5iii", str(v5))
v3 = classify_regime(mk(0.5, 0.5, probs=(0.5, 0.25, 0.25)))
check("classify 3ii-fix", v3.survivors == ((1, 2),) and v3.fixation
      and v3.case_label == "3ii-fix", str(v3))
check("l1 value", abs(l1_threshold(0.5, 0.25, 0.25) - 8.0 / 9.0) < 1e-15)
v4 = classify_regime(mk(1.05, 1.05, probs=(0.2, 0.4, 0.4)))
check("classify 4i-fix", v4.survivors == ((1, 2),) and v4.fixation
      and v4.case_label == "4i-fix", str(v4))
check("l2 value", abs(l2_threshold(0.2, 0.4, 0.4) - (0.8 + math.sqrt(1.36)) / 1.8) < 1e-15)

# 8. spread weight / integral
check("gamma example", abs(spread_weight(1, 2, 0, [(1, 2), (0, 0)]) - math.exp(-5)) < 1e-15,
      str(spread_weight(1, 2, 0, [(1, 2), (0, 0)])))
# spec example: c=(1,2,0) u=((1,2),(0,0)): M(u1)=1, M(u2)=2, M(u1+u2)=3 -> 1*1+2*2+0*3=5? e^-5.
# summary said e^-3 for c1=c2=1? recheck below with (1,1,0)
check("gamma example 110", abs(spread_weight(1, 1, 0, [(1, 2), (0, 0)]) - math.exp(-3)) < 1e-15)
check("G^1", spread_integral(3.0, 4.0, 0.5, 1) == (1.0, 0.0))
check("G^2(1,1,0)", spread_integral(1, 1, 0, 2)[0] == 1.0)
check("G^3(2,1,0)", abs(spread_integral(2, 1, 0, 3)[0] - 0.25) < 1e-15)
gmc, se = spread_integral(2, 1, 0, 3, budget=1_000_000, seed=11, force_mc=True)
check("G^3 MC vs closed", abs(gmc - 0.25) < max(4 * se, 0.02 * 0.25), f"{gmc} +- {se}")
gmc2, se2 = spread_integral(1.5, 2.5, 0, 4, budget=2_000_000, seed=3, force_mc=True)
closed4 = (1.5 * 2.5) ** -3
check("G^4 MC vs closed", abs(gmc2 - closed4) < max(4 * se2, 0.02 * closed4),
      f"{gmc2} +- {se2} vs {closed4}")
# determinism
check("G determinism", spread_integral(2, 1, 0.5, 3, budget=50_000, seed=5)
      == spread_integral(2, 1, 0.5, 3, budget=50_000, seed=5))

# 9. two-state prob example
Pts = TwoStateParams(math.pi / 2, 0.5, 0.5, 0.5)
val = two_state_cluster_prob(1, 1, 10.0, Pts)
check("thm21 example", abs(val - 5 * math.exp(-10)) < 1e-18, f"{val} vs {5*math.exp(-10)}")
# algebraic identity vs section-3 form
k, l, lam = 3, 2, 7.3
m = k + l
p, q, B = Pts.p, Pts.q, Pts.contact_area
alt = (lam ** (m - 1) * m * (p ** k * q ** l / (math.factorial(k) * math.factorial(l)))
       * math.exp(-lam * B) * lam ** (-2 * (m - 2)) * B ** (-(m - 3))
       * q ** (-2 * (k - 1)) * p ** (-2 * (l - 1))
       * math.factorial(k) ** 2 * math.factorial(l) ** 2)
check("thm21 identity", abs(two_state_cluster_prob(k, l, lam, Pts) - alt) < 1e-12 * alt,
      f"{two_state_cluster_prob(k, l, lam, Pts)} vs {alt}")

# 10. composition limit
cl = composition_limit(3, 0.5)
check("comp m=3 even", abs(cl.weights[(2, 1)] - 0.5) < 1e-15)
cl6 = composition_limit(3, 0.6)
check("comp m=3 p=.6", abs(cl6.weights[(2, 1)] - 27 / 35) < 1e-15, str(cl6.weights))
cl50 = composition_limit(50, 0.6)
# exact Fraction oracle: w(k,l) = p^(3k) k! q^(3l) l!, normalized over k=1..m-1
check("comp m=50", abs(cl50.weights[(49, 1)] - 0.9878264992114473) < 1e-12,
      repr(cl50.weights[(49, 1)]))

# 11. entropy
check("H(1/2, p=q)", abs(entropy_rate(0.5, 0.5) + math.log(2)) < 1e-15)
check("H(1, .6)", entropy_rate(1.0, 0.6) == 0.0)
check("H(0, .6)", abs(entropy_rate(0.0, 0.6) - 3 * math.log(2 / 3)) < 1e-15)

# 12. three-state prefactor: lambda-slope and rate consistency
def slope_check(P, kvec, expected_power):
    lams = [60.0, 90.0, 135.0]
    hu = h_units(P)
    absent = kvec.index(0)
    phi = vacancy_exponent(P, absent)
    ys = []
    for lam in lams:
        val = three_state_cluster_prob(P, kvec, lam, g_budget=200_000)
        ys.append(math.log(val) + lam * phi)
    xs = [math.log(4 * hu.c * lam) for lam in lams]
    s1 = (ys[1] - ys[0]) / (xs[1] - xs[0])
    s2 = (ys[2] - ys[1]) / (xs[2] - xs[1])
    check(f"slope {kvec} case power {expected_power}",
          abs(s1 + expected_power) < 1e-6 and abs(s2 + expected_power) < 1e-6,
          f"{s1} {s2}")

slope_check(P_far, (0, 2, 1), 0.0)
slope_check(P_far, (0, 2, 2), 1.0)
slope_check(P_mixed, (0, 1, 1), -0.5)
slope_check(P_mixed_rev, (0, 1, 2), 0.5)
slope_check(P_crit, (0, 1, 1), 0.0)
check("power far", cluster_decay_power(P_far, (0, 2, 1)) == 0.0)
check("power mixed", cluster_decay_power(P_mixed, (0, 1, 1)) == -0.5)
check("power crit", cluster_decay_power(P_crit, (0, 2, 1)) == 1.0)
try:
    three_state_cluster_prob(P_inner, (0, 1, 1), 50.0)
    check("inner unsupported", False, "no raise")
except formulas.UnsupportedRegimeError:
    check("inner unsupported", True)
try:
    cluster_decay_power(P_inner, (0, 1, 1))
    check("inner power unsupported", False, "no raise")
except formulas.UnsupportedRegimeError:
    check("inner power unsupported", True)

# relabel invariance: absent orientation role rotates
P_rot = mk(3.0, 4.5, probs=(0.2, 0.5, 0.3))
val_a = three_state_cluster_prob(P_rot, (2, 0, 3), 80.0)
# mirrored model: swap alpha/beta roles; composition (2,3,0) in mirrored
val_b = three_state_cluster_prob(formulas._swap_roles(P_rot), (2, 3, 0), 80.0)
check("prefactor mirror invariance", abs(val_a - val_b) < 1e-9 * abs(val_a),
      f"{val_a} vs {val_b}")

print()
print("FAILURES:", len(fails))
for f in fails:
    print(" ", f)
