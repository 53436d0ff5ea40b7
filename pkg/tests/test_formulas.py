import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from needleperc import formulas
from needleperc.formulas import (
    FormulaError,
    HypothesisError,
    MarkLaw,
    ThreeStateParams,
    TwoStateParams,
    UnsupportedRegimeError,
    classify_regime,
    cluster_decay_power,
    composition_limit,
    contact_pair_union_area,
    entropy_rate,
    free_box_halflengths,
    h_units,
    l1_threshold,
    l2_threshold,
    rate_exponent,
    shift_excess,
    shifted_excess_check,
    spread_excess_bounds,
    spread_integral,
    spread_weight,
    three_state_cluster_prob,
    two_group_excess_bounds,
    two_state_cluster_prob,
    vacancy_exponent,
)
from needleperc.geometry import DirPair, SkewBox, direction, skewbox_polygon, union_area

from conftest import random_three_state, rng_of


def params_with_reach(a: float, b: float, alpha=0.9, beta=2.2, r0=0.6,
                      probs=(0.3, 0.35, 0.35)) -> ThreeStateParams:
    """Half lengths solved so that (h_alpha/h0, h_beta/h0) = (a, b)."""
    sg = math.sin(beta - alpha)
    return ThreeStateParams(
        alpha, beta, r0,
        a * r0 * math.sin(beta) / sg,
        b * r0 * math.sin(alpha) / sg,
        *probs,
    )


def pair_polys(params: ThreeStateParams, shift=(0.0, 0.0)):
    return [
        skewbox_polygon(SkewBox((0.0, 0.0), DirPair(0.0, params.alpha), params.r0, params.r_alpha)),
        skewbox_polygon(SkewBox(shift, DirPair(0.0, params.beta), params.r0, params.r_beta)),
    ]


def exact_two_group_excess(config_a, config_b, params: ThreeStateParams) -> float:
    boxes = [
        skewbox_polygon(SkewBox(xy, DirPair(0.0, params.alpha), params.r0, params.r_alpha))
        for xy in config_a
    ] + [
        skewbox_polygon(SkewBox(xy, DirPair(0.0, params.beta), params.r0, params.r_beta))
        for xy in config_b
    ]
    hu = h_units(params)
    base = contact_pair_union_area(hu.h0, hu.h_alpha, hu.h_beta, hu.c)
    return (union_area(boxes) - base) / hu.c


# ----------------------------------------------------------------------------
# parameter containers


def test_mark_law_validation():
    with pytest.raises(FormulaError):
        MarkLaw((0.0, 0.0), (0.5, 0.5), (0.5, 0.5))  # not increasing
    with pytest.raises(FormulaError):
        MarkLaw((0.0, math.pi), (0.5, 0.5), (0.5, 0.5))  # out of range
    with pytest.raises(FormulaError):
        MarkLaw((0.0, 1.0), (0.5, -0.5), (0.5, 0.5))
    with pytest.raises(FormulaError):
        MarkLaw((0.0, 1.0), (0.5, 0.5), (0.7, 0.7))
    law = MarkLaw.from_entries([(0.0, 0.5, 0.25), (1.0, 1.0, 0.75)])
    assert law.d == 2
    assert law.max_length == 2.0


def test_two_state_roundtrip_and_contact_area():
    params = TwoStateParams(1.1, 0.4, 0.9, 0.3)
    assert params.q == pytest.approx(0.7)
    assert params.contact_area == pytest.approx(4 * 0.4 * 0.9 * math.sin(1.1), rel=1e-15)
    back = TwoStateParams.from_marks(params.to_marks())
    assert back == params


def test_three_state_validation():
    with pytest.raises(FormulaError):
        ThreeStateParams(1.0, 0.5, 1, 1, 1, 0.3, 0.3, 0.4)  # alpha > beta
    with pytest.raises(FormulaError):
        ThreeStateParams(0.5, 1.0, 1, 1, 1, 0.5, 0.5, 0.5)  # probs sum 1.5


def test_h_units_match_their_definition():
    params = random_three_state(rng_of(3))
    hu = h_units(params)
    sg = math.sin(params.beta - params.alpha)
    assert hu.h0 == pytest.approx(params.r0 / sg, rel=1e-12)
    assert hu.h_alpha == pytest.approx(params.r_alpha / math.sin(params.beta), rel=1e-12)
    assert hu.h_beta == pytest.approx(params.r_beta / math.sin(params.alpha), rel=1e-12)
    assert hu.a == pytest.approx(hu.h_alpha / hu.h0, rel=1e-12)
    assert hu.b == pytest.approx(hu.h_beta / hu.h0, rel=1e-12)
    assert hu.c == pytest.approx(
        math.sin(params.alpha) * math.sin(params.beta) * sg, rel=1e-12
    )


# ----------------------------------------------------------------------------
# pair union closed form


def test_pair_union_closed_form_matches_polygon_engine():
    rng = rng_of(21)
    for _ in range(120):
        params = random_three_state(rng)
        hu = h_units(params)
        got = union_area(pair_polys(params))
        want = contact_pair_union_area(hu.h0, hu.h_alpha, hu.h_beta, hu.c)
        assert got == pytest.approx(want, rel=1e-9)


def test_pair_union_branches_agree_on_their_boundary():
    # min(h_alpha, h_beta) = 2 h0 is where the two branches meet
    for hi in (2.0, 2.7, 5.0):
        deep = contact_pair_union_area(1.0, 2.0 + 1e-12, hi, 1.0)
        shallow = contact_pair_union_area(1.0, 2.0 - 1e-12, hi, 1.0)
        assert deep == pytest.approx(shallow, rel=1e-11)


def test_pair_union_rejects_bad_units():
    with pytest.raises(FormulaError):
        contact_pair_union_area(0.0, 1.0, 1.0, 0.5)


# ----------------------------------------------------------------------------
# shifted pair excess


def test_shift_excess_vanishes_on_the_free_box():
    rng = rng_of(22)
    # deep regime: a full box of exact zeros
    deep = params_with_reach(3.0, 4.0)
    half_a, half_b = free_box_halflengths(deep)
    ea, eb = direction(deep.alpha), direction(deep.beta)
    for _ in range(60):
        ca = float(rng.uniform(-1, 1)) * (half_a - 1e-6)
        cb = float(rng.uniform(-1, 1)) * (half_b - 1e-6)
        x = (ca * ea[0] + cb * eb[0], ca * ea[1] + cb * eb[1])
        assert shift_excess(x, deep) == 0.0
    # shallow regime with unequal reach: the zero set degenerates to a
    # segment, where coordinate round-off leaves only quadratic dust
    shallow = params_with_reach(0.8, 1.5)
    half_a, half_b = free_box_halflengths(shallow)
    assert half_a == 0.0 and half_b > 0.0
    eb = direction(shallow.beta)
    for _ in range(60):
        cb = float(rng.uniform(-1, 1)) * (half_b - 1e-6)
        assert shift_excess((cb * eb[0], cb * eb[1]), shallow) <= 1e-12


def test_shift_excess_positive_just_outside_the_free_box():
    params = params_with_reach(3.0, 4.0)
    half_a, half_b = free_box_halflengths(params)
    ea, eb = direction(params.alpha), direction(params.beta)
    for sa, sb in ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)):
        ca = sa * (half_a + 1e-6)
        cb = sb * (half_b + 1e-6)
        x = (ca * ea[0] + cb * eb[0], ca * ea[1] + cb * eb[1])
        assert shift_excess(x, params) > 0.0


def test_shift_excess_matches_direct_union_difference():
    rng = rng_of(23)
    for params in (params_with_reach(2.6, 3.4), params_with_reach(0.7, 1.6),
                   params_with_reach(1.2, 1.2)):
        hu = h_units(params)
        base = contact_pair_union_area(hu.h0, hu.h_alpha, hu.h_beta, hu.c)
        reach = 2.0 * (params.r0 + max(params.r_alpha, params.r_beta))
        for _ in range(60):
            x = (float(rng.uniform(-reach, reach)), float(rng.uniform(-reach, reach)))
            direct = (union_area(pair_polys(params, x)) - base) / hu.c
            assert shift_excess(x, params) == pytest.approx(direct, abs=1e-9)


def test_shift_excess_seam_between_closed_form_and_polygon_fallback():
    # points straddling the coordinate-box edge must agree across the seam
    params = params_with_reach(1.4, 0.9)
    hu = h_units(params)
    ea = direction(params.alpha)
    sb = math.sin(params.beta)
    for eps in (1e-7, -1e-7):
        ca = (hu.h_alpha + eps) * sb  # h_alpha component sits right at its cap
        x = (ca * ea[0], ca * ea[1])
        inner = shift_excess((ca * ea[0] * (1 - 1e-9), ca * ea[1] * (1 - 1e-9)), params)
        assert shift_excess(x, params) == pytest.approx(inner, abs=1e-5)


# ----------------------------------------------------------------------------
# spread sandwich bounds


def test_spread_bounds_sandwich_the_exact_excess():
    rng = rng_of(24)
    for _ in range(150):
        dirs = DirPair(float(rng.uniform(0.1, 1.2)), float(rng.uniform(1.4, 3.0)))
        half_a = float(rng.uniform(0.3, 1.2))
        half_b = float(rng.uniform(0.3, 1.2))
        k = int(rng.integers(2, 7))
        comps_a = [0.0] + [float(rng.uniform(-0.95 * half_a, 0.95 * half_a)) for _ in range(k - 1)]
        comps_b = [0.0] + [float(rng.uniform(-0.95 * half_b, 0.95 * half_b)) for _ in range(k - 1)]
        lower1, lower2, upper = spread_excess_bounds(dirs, half_a, half_b, comps_a, comps_b)
        ea, eb = direction(dirs.alpha), direction(dirs.beta)
        centers = [(a * ea[0] + b * eb[0], a * ea[1] + b * eb[1]) for a, b in zip(comps_a, comps_b)]
        from needleperc.geometry import union_area_same_dirs

        exact = union_area_same_dirs(dirs, half_a, half_b, centers)
        exact -= 4.0 * half_a * half_b * math.sin(dirs.gap)
        assert lower1 <= exact + 1e-9
        assert lower2 <= exact + 1e-9  # boxes all overlap, union is connected
        assert exact <= upper + 1e-9


def test_spread_bounds_collapse_for_identical_centers():
    dirs = DirPair(0.4, 1.9)
    lower1, lower2, upper = spread_excess_bounds(dirs, 0.5, 0.7, [0.0, 0.0], [0.0, 0.0])
    assert lower1 == lower2 == upper == 0.0


def test_spread_bounds_need_matching_lengths():
    with pytest.raises(FormulaError):
        spread_excess_bounds(DirPair(0.4, 1.9), 0.5, 0.7, [0.0], [0.0, 1.0])


def shrunken_two_group_config(case, params, rng, tries=14):
    """Random pinned two-group config rescaled until the case hypotheses hold."""
    k_a = int(rng.integers(1, 4))
    k_b = int(rng.integers(1, 4))
    raw_a = [(float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1))) for _ in range(k_a)]
    raw_b = [(float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1))) for _ in range(k_b)]
    scale = 0.5 * params.r0
    for _ in range(tries):
        config_a = [(scale * x, scale * y) for x, y in raw_a] + [(0.0, 0.0)]
        config_b = [(scale * x, scale * y) for x, y in raw_b] + [(0.0, 0.0)]
        try:
            lo, hi = two_group_excess_bounds(case, config_a, config_b, params)
        except HypothesisError:
            scale *= 0.5
            continue
        return config_a, config_b, lo, hi
    raise AssertionError(f"no admissible config found for case {case}")


TWO_GROUP_CASES = (
    ("i", params_with_reach(2.8, 3.5)),
    ("ii", params_with_reach(1.6, 0.8)),
    ("iii", params_with_reach(0.9, 0.9)),
)


@pytest.mark.parametrize("case,params", TWO_GROUP_CASES, ids=["i", "ii", "iii"])
def test_two_group_bounds_sandwich_the_exact_excess(case, params):
    rng = rng_of(25)
    for _ in range(60):
        config_a, config_b, lo, hi = shrunken_two_group_config(case, params, rng)
        exact = exact_two_group_excess(config_a, config_b, params)
        assert lo <= exact + 1e-9
        assert exact <= hi + 1e-9


def test_two_group_bounds_enforce_their_hypotheses():
    params = params_with_reach(2.8, 3.5)
    huge = [(10.0, 10.0), (0.0, 0.0)]
    with pytest.raises(HypothesisError):
        two_group_excess_bounds("i", huge, [(0.0, 0.0)], params)
    with pytest.raises(FormulaError):
        two_group_excess_bounds("iv", [(0.0, 0.0)], [(0.0, 0.0)], params)
    # case i demands deep reach on both sides
    with pytest.raises(HypothesisError):
        two_group_excess_bounds("i", [(0.0, 0.0)], [(0.0, 0.0)], params_with_reach(0.9, 0.9))


@pytest.mark.parametrize("case,params", TWO_GROUP_CASES, ids=["i", "ii", "iii"])
def test_shift_stability_of_the_two_group_excess(case, params):
    rng = rng_of(26)
    checked = 0
    for _ in range(40):
        config_a, config_b, _, _ = shrunken_two_group_config(case, params, rng)
        u = (float(rng.uniform(-0.02, 0.02)), float(rng.uniform(-0.02, 0.02)))
        try:
            ok = shifted_excess_check(case, config_a, config_b, u, params)
        except HypothesisError:
            continue
        assert ok
        checked += 1
    assert checked >= 20


# ----------------------------------------------------------------------------
# rates and thresholds


def test_rate_exponent_matches_its_piecewise_definition():
    rng = rng_of(27)
    for _ in range(200):
        params = random_three_state(rng)
        hu = h_units(params)
        hs = (hu.h0, hu.h_alpha, hu.h_beta)
        for absent in range(3):
            hx = hs[absent]
            hy, hz = (hs[i] for i in range(3) if i != absent)
            px = params.probs[absent]
            if min(hy, hz) > 2.0 * hx:
                u = hx * (hy + hz - hx)
            else:
                u = hx * max(hy, hz) + min(hy, hz) ** 2 / 4.0
            want = px * u + (1.0 - px) * hy * hz
            assert rate_exponent(params, absent) == pytest.approx(want, rel=1e-12)
            assert vacancy_exponent(params, absent) == pytest.approx(
                4.0 * hu.c * want, rel=1e-12
            )


def test_threshold_values():
    assert l1_threshold(0.5, 0.25, 0.25) == pytest.approx(8.0 / 9.0, rel=1e-13)
    assert l2_threshold(0.2, 0.4, 0.4) == pytest.approx(1.0923279883161445, rel=1e-13)


@given(
    p0=st.floats(0.01, 0.98),
    split=st.floats(0.01, 0.99),
)
def test_l1_exceeds_one_exactly_when_p0_is_smallest(p0, split):
    pa = split * (1.0 - p0)
    pb = (1.0 - split) * (1.0 - p0)
    l1 = l1_threshold(p0, pa, pb)
    if p0 < min(pa, pb) - 1e-12:
        assert l1 > 1.0
    elif p0 > min(pa, pb) + 1e-12:
        assert l1 < 1.0


# ----------------------------------------------------------------------------
# regime classifier


def test_classifier_case_labels_on_constructed_points():
    p0_small = (0.1, 0.45, 0.45)  # region 3 collapses to 3i, region 4 splits at l2
    p0_large = (0.5, 0.25, 0.25)  # region 3 splits at l1, region 4 collapses to 4ii
    assert classify_regime(params_with_reach(3.0, 4.0)).case_label == "1i"
    assert classify_regime(params_with_reach(1.3, 0.8)).case_label == "2i"
    assert classify_regime(params_with_reach(0.8, 0.8, probs=p0_small)).case_label == "3i"
    l1 = l1_threshold(*p0_large)
    assert classify_regime(
        params_with_reach(l1 - 0.05, l1 - 0.05, probs=p0_large)
    ).case_label == "3ii-fix"
    assert classify_regime(
        params_with_reach(l1 + 0.05, l1 + 0.05, probs=p0_large)
    ).case_label == "3ii-nofix"
    assert classify_regime(params_with_reach(1.5, 1.5, probs=p0_large)).case_label == "4ii"
    l2 = l2_threshold(*p0_small)
    assert classify_regime(
        params_with_reach(l2 - 0.05, l2 - 0.05, probs=p0_small)
    ).case_label == "4i-fix"
    assert classify_regime(
        params_with_reach(l2 + 0.05, l2 + 0.05, probs=p0_small)
    ).case_label == "4i-nofix"
    assert classify_regime(params_with_reach(1.0, 1.0)).case_label.startswith("5")


def test_fully_symmetric_model_ties_all_three_rates():
    params = ThreeStateParams(
        math.pi / 3, 2 * math.pi / 3, 0.5, 0.5, 0.5, 1 / 3, 1 / 3, 1 / 3
    )
    verdict = classify_regime(params)
    assert len(verdict.survivors) == 3
    assert verdict.case_label == "5iii"
    assert verdict.rates[0] == pytest.approx(verdict.rates[1], rel=1e-12)
    assert verdict.rates[1] == pytest.approx(verdict.rates[2], rel=1e-12)


def test_classifier_is_scale_invariant():
    rng = rng_of(28)
    for _ in range(150):
        params = random_three_state(rng)
        c = float(rng.uniform(0.25, 4.0))
        scaled = ThreeStateParams(
            params.alpha, params.beta, c * params.r0, c * params.r_alpha,
            c * params.r_beta, params.p0, params.p_alpha, params.p_beta,
        )
        a, b = classify_regime(params), classify_regime(scaled)
        assert a.case_label == b.case_label
        assert a.survivors == b.survivors
        assert a.fixation == b.fixation


def test_classifier_commutes_with_mirror_relabeling():
    """reflecting x -> -x swaps the alpha and beta roles exactly"""
    rng = rng_of(29)
    swap = {0: 0, 1: 2, 2: 1}
    for _ in range(150):
        p = random_three_state(rng)
        mirrored = ThreeStateParams(
            math.pi - p.beta, math.pi - p.alpha, p.r0, p.r_beta, p.r_alpha,
            p.p0, p.p_beta, p.p_alpha,
        )
        a, b = classify_regime(p), classify_regime(mirrored)
        assert b.fixation == a.fixation
        mapped = tuple(sorted(tuple(sorted(swap[i] for i in pair)) for pair in a.survivors))
        assert tuple(sorted(b.survivors)) == mapped
        assert b.rates[0] == pytest.approx(a.rates[0], rel=1e-12)
        assert b.rates[1] == pytest.approx(a.rates[2], rel=1e-12)
        assert b.rates[2] == pytest.approx(a.rates[1], rel=1e-12)


# ----------------------------------------------------------------------------
# spread integrals


def test_first_spread_integral_is_one_exactly():
    assert spread_integral(1.3, 0.7, 0.0, 1) == (1.0, 0.0)
    assert spread_integral(1.3, 0.7, 2.0, 1) == (1.0, 0.0)


def test_factorized_spread_integral_closed_form():
    for k in (2, 3, 5):
        value, err = spread_integral(1.7, 2.4, 0.0, k)
        assert err == 0.0
        assert value == pytest.approx((1.7 * 2.4) ** (1 - k), rel=1e-13)


def test_monte_carlo_route_agrees_with_the_closed_form():
    for k in (2, 3):
        value, err = spread_integral(1.5, 2.0, 0.0, k, budget=150_000, seed=4, force_mc=True)
        want = (1.5 * 2.0) ** (1 - k)
        assert err > 0.0
        assert abs(value - want) <= 3.5 * err


def test_spread_integral_validation():
    with pytest.raises(FormulaError):
        spread_integral(0.0, 1.0, 0.0, 2)
    with pytest.raises(FormulaError):
        spread_integral(1.0, 1.0, -0.1, 2)
    with pytest.raises(FormulaError):
        spread_integral(1.0, 1.0, 1.0, 0)
    with pytest.raises(FormulaError):
        spread_integral(1.0, 1.0, 1.0, 2, budget=10)


def test_spread_weight_known_values():
    assert spread_weight(1.0, 1.0, 1.0, [(0.0, 0.0)]) == pytest.approx(1.0)
    # one free point at (1, -2) with the pinned origin: spreads are 1, 2, 1
    got = spread_weight(0.5, 0.25, 2.0, [(1.0, -2.0), (0.0, 0.0)])
    assert got == pytest.approx(math.exp(-(0.5 * 1 + 0.25 * 2 + 2.0 * 1)), rel=1e-12)
    with pytest.raises(FormulaError):
        spread_weight(1.0, 1.0, 1.0, [(1.0, 1.0)])  # not pinned


# ----------------------------------------------------------------------------
# cluster probability asymptotics


def test_two_state_pair_value_is_m_exp():
    # k = l = 1 on the unit contact box: the constant is exactly m e^{-lam}
    params = TwoStateParams(math.pi / 2, 0.5, 0.5, 0.5)
    assert params.contact_area == pytest.approx(1.0, rel=1e-15)
    got = two_state_cluster_prob(1, 1, 10.0, params)
    assert got == pytest.approx(2.0 * (0.5 ** -4) * (0.5 ** 6) * 10.0 * math.exp(-10.0), rel=1e-12)
    assert got == pytest.approx(5.0 * math.exp(-10.0), rel=1e-12)


def test_two_state_prob_needs_both_orientations():
    params = TwoStateParams(math.pi / 2, 0.5, 0.5, 0.5)
    with pytest.raises(FormulaError):
        two_state_cluster_prob(0, 2, 10.0, params)
    with pytest.raises(FormulaError):
        two_state_cluster_prob(1, 1, 0.0, params)


@given(m=st.integers(2, 40), p=st.floats(0.05, 0.95))
def test_composition_limit_is_a_distribution(m, p):
    law = composition_limit(m, p)
    assert sum(law.weights.values()) == pytest.approx(1.0, abs=1e-12)
    assert set(law.weights) == {(k, m - k) for k in range(1, m)}
    assert all(w >= 0.0 for w in law.weights.values())


def test_composition_limit_symmetry_at_equal_probabilities():
    law = composition_limit(7, 0.5)
    for k in range(1, 7):
        assert law.weights[(k, 7 - k)] == pytest.approx(law.weights[(7 - k, k)], rel=1e-12)


def test_composition_limit_frozen_values():
    assert composition_limit(3, 0.6).weights[(2, 1)] == pytest.approx(27.0 / 35.0, rel=1e-12)
    # exact rational evaluation of the m = 50 majority share at p = 0.6
    assert composition_limit(50, 0.6).weights[(49, 1)] == pytest.approx(
        0.9878264992114473, rel=1e-12
    )


def test_entropy_rate_values_and_errors():
    assert entropy_rate(0.5, 0.5) == pytest.approx(-math.log(2.0), rel=1e-12)
    assert entropy_rate(0.0, 0.5) == 0.0
    assert entropy_rate(1.0, 0.5) == 0.0
    s, p = 0.3, 0.7
    want = 0.3 * math.log(0.3) + 0.7 * math.log(0.7) + 3 * 0.7 * math.log(0.3 / 0.7)
    assert entropy_rate(s, p) == pytest.approx(want, rel=1e-12)
    with pytest.raises(FormulaError):
        entropy_rate(1.5, 0.5)
    with pytest.raises(FormulaError):
        entropy_rate(0.5, 1.0)


def test_decay_power_cases():
    deep = params_with_reach(3.0, 4.0)
    assert cluster_decay_power(deep, (0, 2, 1)) == pytest.approx(0.0)  # 3 - 3
    skew = params_with_reach(1.5, 0.9)
    assert cluster_decay_power(skew, (0, 2, 2)) == pytest.approx(1.5)  # 4 - 5/2
    edge = params_with_reach(2.0, 2.0)
    assert cluster_decay_power(edge, (0, 1, 2)) == pytest.approx(1.0)  # 3 - 2
    with pytest.raises(UnsupportedRegimeError):
        cluster_decay_power(params_with_reach(1.2, 1.2), (0, 1, 1))
    with pytest.raises(FormulaError):
        cluster_decay_power(deep, (1, 1, 1))


def test_three_state_prob_scaling_ties_rate_and_power_together():
    params = params_with_reach(3.0, 4.0)
    kvec = (0, 2, 1)
    phi = vacancy_exponent(params, 0)
    power = cluster_decay_power(params, kvec)
    lam1, lam2 = 30.0, 60.0
    v1 = three_state_cluster_prob(params, kvec, lam1)
    v2 = three_state_cluster_prob(params, kvec, lam2)
    want = -phi * (lam2 - lam1) - power * math.log(lam2 / lam1)
    assert math.log(v2 / v1) == pytest.approx(want, rel=1e-9)


def test_three_state_prob_validation():
    params = params_with_reach(3.0, 4.0)
    with pytest.raises(FormulaError):
        three_state_cluster_prob(params, (1, 1, 1), 10.0)
    with pytest.raises(FormulaError):
        three_state_cluster_prob(params, (0, 2, 1), -1.0)
    with pytest.raises(UnsupportedRegimeError):
        three_state_cluster_prob(params_with_reach(1.2, 1.2), (0, 1, 1), 10.0)
    degenerate = ThreeStateParams(0.9, 2.2, 0.6, 0.6, 0.6, 0.0, 0.5, 0.5)
    with pytest.raises(FormulaError):
        three_state_cluster_prob(degenerate, (0, 1, 1), 10.0)
