import math

import numpy as np
import pytest
from scipy.stats import chi2

from needleperc.estimation import (
    BunchSample,
    CompositionQuery,
    EstimationError,
    IntegralEstimate,
    bunch_offset_sample,
    cluster_probability,
    conditional_composition,
    convergence_study,
    cross_validate,
    integrate_F,
    uniformity_chisquare,
)
from needleperc.formulas import MarkLaw
from needleperc.process import SimConfig, SimWindow

CROSS = MarkLaw((0.0, math.pi / 2), (0.5, 0.5), (0.5, 0.5))


# ----------------------------------------------------------------------------
# query and estimate containers


def test_query_validation():
    q = CompositionQuery((1, 2), 3.0, CROSS)
    assert q.m == 3
    with pytest.raises(EstimationError):
        CompositionQuery((1, 2, 0), 3.0, CROSS)
    with pytest.raises(EstimationError):
        CompositionQuery((1, -1), 3.0, CROSS)
    with pytest.raises(EstimationError):
        CompositionQuery((0, 0), 3.0, CROSS)
    with pytest.raises(EstimationError):
        CompositionQuery((1, 1), 0.0, CROSS)


def test_estimate_container_rejects_negatives():
    with pytest.raises(EstimationError):
        IntegralEstimate(-1.0, 0.0, 10, "x")
    with pytest.raises(EstimationError):
        IntegralEstimate(1.0, -1.0, 10, "x")


# ----------------------------------------------------------------------------
# the connectivity integral


def test_single_needle_value_is_closed_form():
    est = integrate_F(CompositionQuery((1, 0), 2.0, CROSS), 1000, 0)
    # the lone needle sees a unit contact box against the other orientation,
    # weighted by that orientation's probability
    assert est.value == pytest.approx(math.exp(-2.0 * 0.5))
    assert est.stderr == 0.0
    assert est.proposal == "exact:m=1"


def test_parallel_compositions_carry_no_mass():
    est = integrate_F(CompositionQuery((2, 0), 2.0, CROSS), 1000, 0)
    assert (est.value, est.stderr) == (0.0, 0.0)
    assert est.proposal == "exact:parallel"


def test_pair_integral_matches_the_constant_weight_value():
    # for the symmetric cross the vacancy weight is exp(-lam) on the whole
    # contact box, so F(1, 1) = |B| e^-lam exactly
    lam = 1.5
    est = integrate_F(CompositionQuery((1, 1), lam, CROSS), 200_000, 3)
    want = math.exp(-lam)
    assert est.stderr > 0.0
    assert abs(est.value - want) <= 4.0 * est.stderr
    assert est.stderr < 0.05 * want


def test_integrator_is_deterministic_and_stream_separated():
    q = CompositionQuery((1, 2), 2.0, CROSS)
    a = integrate_F(q, 5000, 9)
    assert integrate_F(q, 5000, 9) == a
    assert integrate_F(q, 5000, 9, stream=1).value != a.value
    assert integrate_F(q, 5000, 10).value != a.value


def test_stderr_shrinks_with_budget():
    q = CompositionQuery((1, 1), 1.0, CROSS)
    small = integrate_F(q, 20_000, 4)
    big = integrate_F(q, 180_000, 4)
    assert small.stderr / big.stderr == pytest.approx(3.0, rel=0.4)


def test_integrator_input_checks():
    q = CompositionQuery((1, 1), 1.0, CROSS)
    with pytest.raises(EstimationError):
        integrate_F(q, 999, 0)
    with pytest.raises(EstimationError):
        integrate_F(CompositionQuery((4, 3), 1.0, CROSS), 10_000, 0)
    with pytest.raises(EstimationError):
        integrate_F(q, 10_000, 0, box_half=0.0)


def test_wider_proposal_boxes_agree():
    q = CompositionQuery((1, 1), 2.0, CROSS)
    a = integrate_F(q, 150_000, 5)
    b = integrate_F(q, 400_000, 6, box_half=3.0)
    assert abs(a.value - b.value) <= 4.0 * math.hypot(a.stderr, b.stderr)


# ----------------------------------------------------------------------------
# cluster probabilities and the conditional shell


def test_cluster_probability_applies_the_prefactor():
    lam = 2.0
    est = integrate_F(CompositionQuery((1, 1), lam, CROSS), 50_000, 7)
    val, err = cluster_probability(CompositionQuery((1, 1), lam, CROSS), 50_000, 7)
    # lam^(m-1) * m * p^1 q^1 / 1! 1! = 2 lam / 4
    scale = lam * 2.0 * 0.25
    assert val == pytest.approx(scale * est.value)
    assert err == pytest.approx(scale * est.stderr)


def test_structurally_impossible_compositions_cost_nothing():
    marks = MarkLaw((0.0, math.pi / 2), (0.5, 0.5), (1.0, 0.0))
    val, err = cluster_probability(CompositionQuery((1, 1), 1.0, marks), 10**9, 0)
    assert (val, err) == (0.0, 0.0)


def test_conditional_shell_is_normalized_and_symmetric():
    out = conditional_composition(1.0, 3, CROSS, 80_000, 13)
    assert set(out) == {(0, 3), (1, 2), (2, 1), (3, 0)}
    assert out[(0, 3)] == (0.0, 0.0)
    assert out[(3, 0)] == (0.0, 0.0)
    p12, s12 = out[(1, 2)]
    p21, s21 = out[(2, 1)]
    assert p12 + p21 == pytest.approx(1.0)
    assert abs(p12 - p21) <= 4.0 * math.hypot(s12, s21)


def test_conditional_shell_input_checks():
    with pytest.raises(EstimationError):
        conditional_composition(1.0, 0, CROSS, 10_000, 0)
    with pytest.raises(EstimationError):
        conditional_composition(1.0, 6, CROSS, 10_000, 0)
    with pytest.raises(EstimationError):
        conditional_composition(0.0, 2, CROSS, 10_000, 0)
    with pytest.raises(EstimationError):
        conditional_composition(1.0, 2, CROSS, 10, 0)


def test_degenerate_shells_are_reported():
    lopsided = MarkLaw((0.0, math.pi / 2), (0.5, 0.5), (1.0, 0.0))
    with pytest.raises(EstimationError):
        conditional_composition(1.0, 2, lopsided, 10_000, 0)


# ----------------------------------------------------------------------------
# asymptotics comparison


def test_convergence_study_tracks_the_closed_form():
    study = convergence_study(
        [5.0, 10.0, 20.0, 40.0],
        [CompositionQuery((1, 1), 1.0, CROSS)],
        200_000,
        17,
    )
    assert len(study.rows) == 4
    assert [r.lam for r in study.rows] == [5.0, 10.0, 20.0, 40.0]
    for row in study.rows:
        assert row.composition == (1, 1)
        assert math.isfinite(row.asymptotic)
        assert abs(row.ratio - 1.0) <= 0.1 + 4.0 * row.stderr / row.asymptotic
    # contact box area 1: the rescaled fit recovers the 1/lam prefactor power
    assert study.phis[(1, 1)] == pytest.approx(1.0)
    assert study.fitted_powers[(1, 1)] == pytest.approx(1.0, abs=0.2)


def test_convergence_study_grid_checks():
    q = CompositionQuery((1, 1), 1.0, CROSS)
    with pytest.raises(EstimationError):
        convergence_study([], [q], 10_000, 0)
    with pytest.raises(EstimationError):
        convergence_study([2.0, 2.0], [q], 10_000, 0)
    with pytest.raises(EstimationError):
        convergence_study([4.0, 3.0], [q], 10_000, 0)


# ----------------------------------------------------------------------------
# simulator vs integrator


def sim_config(trial_seed: int) -> SimConfig:
    return SimConfig(1.0, SimWindow(6.0, 6.0), CROSS, trial_seed, palm=True)


def test_cross_validation_flags_starved_runs():
    out = cross_validate(sim_config(101), 3, 40, 20_000, 5)
    assert out.inconclusive
    assert out.events < 100


def test_cross_validation_agrees_on_the_symmetric_pair():
    out = cross_validate(sim_config(102), 3, 5000, 60_000, 6)
    assert not out.inconclusive
    assert out.m == 3 and out.lam == 1.0
    by_comp = {row.composition: row for row in out.rows}
    assert set(by_comp) == {(0, 3), (1, 2), (2, 1), (3, 0)}
    for kvec in ((0, 3), (3, 0)):
        row = by_comp[kvec]
        assert (row.sim_prob, row.mc_prob, row.z) == (0.0, 0.0, 0.0)
    for kvec in ((1, 2), (2, 1)):
        row = by_comp[kvec]
        assert row.sim_prob > 0.0 and row.mc_prob > 0.0
        assert abs(row.z) < 4.0
    assert by_comp[(1, 2)].sim_prob + by_comp[(2, 1)].sim_prob == pytest.approx(1.0)


# ----------------------------------------------------------------------------
# the exact bunch sampler


def test_single_bunch_needle_offsets_are_uniform():
    out = bunch_offset_sample(4.0, CROSS, 2, 2000, 31)
    assert isinstance(out, BunchSample)
    assert out.offsets.shape == (2000, 2)
    assert np.all(np.abs(out.offsets) <= 1.0)
    assert np.all(out.hull_areas == 0.0)
    assert out.proposed >= out.draws
    res = uniformity_chisquare(out.offsets, bins=4)
    assert res.statistic < chi2.ppf(0.999, res.df)


def test_bunch_sampler_is_deterministic():
    a = bunch_offset_sample(2.0, CROSS, 4, 500, 7)
    b = bunch_offset_sample(2.0, CROSS, 4, 500, 7)
    assert np.array_equal(a.offsets, b.offsets)
    assert np.array_equal(a.hull_areas, b.hull_areas)


def test_bunches_compress_as_the_intensity_grows():
    low = bunch_offset_sample(2.0, CROSS, 4, 3000, 8)
    high = bunch_offset_sample(16.0, CROSS, 4, 3000, 8)
    assert float(low.hull_areas.mean()) > 1.5 * float(high.hull_areas.mean())


def test_bunch_sampler_input_checks():
    three = MarkLaw((0.0, 0.9, 2.0), (0.5, 0.5, 0.5), (0.4, 0.3, 0.3))
    with pytest.raises(EstimationError):
        bunch_offset_sample(2.0, three, 3, 100, 0)
    with pytest.raises(EstimationError):
        bunch_offset_sample(2.0, CROSS, 1, 100, 0)
    with pytest.raises(EstimationError):
        bunch_offset_sample(2.0, CROSS, 10, 100, 0)
    with pytest.raises(EstimationError):
        bunch_offset_sample(2.0, CROSS, 3, 0, 0)
    with pytest.raises(EstimationError):
        bunch_offset_sample(0.0, CROSS, 3, 100, 0)
    with pytest.raises(EstimationError):
        bunch_offset_sample(2.0, CROSS, 3, 100, 0, hub=2)


# ----------------------------------------------------------------------------
# the chi-square helper


def test_chisquare_counts_and_df():
    rng = np.random.Generator(np.random.Philox(key=[3, 0]))
    pts = rng.uniform(-1.0, 1.0, size=(400, 2))
    res = uniformity_chisquare(pts, bins=4)
    assert res.df == 15
    assert res.counts.sum() == 400
    assert res.statistic < chi2.ppf(0.999, 15)


def test_chisquare_rejects_clumped_points():
    pts = np.full((200, 2), 0.9)
    res = uniformity_chisquare(pts)
    assert res.statistic > chi2.ppf(0.999, res.df)


def test_chisquare_input_checks():
    with pytest.raises(EstimationError):
        uniformity_chisquare(np.zeros((10, 2)), bins=4)
    with pytest.raises(EstimationError):
        uniformity_chisquare(np.zeros((100, 3)), bins=4)
