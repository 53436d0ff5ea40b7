import math

import numpy as np
import pytest

from needleperc.formulas import MarkLaw
from needleperc.geometry import Needle, needles_intersect
from needleperc.process import (
    ClusterReport,
    MissingOriginError,
    NeedleOverflowError,
    ProcessError,
    SimConfig,
    SimWindow,
    build_clusters,
    composition_histogram,
    compression_stats,
    default_window,
    origin_cluster,
    palm_sample,
    read_needles,
    sample_ppp,
    write_needles,
)

from conftest import rng_of


def cross_config(lam=1.0, half=6.0, seed=11, palm=False) -> SimConfig:
    marks = MarkLaw((0.0, math.pi / 2), (0.5, 0.5), (0.5, 0.5))
    return SimConfig(lam, SimWindow(half, half), marks, seed, palm=palm)


# ----------------------------------------------------------------------------
# sampling


def test_sampling_is_deterministic_in_the_seed():
    cfg = cross_config(seed=5)
    assert sample_ppp(cfg) == sample_ppp(cfg)
    assert sample_ppp(cross_config(seed=6)) != sample_ppp(cross_config(seed=7))


def test_sample_count_tracks_the_intensity():
    total = 0
    trials = 300
    for seed in range(trials):
        total += len(sample_ppp(cross_config(lam=2.0, half=3.0, seed=seed)))
    expect = 2.0 * 36.0
    sigma = math.sqrt(expect / trials)
    assert abs(total / trials - expect) <= 4.0 * sigma


def test_needles_stay_inside_the_window():
    for n in sample_ppp(cross_config(seed=3)):
        assert abs(n.center[0]) <= 6.0 and abs(n.center[1]) <= 6.0


def test_palm_sample_needs_the_flag_and_pins_the_origin():
    with pytest.raises(ProcessError):
        palm_sample(cross_config(palm=False))
    needles = palm_sample(cross_config(palm=True))
    assert needles[0].center == (0.0, 0.0)
    assert all(abs(n.center[0]) <= 6.0 and abs(n.center[1]) <= 6.0 for n in needles[1:])
    assert palm_sample(cross_config(palm=True)) == needles


def test_overflow_guard_trips():
    marks = MarkLaw((0.0, math.pi / 2), (0.5, 0.5), (0.5, 0.5))
    cfg = SimConfig(50.0, SimWindow(20.0, 20.0), marks, 1, max_needles=100)
    with pytest.raises(NeedleOverflowError):
        sample_ppp(cfg)


# ----------------------------------------------------------------------------
# clustering


def brute_force_labels(needles):
    n = len(needles)
    adj = [[i == j or needles_intersect(needles[i], needles[j]) for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            if adj[i][k]:
                for j in range(n):
                    adj[i][j] = adj[i][j] or (adj[k][j] and True)
    labels = [-1] * n
    nxt = 0
    for i in range(n):
        if labels[i] < 0:
            for j in range(n):
                if adj[i][j]:
                    labels[j] = nxt
            nxt += 1
    return labels


def test_cluster_labels_match_brute_force_closure():
    for seed in range(6):
        needles = sample_ppp(cross_config(lam=0.8, half=3.0, seed=seed))
        if not needles:
            continue
        got = build_clusters(needles)
        want = brute_force_labels(needles)
        n = len(needles)
        for i in range(n):
            for j in range(n):
                assert (got[i] == got[j]) == (want[i] == want[j])


def test_origin_cluster_report_is_consistent():
    cfg = cross_config(lam=1.2, half=5.0, seed=21, palm=True)
    needles = palm_sample(cfg)
    report = origin_cluster(needles, cfg.window)
    assert sum(report.composition.values()) == len(report.needles)
    for member in report.needles:
        assert member in needles
    if not report.censored:
        assert set(report.per_orientation_hull_area) == set(report.composition)
        if len(report.composition) >= 2:
            assert set(report.spreads) == set(report.composition)
        else:
            assert report.spreads == {}


def test_origin_cluster_members_actually_touch_the_cluster():
    cfg = cross_config(lam=1.5, half=4.0, seed=33, palm=True)
    needles = palm_sample(cfg)
    report = origin_cluster(needles, cfg.window)
    members = set(report.needles)
    outside = [n for n in needles if n not in members]
    for n in outside:
        assert not any(needles_intersect(n, m) for m in members)


def test_origin_cluster_censoring_in_a_tight_window():
    needles = [Needle((0.0, 0.0), 0.0, 0.5)]
    report = origin_cluster(needles, SimWindow(0.3, 0.3))
    assert report.censored
    assert report.per_orientation_hull_area == {}
    assert report.spreads == {}
    report = origin_cluster(needles, SimWindow(2.0, 2.0))
    assert not report.censored


def test_origin_cluster_requires_an_origin_needle():
    with pytest.raises(MissingOriginError):
        origin_cluster([Needle((1.0, 1.0), 0.0, 0.5)], SimWindow(5.0, 5.0))


def test_cluster_report_rejects_inconsistent_counts():
    with pytest.raises(ProcessError):
        ClusterReport({0.0: 2}, (Needle((0.0, 0.0), 0.0, 0.5),), False, {}, {})


# ----------------------------------------------------------------------------
# histograms


def test_histogram_is_thread_invariant():
    cfg = cross_config(lam=1.0, half=6.0, seed=40, palm=True)
    a = composition_histogram(cfg, 500, total_size=2, threads=1)
    b = composition_histogram(cfg, 500, total_size=2, threads=3)
    assert a == b


def test_histogram_shares_are_symmetric_for_symmetric_marks():
    cfg = cross_config(lam=1.0, half=8.0, seed=41, palm=True)
    hist = composition_histogram(cfg, 4000, total_size=3)
    p12, s12 = hist.estimates[(1, 2)]
    p21, s21 = hist.estimates[(2, 1)]
    assert abs(p12 - p21) <= 3.0 * math.hypot(s12, s21)
    assert p12 + p21 == pytest.approx(1.0)


def test_size_conditioning_only_filters_the_counts():
    """capped and uncapped runs must agree exactly on the shared keys"""
    cfg = cross_config(lam=1.0, half=6.0, seed=42, palm=True)
    free = composition_histogram(cfg, 1500)
    conditioned = composition_histogram(cfg, 1500, total_size=3)
    assert conditioned.counts == {
        key: c for key, c in free.counts.items() if sum(key) == 3
    }
    assert conditioned.conditioning_trials == sum(conditioned.counts.values())


def test_histogram_keys_respect_the_conditioning():
    cfg = cross_config(lam=1.0, half=6.0, seed=43, palm=True)
    hist = composition_histogram(cfg, 800, total_size=2)
    assert all(sum(key) == 2 for key in hist.counts)
    assert hist.total_size == 2
    with pytest.raises(ProcessError):
        composition_histogram(cfg, 0)


# ----------------------------------------------------------------------------
# hub-and-bunch statistics


def test_compression_summary_shapes():
    cfg = cross_config(lam=1.5, half=6.0, seed=44, palm=True)
    out = compression_stats(cfg, 2500, target_size=3)
    assert out.n_target > 50
    assert out.bunch_hull_areas.shape == (out.n_target,)
    assert out.offsets.shape == (out.n_target, 2)
    assert np.all(np.abs(out.offsets) <= 1.0 + 1e-12)
    assert np.all(out.bunch_hull_areas >= 0.0)
    assert out.mean_bunch_hull_area == pytest.approx(float(out.bunch_hull_areas.mean()))
    assert out.target_size == 3
    assert out.lam == 1.5


def test_two_needle_clusters_have_pointlike_bunches():
    cfg = cross_config(lam=1.0, half=6.0, seed=45, palm=True)
    out = compression_stats(cfg, 1200, target_size=2)
    assert out.n_target > 0
    assert np.all(out.bunch_hull_areas == 0.0)


def test_compression_rejects_bad_targets():
    cfg = cross_config(palm=True)
    with pytest.raises(ProcessError):
        compression_stats(cfg, 100, target_size=1)


# ----------------------------------------------------------------------------
# plumbing


def test_default_window_uses_needle_then_intensity_floor():
    marks = MarkLaw((0.0, 1.0), (0.5, 0.5), (0.5, 0.5))
    win = default_window(marks, 4.0)
    assert win.half_width == pytest.approx(10.0)  # ten needle lengths
    win = default_window(marks, 0.01)
    assert win.half_width == pytest.approx(50.0)  # intensity floor 5 / sqrt(lam)


def test_needle_io_roundtrip(tmp_path):
    needles = sample_ppp(cross_config(seed=50))
    path = tmp_path / "dump.txt"
    write_needles(str(path), needles)
    assert read_needles(str(path)) == needles


def test_needle_io_rejects_malformed_lines(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0.0 0.0 0.1\n")
    with pytest.raises(ProcessError):
        read_needles(str(path))
