"""Monte Carlo evaluation of the exact cluster-probability integrals.

The simulator estimates cluster statistics by brute force and the closed
forms give large-intensity asymptotics; this module supplies the third,
independent route: importance-sampled evaluation of the connectivity
integrals themselves.  All estimators are deterministic for a fixed seed,
consume their random streams in a chunk-size-independent order, and report
standard errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _fastgeom, geometry, process
from .formulas import (
    FormulaError,
    MarkLaw,
    ThreeStateParams,
    TwoStateParams,
    UnsupportedRegimeError,
    three_state_cluster_prob,
    two_state_cluster_prob,
    vacancy_exponent,
)
from .process import SimConfig

__all__ = [
    "EstimationError",
    "IntegralEstimate",
    "CompositionQuery",
    "BunchSample",
    "ChiSquareResult",
    "ConvergenceRow",
    "ConvergenceStudy",
    "CrossRow",
    "CrossValidation",
    "integrate_F",
    "cluster_probability",
    "conditional_composition",
    "convergence_study",
    "cross_validate",
    "bunch_offset_sample",
    "uniformity_chisquare",
]

_CHUNK = 1 << 19
_MIN_BUDGET = 1000
_DEGENERATE_SIN = 1e-12


class EstimationError(ValueError):
    """Invalid request to the Monte Carlo estimators."""


@dataclass(frozen=True)
class IntegralEstimate:
    """A Monte Carlo value with its standard error and provenance string."""

    value: float
    stderr: float
    samples: int
    proposal: str

    def __post_init__(self) -> None:
        if self.value < 0.0:
            raise EstimationError("estimate must be non-negative")
        if self.stderr < 0.0:
            raise EstimationError("stderr must be non-negative")


@dataclass(frozen=True)
class CompositionQuery:
    """A per-orientation needle count vector with its intensity and mark law."""

    kvec: tuple[int, ...]
    lam: float
    marks: MarkLaw

    def __post_init__(self) -> None:
        object.__setattr__(self, "kvec", tuple(int(v) for v in self.kvec))
        if len(self.kvec) != self.marks.d:
            raise EstimationError("kvec length must match the number of orientations")
        if any(v < 0 for v in self.kvec):
            raise EstimationError("composition entries must be >= 0")
        if sum(self.kvec) < 1:
            raise EstimationError("composition must place at least one needle")
        if self.lam <= 0.0:
            raise EstimationError("lambda must be positive")

    @property
    def m(self) -> int:
        return sum(self.kvec)


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed % 2**64, stream % 2**64]))


def _needle_multiset(query: CompositionQuery) -> tuple[np.ndarray, np.ndarray]:
    """Angles and half lengths of the m needles, pinned needle first.

    The pinned orientation is the one with the largest count (ties to the
    lowest index); the integral value does not depend on the choice, but
    pinning inside the largest group keeps the proposal centered.
    """
    marks = query.marks
    pin = max(range(marks.d), key=lambda j: (query.kvec[j], -j))
    angles = [marks.angles[pin]]
    halfs = [marks.half_lengths[pin]]
    for j in range(marks.d):
        reps = query.kvec[j] - (1 if j == pin else 0)
        angles.extend([marks.angles[j]] * reps)
        halfs.extend([marks.half_lengths[j]] * reps)
    return np.array(angles), np.array(halfs)


def _probe_union_areas(
    centers: np.ndarray,
    angles: np.ndarray,
    halfs: np.ndarray,
    probe_angle: float,
    probe_half: float,
) -> np.ndarray:
    """Area of the union of the needles' contact boxes against one probe.

    centers has shape (batch, m, 2).  Same-orientation boxes are degenerate
    and dropped; when the remaining needles share one orientation the boxes
    are translates of a single rectangle in skew coordinates, otherwise the
    general convex-quadrilateral union kernel runs.
    """
    sines = np.sin(probe_angle - angles)
    keep = np.abs(sines) > _DEGENERATE_SIN
    if not keep.any():
        return np.zeros(centers.shape[0])
    kept_angles = angles[keep]
    kept_halfs = halfs[keep]
    sub = centers[:, keep, :]
    e_p = np.array([math.cos(probe_angle), math.sin(probe_angle)])
    if np.all(kept_angles == kept_angles[0]):
        theta = float(kept_angles[0])
        r = float(kept_halfs[0])
        sin_g = math.sin(probe_angle - theta)
        e_t = np.array([math.cos(theta), math.sin(theta)])
        # x = s e_theta + t e_probe; boxes are [s +- r] x [t +- R] rectangles
        s = (sub[..., 0] * e_p[1] - sub[..., 1] * e_p[0]) / sin_g
        t = (e_t[0] * sub[..., 1] - e_t[1] * sub[..., 0]) / sin_g
        return abs(sin_g) * _fastgeom.rect_union_area_translates(
            2.0 * r, 2.0 * probe_half, s, t
        )
    quads = np.empty((sub.shape[0], sub.shape[1], 4, 2))
    for idx in range(sub.shape[1]):
        theta = float(kept_angles[idx])
        r = float(kept_halfs[idx])
        u = r * np.array([math.cos(theta), math.sin(theta)])
        v = probe_half * e_p
        if u[0] * v[1] - u[1] * v[0] < 0.0:
            v = -v
        corners = np.array([u + v, -u + v, -u - v, u - v])
        quads[:, idx] = sub[:, idx, None, :] + corners[None, :, :]
    return _fastgeom.quad_union_area_batch(quads)


def _connected_mask(centers: np.ndarray, angles: np.ndarray, halfs: np.ndarray) -> np.ndarray:
    """Whether the m needles of each sample form a single cluster."""
    batch, m = centers.shape[0], centers.shape[1]
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    ends0 = centers - halfs[None, :, None] * dirs[None, :, :]
    ends1 = centers + halfs[None, :, None] * dirs[None, :, :]
    adj = np.zeros((batch, m, m), dtype=bool)
    for i in range(m):
        for j in range(i + 1, m):
            hit = _fastgeom.segments_intersect_batch(
                ends0[:, i], ends1[:, i], ends0[:, j], ends1[:, j]
            )
            adj[:, i, j] = hit
            adj[:, j, i] = hit
    return _fastgeom.all_connected_batch(adj)


def _m1_value(query: CompositionQuery) -> float:
    marks = query.marks
    pin = query.kvec.index(1)
    theta = marks.angles[pin]
    r = marks.half_lengths[pin]
    total = 0.0
    for j in range(marks.d):
        total += marks.probs[j] * 4.0 * r * marks.half_lengths[j] * abs(
            math.sin(marks.angles[j] - theta)
        )
    return math.exp(-query.lam * total)


def integrate_F(
    query: CompositionQuery,
    budget: int,
    seed: int,
    box_half: float | None = None,
    stream: int = 0,
) -> IntegralEstimate:
    """Monte Carlo value of the connectivity integral for one composition.

    One needle is pinned at the origin and the remaining centers are drawn
    uniformly from the square of half-width box_half (default: the sum of
    all needle full lengths, which covers every connected configuration).
    The integrand is the vacancy weight exp(-lambda sum_j p_j |union of
    contact boxes against orientation j|) times the indicator that the m
    needles form one cluster.
    """
    if budget < _MIN_BUDGET:
        raise EstimationError(f"budget must be >= {_MIN_BUDGET}")
    m = query.m
    if m > 6:
        raise EstimationError("compositions beyond six needles are out of scope")
    if m == 1:
        return IntegralEstimate(_m1_value(query), 0.0, 0, "exact:m=1")
    angles, halfs = _needle_multiset(query)
    if np.all(angles == angles[0]):
        # parallel needles almost surely never touch
        return IntegralEstimate(0.0, 0.0, 0, "exact:parallel")
    marks = query.marks
    half = float(box_half) if box_half is not None else float(2.0 * halfs.sum())
    if half <= 0.0:
        raise EstimationError("proposal box half-width must be positive")
    volume = (2.0 * half) ** (2 * (m - 1))
    rng = _rng(seed, stream)
    probes = [
        (marks.probs[j], marks.angles[j], marks.half_lengths[j])
        for j in range(marks.d)
        if marks.probs[j] > 0.0
    ]
    done = 0
    acc = 0.0
    acc_sq = 0.0
    while done < budget:
        n = min(_CHUNK, budget - done)
        free = rng.random((n, m - 1, 2)) * (2.0 * half) - half
        centers = np.concatenate([np.zeros((n, 1, 2)), free], axis=1)
        conn = _connected_mask(centers, angles, halfs)
        if conn.any():
            hit = centers[conn]
            log_w = np.zeros(hit.shape[0])
            for prob, p_angle, p_half in probes:
                log_w -= query.lam * prob * _probe_union_areas(
                    hit, angles, halfs, p_angle, p_half
                )
            w = np.exp(log_w)
            acc += float(w.sum())
            acc_sq += float((w * w).sum())
        done += n
    mean = acc / budget
    var = max(acc_sq / budget - mean * mean, 0.0) / budget
    return IntegralEstimate(
        mean * volume,
        math.sqrt(var) * volume,
        budget,
        f"uniform-box:half={half!r}",
    )


def _compositions(m: int, d: int) -> list[tuple[int, ...]]:
    if d == 1:
        return [(m,)]
    out = []
    for first in range(m + 1):
        out.extend((first, *rest) for rest in _compositions(m - first, d - 1))
    return out


def _log_prefactor(kvec: tuple[int, ...], lam: float, marks: MarkLaw) -> float | None:
    """log of lam^(m-1) m prod_j p_j^(k_j) / k_j!, None when the mass is zero."""
    m = sum(kvec)
    total = (m - 1) * math.log(lam) + math.log(m)
    for j, k in enumerate(kvec):
        if k == 0:
            continue
        if marks.probs[j] <= 0.0:
            return None
        total += k * math.log(marks.probs[j]) - math.lgamma(k + 1)
    return total


def cluster_probability(
    query: CompositionQuery, budget: int, seed: int, stream: int = 0
) -> tuple[float, float]:
    """Estimated probability that the origin cluster has exactly this composition.

    The connectivity integral times the intensity and mark-probability
    prefactor; returns (value, stderr).
    """
    logc = _log_prefactor(query.kvec, query.lam, query.marks)
    if logc is None:
        return (0.0, 0.0)
    est = integrate_F(query, budget, seed, stream=stream)
    scale = math.exp(logc)
    return (scale * est.value, scale * est.stderr)


def conditional_composition(
    lam: float,
    m: int,
    marks: MarkLaw,
    budget: int,
    seed: int,
) -> dict[tuple[int, ...], tuple[float, float]]:
    """Distribution of the composition given that the origin cluster has size m.

    Each composition's unnormalized mass is estimated on its own sample
    stream and the shell is normalized; stderr comes from the delta method
    applied to the independent per-composition errors.  Same-orientation
    compositions of two or more needles carry zero mass and spend no budget.
    """
    if m < 1:
        raise EstimationError("cluster size must be >= 1")
    if m > 5:
        raise EstimationError("conditional shells beyond five needles are out of scope")
    if lam <= 0.0:
        raise EstimationError("lambda must be positive")
    if budget < _MIN_BUDGET:
        raise EstimationError(f"budget must be >= {_MIN_BUDGET}")
    comps = _compositions(m, marks.d)
    live = []
    for kvec in comps:
        logc = _log_prefactor(kvec, lam, marks)
        present = [j for j, k in enumerate(kvec) if k > 0]
        if logc is None or (m > 1 and len(present) < 2):
            continue
        live.append(kvec)
    values = {kvec: (0.0, 0.0) for kvec in comps}
    if not live:
        raise EstimationError("every composition of this size has zero mass")
    share = max(budget // len(live), _MIN_BUDGET)
    for idx, kvec in enumerate(comps):
        if kvec not in live:
            continue
        query = CompositionQuery(kvec, lam, marks)
        values[kvec] = cluster_probability(query, share, seed, stream=idx)
    total = sum(v for v, _ in values.values())
    if total <= 0.0:
        raise EstimationError("no composition produced positive mass; raise the budget")
    out: dict[tuple[int, ...], tuple[float, float]] = {}
    for kvec, (val, err) in values.items():
        prob = val / total
        rest_var = sum(e * e for kv, (_, e) in values.items() if kv != kvec)
        var = ((total - val) ** 2 * err * err + val * val * rest_var) / total**4
        out[kvec] = (prob, math.sqrt(var))
    return out


@dataclass(frozen=True)
class ConvergenceRow:
    """One (lambda, composition) line of an asymptotics comparison table."""

    lam: float
    composition: tuple[int, ...]
    estimate: float
    stderr: float
    asymptotic: float
    ratio: float


@dataclass(frozen=True)
class ConvergenceStudy:
    """Ratio table plus fitted prefactor powers.

    fitted_powers maps a composition to the least-squares slope of
    log(estimate) + lambda * phi against log(lambda), which should approach
    the closed-form power of 1/lambda in the prefactor; phis holds the
    exponential rates used in the rescale.
    """

    rows: tuple[ConvergenceRow, ...]
    fitted_powers: Mapping[tuple[int, ...], float]
    phis: Mapping[tuple[int, ...], float]


def _asymptotic_value(kvec: tuple[int, ...], lam: float, marks: MarkLaw) -> float:
    if marks.d == 2:
        if min(kvec) < 1:
            return math.nan
        return two_state_cluster_prob(
            kvec[0], kvec[1], lam, TwoStateParams.from_marks(marks)
        )
    if marks.d == 3:
        try:
            return three_state_cluster_prob(ThreeStateParams.from_marks(marks), kvec, lam)
        except (FormulaError, UnsupportedRegimeError):
            return math.nan
    return math.nan


def _phi_value(kvec: tuple[int, ...], marks: MarkLaw) -> float:
    if marks.d == 2:
        return TwoStateParams.from_marks(marks).contact_area
    if marks.d == 3:
        try:
            absent = [j for j, k in enumerate(kvec) if k == 0]
            if len(absent) != 1:
                return math.nan
            return vacancy_exponent(ThreeStateParams.from_marks(marks), absent[0])
        except (FormulaError, UnsupportedRegimeError):
            return math.nan
    return math.nan


def convergence_study(
    lambda_grid: Sequence[float],
    queries: Sequence[CompositionQuery],
    budget: int,
    seed: int,
) -> ConvergenceStudy:
    """Integrator-vs-asymptotics ratios over an ascending intensity grid.

    Each query's composition and mark law are re-evaluated at every grid
    intensity (the query's own lam field is ignored); the asymptotic column
    uses the closed-form cluster probability, nan where no closed form
    applies.
    """
    grid = [float(v) for v in lambda_grid]
    if not grid:
        raise EstimationError("lambda grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise EstimationError("lambda grid must be strictly ascending")
    rows: list[ConvergenceRow] = []
    per_comp: dict[tuple[int, ...], list[tuple[float, float]]] = {}
    for qi, base in enumerate(queries):
        for li, lam in enumerate(grid):
            query = CompositionQuery(base.kvec, lam, base.marks)
            val, err = cluster_probability(
                query, budget, seed, stream=1 + qi * len(grid) + li
            )
            asym = _asymptotic_value(base.kvec, lam, base.marks)
            ratio = val / asym if asym > 0.0 else math.nan
            rows.append(ConvergenceRow(lam, base.kvec, val, err, asym, ratio))
            if val > 0.0:
                per_comp.setdefault(base.kvec, []).append((lam, val))
    powers: dict[tuple[int, ...], float] = {}
    phis: dict[tuple[int, ...], float] = {}
    for qi, base in enumerate(queries):
        phi = _phi_value(base.kvec, base.marks)
        phis[base.kvec] = phi
        pts = per_comp.get(base.kvec, [])
        if len(pts) >= 2 and math.isfinite(phi):
            xs = np.log([p[0] for p in pts])
            ys = np.array([math.log(v) + lam * phi for lam, v in pts])
            powers[base.kvec] = float(np.polyfit(xs, ys, 1)[0])
    return ConvergenceStudy(tuple(rows), powers, phis)


@dataclass(frozen=True)
class CrossRow:
    """Simulator/integrator comparison for one composition."""

    composition: tuple[int, ...]
    sim_prob: float
    sim_stderr: float
    mc_prob: float
    mc_stderr: float
    z: float


@dataclass(frozen=True)
class CrossValidation:
    """Two-path comparison of the size-m composition law.

    inconclusive is set when the simulator saw fewer than 100 uncensored
    size-m clusters; the z columns are then unreliable and the report should
    not be treated as a pass or a fail.
    """

    lam: float
    m: int
    events: int
    inconclusive: bool
    rows: tuple[CrossRow, ...]


def cross_validate(
    config: SimConfig,
    m: int,
    trials: int,
    budget: int,
    seed: int,
    threads: int = 1,
) -> CrossValidation:
    """Compare simulated size-m composition frequencies with the integrator.

    The simulation uses the config's own seed; the integrator runs on the
    seed passed here, keeping the two routes independent.
    """
    hist = process.composition_histogram(config, trials, total_size=m, threads=threads)
    mc = conditional_composition(config.lam, m, config.marks, budget, seed)
    events = hist.conditioning_trials
    rows = []
    for kvec in sorted(mc):
        mc_p, mc_se = mc[kvec]
        sim_p, sim_se = hist.estimates.get(kvec, (0.0, 0.0))
        denom = math.hypot(sim_se, mc_se)
        diff = sim_p - mc_p
        if denom > 0.0:
            z = diff / denom
        else:
            z = 0.0 if diff == 0.0 else math.inf
        rows.append(CrossRow(kvec, sim_p, sim_se, mc_p, mc_se, z))
    return CrossValidation(config.lam, m, events, events < 100, tuple(rows))


@dataclass(frozen=True)
class BunchSample:
    """Exact draws from the conditional law of a hub-and-bunch cluster.

    For a two-orientation law, a size-m cluster whose orientations split
    (1, m-1) has every bunch needle touching the single hub needle, and the
    conditional density of the bunch offsets is exp(-lambda p_hub |union of
    the bunch needles' contact boxes against the hub orientation|) on the
    hub's contact box: the probe boxes against the bunch orientation are
    pinned to the hub alone, so only the hub-orientation union varies.
    hull_areas holds the convex hull area of the bunch centers per draw;
    offsets the slack-normalized bunch bounding-box centers, exactly uniform
    on [-1, 1] x [-1, 1] under the model.
    """

    lam: float
    m: int
    hull_areas: np.ndarray
    offsets: np.ndarray
    draws: int
    proposed: int


def _draw_tilted_axis(
    rng: np.random.Generator, batch: int, n: int, half: float, kappa: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Propose batch rows of n coordinates in [-half, half] tilted by range.

    Returns (coords, range, ok): the coordinate law restricted to ok rows is
    proportional to exp(-kappa * range) once the companion (1 - r/W) factor
    in ok's acceptance is accounted for; built from the classic
    (range, min, interior) decomposition of order statistics.
    """
    width = 2.0 * half
    if n == 1:
        coords = rng.uniform(-half, half, (batch, 1))
        return coords, np.zeros(batch), np.ones(batch, dtype=bool)
    if kappa > 0.0:
        r = rng.gamma(n - 1, 1.0 / kappa, batch)
    else:
        u = rng.random((batch, n)) * width - half
        return u, u.max(axis=1) - u.min(axis=1), np.ones(batch, dtype=bool)
    ok = (r < width) & (rng.random(batch) < np.clip(1.0 - r / width, 0.0, 1.0))
    lo = -half + rng.random(batch) * np.clip(width - r, 0.0, None)
    coords = np.empty((batch, n))
    coords[:, 0] = lo
    coords[:, 1] = lo + r
    if n > 2:
        coords[:, 2:] = lo[:, None] + r[:, None] * rng.random((batch, n - 2))
    return coords, r, ok


def bunch_offset_sample(
    lam: float,
    marks: MarkLaw,
    m: int,
    draws: int,
    seed: int,
    hub: int = 0,
) -> BunchSample:
    """Draw hub-and-bunch clusters of size m from the exact conditional law.

    Rejection sampling: per-axis range-tilted proposals (the vacancy excess
    is at least half the linear form R_t*range_s + R_s*range_t, making the
    residual weight a valid acceptance probability), then the exact
    rectangle-union excess in the acceptance step.  Works at intensities far
    beyond what rejection against raw simulation could reach.
    """
    if marks.d != 2:
        raise EstimationError("the exact bunch sampler needs a two-orientation law")
    if m < 2:
        raise EstimationError("a hub-and-bunch cluster needs at least two needles")
    if m > 9:
        raise EstimationError("bunch sizes beyond eight needles are out of scope")
    if draws < 1:
        raise EstimationError("draws must be >= 1")
    if lam <= 0.0:
        raise EstimationError("lambda must be positive")
    if hub not in (0, 1):
        raise EstimationError("hub must index one of the two orientations")
    bunch = 1 - hub
    n = m - 1
    gap = marks.angles[bunch] - marks.angles[hub]
    sin_g = abs(math.sin(gap))
    r_s = marks.half_lengths[hub]
    r_t = marks.half_lengths[bunch]
    rate = lam * marks.probs[hub] * sin_g
    rng = _rng(seed, 11)
    kept_s: list[np.ndarray] = []
    kept_t: list[np.ndarray] = []
    got = 0
    proposed = 0
    batch = max(4096, min(1 << 16, 8 * draws))
    while got < draws:
        s, range_s, ok_s = _draw_tilted_axis(rng, batch, n, r_s, rate * r_t)
        t, range_t, ok_t = _draw_tilted_axis(rng, batch, n, r_t, rate * r_s)
        proposed += batch
        ok = ok_s & ok_t
        if n >= 2:
            # pair the two axes exchangeably BEFORE weighing: the union excess
            # depends on the pairing (not just the two multisets), and the
            # (min, max, interior) slot layout would correlate s_k with t_k
            s = rng.permuted(s, axis=1)
            excess = (
                _fastgeom.rect_union_area_translates(2.0 * r_s, 2.0 * r_t, s, t)
                - 4.0 * r_s * r_t
            )
            resid = excess - r_t * range_s - r_s * range_t
            u = rng.random(batch)
            ok &= u < np.exp(-rate * np.clip(resid, 0.0, None))
        if ok.any():
            kept_s.append(s[ok])
            kept_t.append(t[ok])
            got += int(ok.sum())
    s = np.concatenate(kept_s)[:draws]
    t = np.concatenate(kept_t)[:draws]
    hull = np.zeros(draws)
    if n == 3:
        hull = 0.5 * np.abs(
            (s[:, 1] - s[:, 0]) * (t[:, 2] - t[:, 0])
            - (s[:, 2] - s[:, 0]) * (t[:, 1] - t[:, 0])
        )
    elif n > 3:
        hull = np.array(
            [
                geometry.convex_hull_area(list(zip(row_s, row_t)))
                for row_s, row_t in zip(s, t)
            ]
        )
    offsets = np.empty((draws, 2))
    mid_s = 0.5 * (s.max(axis=1) + s.min(axis=1))
    mid_t = 0.5 * (t.max(axis=1) + t.min(axis=1))
    slack_s = r_s - 0.5 * (s.max(axis=1) - s.min(axis=1))
    slack_t = r_t - 0.5 * (t.max(axis=1) - t.min(axis=1))
    offsets[:, 0] = np.where(slack_s > 0.0, mid_s / np.where(slack_s > 0, slack_s, 1.0), 0.0)
    offsets[:, 1] = np.where(slack_t > 0.0, mid_t / np.where(slack_t > 0, slack_t, 1.0), 0.0)
    return BunchSample(lam, m, sin_g * hull, offsets, draws, proposed)


@dataclass(frozen=True)
class ChiSquareResult:
    """Grid-count chi-square statistic against a uniform null."""

    statistic: float
    df: int
    counts: np.ndarray


def uniformity_chisquare(offsets: np.ndarray, bins: int = 4) -> ChiSquareResult:
    """Chi-square statistic of offsets in [-1, 1]^2 against uniformity.

    Bins the points on a bins x bins grid and compares with the flat
    expectation; the caller supplies the critical value for its level.
    """
    pts = np.asarray(offsets, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise EstimationError("offsets must be an (n, 2) array")
    n = pts.shape[0]
    if n < 5 * bins * bins:
        raise EstimationError(
            f"need at least {5 * bins * bins} offsets for a {bins}x{bins} grid"
        )
    counts, _, _ = np.histogram2d(
        pts[:, 0], pts[:, 1], bins=bins, range=[[-1.0, 1.0], [-1.0, 1.0]]
    )
    expected = n / (bins * bins)
    stat = float(((counts - expected) ** 2 / expected).sum())
    return ChiSquareResult(stat, bins * bins - 1, counts)
