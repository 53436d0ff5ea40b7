"""Finite-window sampling of the Poisson needle process and origin-cluster statistics.

The sampler drops needle centers as a homogeneous Poisson process on a
rectangular window, marks each center independently with an (angle,
half-length) pair from a MarkLaw, and studies the connectivity cluster of a
distinguished needle centered at the origin (the conditioned process adds
that needle, with its own mark draw, on top of an ordinary sample).

Clusters that touch the window boundary are censored: a finite window cannot
tell a large finite cluster from an infinite one, so boundary clusters carry
no shape statistics and are excluded from composition estimates.  At strongly
supercritical intensity the origin cluster is censored in nearly every trial
and the sampler is the wrong tool; the estimation module integrates the
finite-cluster laws directly in that regime.

Determinism: every random draw comes from a counter-based generator keyed by
(seed, trial index), so trial i's sample does not depend on how trials are
scheduled across threads, and all aggregation happens in trial order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from . import _fastgeom, geometry
from .formulas import MarkLaw
from .geometry import DirPair, Needle, Vec2

__all__ = [
    "ProcessError",
    "NeedleOverflowError",
    "MissingOriginError",
    "SimWindow",
    "SimConfig",
    "ClusterReport",
    "CompositionHistogram",
    "CompressionSummary",
    "default_window",
    "sample_ppp",
    "palm_sample",
    "build_clusters",
    "origin_cluster",
    "composition_histogram",
    "compression_stats",
    "write_needles",
    "read_needles",
]


class ProcessError(ValueError):
    """Invalid simulator input or state."""


class NeedleOverflowError(ProcessError):
    """A sampled needle count exceeded the configured cap."""


class MissingOriginError(ProcessError):
    """No needle centered exactly at the origin was found."""


@dataclass(frozen=True)
class SimWindow:
    """Axis-aligned window [-half_width, half_width] x [-half_height, half_height]."""

    half_width: float
    half_height: float

    def __post_init__(self) -> None:
        if not (self.half_width > 0.0 and math.isfinite(self.half_width)):
            raise ProcessError(f"half_width must be positive, got {self.half_width}")
        if not (self.half_height > 0.0 and math.isfinite(self.half_height)):
            raise ProcessError(f"half_height must be positive, got {self.half_height}")

    @property
    def area(self) -> float:
        return 4.0 * self.half_width * self.half_height


@dataclass(frozen=True)
class SimConfig:
    """One simulation setup: intensity, window, mark law, seed, cap, conditioning."""

    lam: float
    window: SimWindow
    marks: MarkLaw
    seed: int
    max_needles: int = 2_000_000
    palm: bool = False

    def __post_init__(self) -> None:
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ProcessError(f"intensity must be positive, got {self.lam}")
        if self.max_needles < 1:
            raise ProcessError("max_needles must be >= 1")


@dataclass(frozen=True)
class ClusterReport:
    """Origin cluster summary.

    composition maps needle angle -> count.  Hull areas and spreads are empty
    for censored clusters.  Spreads are the center spreads along the two
    largest distinct directions present in the cluster (skew components with
    respect to that pair) and are omitted when the cluster holds a single
    orientation.
    """

    composition: dict[float, int]
    needles: tuple[Needle, ...]
    censored: bool
    per_orientation_hull_area: dict[float, float]
    spreads: dict[float, tuple[float, float]]

    def __post_init__(self) -> None:
        if sum(self.composition.values()) != len(self.needles):
            raise ProcessError("composition counts must sum to the needle count")
        if self.censored and (self.per_orientation_hull_area or self.spreads):
            raise ProcessError("censored clusters carry no shape statistics")


@dataclass(frozen=True)
class CompositionHistogram:
    """Empirical origin-cluster composition distribution over palm trials.

    Keys are count vectors aligned with the mark law's orientation order.
    Estimates are conditional on the cluster being uncensored (and, when
    total_size is set, on the total needle count equaling it); censored
    trials are tallied separately, not silently dropped.
    """

    trials: int
    censored_trials: int
    conditioning_trials: int
    counts: dict[tuple[int, ...], int]
    estimates: dict[tuple[int, ...], tuple[float, float]]
    total_size: int | None


@dataclass(frozen=True)
class CompressionSummary:
    """Shape statistics of hub-and-bunch origin clusters of a fixed total size.

    A qualifying cluster has exactly two orientations, one of them carried by
    a single needle (the hub); the remaining target_size - 1 needles (the
    bunch) are mutually parallel, so each one touches the hub.  At high
    intensity almost every finite cluster has this shape, the bunch centers
    squeeze into a region whose area vanishes, and the bunch's location is
    uniform over the hub's contact box.  bunch_hull_areas holds the convex
    hull area of the bunch centers per qualifying cluster (mean_bunch_hull_area
    is their average); offsets holds each cluster's
    bunch bounding-box center in hub-box coordinates, rescaled by its own
    remaining slack (for a two-orientation law these are exactly uniform on
    [-1, 1] x [-1, 1], see _normalized_midrange).
    """

    lam: float
    trials: int
    censored_trials: int
    n_target: int
    mean_bunch_hull_area: float
    bunch_hull_areas: np.ndarray
    offsets: np.ndarray
    target_size: int


def default_window(marks: MarkLaw, lam: float) -> SimWindow:
    """Window sized to keep desk-scale censoring rates low.

    Half-extent = max(10 * longest needle, 5 / sqrt(lam)): ten needle lengths
    so short chains rarely reach the boundary, with a floor that keeps the
    expected count usable when needles are short and intensity is low.
    """
    if not (lam > 0.0 and math.isfinite(lam)):
        raise ProcessError(f"intensity must be positive, got {lam}")
    half = max(10.0 * marks.max_length, 5.0 / math.sqrt(lam))
    return SimWindow(half, half)


def _trial_rng(seed: int, stream: int) -> np.random.Generator:
    key = np.array([seed % (1 << 64), stream % (1 << 64)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _draw_marks(rng: np.random.Generator, marks: MarkLaw, n: int) -> np.ndarray:
    cum = np.cumsum(np.asarray(marks.probs, dtype=float))
    idx = np.searchsorted(cum, rng.random(n), side="right")
    return np.minimum(idx, marks.d - 1).astype(np.int64)


def _sample_arrays(
    config: SimConfig, stream: int
) -> tuple[np.ndarray, np.ndarray, int | None]:
    """Centers (n, 2), mark indices (n,), and the origin row (0) if conditioned.

    Draw order is frozen (origin mark, count, centers, marks) so identical
    configs replay bit-identically.
    """
    rng = _trial_rng(config.seed, stream)
    origin_mark = int(_draw_marks(rng, config.marks, 1)[0]) if config.palm else None
    mu = config.lam * config.window.area
    n = int(rng.poisson(mu))
    total = n + (1 if config.palm else 0)
    if total > config.max_needles:
        raise NeedleOverflowError(
            f"sampled {total} needles > cap {config.max_needles}; "
            "raise max_needles or shrink the window"
        )
    u = rng.random((n, 2))
    centers = np.empty((n, 2), dtype=float)
    centers[:, 0] = (2.0 * u[:, 0] - 1.0) * config.window.half_width
    centers[:, 1] = (2.0 * u[:, 1] - 1.0) * config.window.half_height
    mark_idx = _draw_marks(rng, config.marks, n)
    if config.palm:
        centers = np.vstack([np.zeros((1, 2)), centers])
        mark_idx = np.concatenate([[origin_mark], mark_idx])
        return centers, mark_idx, 0
    return centers, mark_idx, None


def _to_needles(centers: np.ndarray, mark_idx: np.ndarray, marks: MarkLaw) -> list[Needle]:
    return [
        Needle(
            (float(centers[i, 0]), float(centers[i, 1])),
            marks.angles[mark_idx[i]],
            marks.half_lengths[mark_idx[i]],
        )
        for i in range(len(mark_idx))
    ]


def sample_ppp(config: SimConfig) -> list[Needle]:
    """One Poisson sample: count ~ Poisson(lam * area), centers uniform, marks i.i.d."""
    cfg = config if not config.palm else SimConfig(
        config.lam, config.window, config.marks, config.seed, config.max_needles, False
    )
    centers, mark_idx, _ = _sample_arrays(cfg, 0)
    return _to_needles(centers, mark_idx, config.marks)


def palm_sample(config: SimConfig) -> list[Needle]:
    """Poisson sample plus the conditioned needle at the origin (returned first).

    The origin needle's mark is an independent draw from the mark law, which
    is exactly the conditional orientation distribution of the process given
    that some needle sits at the origin.
    """
    if not config.palm:
        raise ProcessError("palm_sample needs a config with palm=True")
    centers, mark_idx, _ = _sample_arrays(config, 0)
    return _to_needles(centers, mark_idx, config.marks)


def _needle_arrays(
    needles: Sequence[Needle],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    centers = np.array([n.center for n in needles], dtype=float).reshape(-1, 2)
    angles = np.array([n.angle for n in needles], dtype=float)
    halfs = np.array([n.half_length for n in needles], dtype=float)
    return centers, angles, halfs


def _endpoints(
    centers: np.ndarray, angles: np.ndarray, halfs: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    ex = np.cos(angles) * halfs
    ey = np.sin(angles) * halfs
    off = np.stack([ex, ey], axis=1)
    return centers - off, centers + off


def _cluster_labels(
    centers: np.ndarray, angles: np.ndarray, halfs: np.ndarray
) -> np.ndarray:
    n = len(angles)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    p0, p1 = _endpoints(centers, angles, halfs)
    cell = 2.0 * float(halfs.max())
    ix = np.floor(centers[:, 0] / cell).astype(np.int64)
    iy = np.floor(centers[:, 1] / cell).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = {}
    for i in range(n):
        buckets.setdefault((int(ix[i]), int(iy[i])), []).append(i)

    pair_a: list[np.ndarray] = []
    pair_b: list[np.ndarray] = []
    # any intersecting pair has centers within one needle length, hence within
    # one cell step; scanning 4 of the 8 neighbors covers each pair once
    neighbor_steps = ((1, 0), (1, 1), (0, 1), (-1, 1))
    for key in sorted(buckets):
        mine = np.asarray(buckets[key], dtype=np.int64)
        if len(mine) > 1:
            ii, jj = np.triu_indices(len(mine), k=1)
            pair_a.append(mine[ii])
            pair_b.append(mine[jj])
        for dx, dy in neighbor_steps:
            other = buckets.get((key[0] + dx, key[1] + dy))
            if other:
                arr = np.asarray(other, dtype=np.int64)
                g1, g2 = np.meshgrid(mine, arr, indexing="ij")
                pair_a.append(g1.ravel())
                pair_b.append(g2.ravel())

    parent = np.arange(n, dtype=np.int64)

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    if pair_a:
        a = np.concatenate(pair_a)
        b = np.concatenate(pair_b)
        hits = _fastgeom.segments_intersect_batch(p0[a], p1[a], p0[b], p1[b])
        for i, j in zip(a[hits].tolist(), b[hits].tolist()):
            ri, rj = find(i), find(j)
            if ri != rj:
                if ri < rj:
                    parent[rj] = ri
                else:
                    parent[ri] = rj

    roots = np.fromiter((find(i) for i in range(n)), dtype=np.int64, count=n)
    # canonical ids in order of first appearance
    labels = np.empty(n, dtype=np.int64)
    seen: dict[int, int] = {}
    for i in range(n):
        r = int(roots[i])
        if r not in seen:
            seen[r] = len(seen)
        labels[i] = seen[r]
    return labels


def build_clusters(needles: Sequence[Needle]) -> np.ndarray:
    """Connected components of the needle intersection graph.

    Returns one integer label per input needle, numbered by first appearance.
    A uniform grid with cell size = the longest needle supplies the candidate
    pairs, so the result matches the brute-force transitive closure exactly.
    """
    centers, angles, halfs = _needle_arrays(needles)
    return _cluster_labels(centers, angles, halfs)


def _censored_mask(
    centers: np.ndarray, angles: np.ndarray, halfs: np.ndarray, window: SimWindow
) -> np.ndarray:
    p0, p1 = _endpoints(centers, angles, halfs)
    out0 = (np.abs(p0[:, 0]) >= window.half_width) | (
        np.abs(p0[:, 1]) >= window.half_height
    )
    out1 = (np.abs(p1[:, 0]) >= window.half_width) | (
        np.abs(p1[:, 1]) >= window.half_height
    )
    return out0 | out1


def _origin_members_bfs(
    centers: np.ndarray,
    angles: np.ndarray,
    halfs: np.ndarray,
    origin_row: int,
    cap: int | None = None,
) -> np.ndarray | None:
    """Member rows of the origin needle's component, grown outward.

    Equivalent to reading off _cluster_labels at the origin, but only the
    neighborhood of the growing component is ever touched, which is far
    cheaper than labeling a whole supercritical window.  With cap set the
    walk stops as soon as the component exceeds cap members and returns
    None: a size-capped statistic never looks at such a cluster, so there
    is no point mapping out a giant component.
    """
    n = len(angles)
    p0, p1 = _endpoints(centers, angles, halfs)
    cell = 2.0 * float(halfs.max())
    ix = np.floor(centers[:, 0] / cell).astype(np.int64)
    iy = np.floor(centers[:, 1] / cell).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = {}
    for i in range(n):
        buckets.setdefault((int(ix[i]), int(iy[i])), []).append(i)
    arrays = {key: np.asarray(v, dtype=np.int64) for key, v in buckets.items()}
    member = np.zeros(n, dtype=bool)
    member[origin_row] = True
    count = 1
    frontier = [origin_row]
    while frontier:
        grown: list[int] = []
        for i in frontier:
            near = [
                arrays[key]
                for dx in (-1, 0, 1)
                for dy in (-1, 0, 1)
                if (key := (int(ix[i]) + dx, int(iy[i]) + dy)) in arrays
            ]
            cand = np.concatenate(near)
            cand = cand[~member[cand]]
            if len(cand) == 0:
                continue
            hit = _fastgeom.segments_intersect_batch(
                p0[i][None, :], p1[i][None, :], p0[cand], p1[cand]
            )
            found = cand[hit]
            if len(found):
                member[found] = True
                count += len(found)
                if cap is not None and count > cap:
                    return None
                grown.extend(int(v) for v in found)
        frontier = grown
    return np.flatnonzero(member)


def _origin_member_stats(
    centers: np.ndarray,
    angles: np.ndarray,
    halfs: np.ndarray,
    window: SimWindow,
    origin_row: int,
    cap: int | None = None,
) -> tuple[np.ndarray | None, bool]:
    members = _origin_members_bfs(centers, angles, halfs, origin_row, cap)
    if members is None:
        return None, False
    touched = _censored_mask(
        centers[members], angles[members], halfs[members], window
    )
    return members, bool(touched.any())


def origin_cluster(needles: Sequence[Needle], window: SimWindow) -> ClusterReport:
    """Report on the cluster of the needle centered exactly at the origin.

    Censored means some member needle touches or crosses the window border;
    such clusters keep their composition but drop hull and spread statistics.
    """
    centers, angles, halfs = _needle_arrays(needles)
    origin_rows = np.flatnonzero((centers[:, 0] == 0.0) & (centers[:, 1] == 0.0))
    if len(origin_rows) == 0:
        raise MissingOriginError("no needle centered at the origin")
    members, censored = _origin_member_stats(
        centers, angles, halfs, window, int(origin_rows[0])
    )
    member_angles = angles[members]
    distinct = sorted(set(member_angles.tolist()))
    composition = {
        a: int(np.count_nonzero(member_angles == a)) for a in distinct
    }
    hulls: dict[float, float] = {}
    spreads: dict[float, tuple[float, float]] = {}
    if not censored:
        for a in distinct:
            pts = centers[members][member_angles == a]
            hulls[a] = geometry.convex_hull_area([tuple(p) for p in pts])
        if len(distinct) >= 2:
            pair = DirPair(distinct[-2], distinct[-1])
            for a in distinct:
                pts = centers[members][member_angles == a]
                comps = [
                    geometry.skew_components((float(p[0]), float(p[1])), pair)
                    for p in pts
                ]
                spreads[a] = (
                    geometry.max_spread([c[0] for c in comps]),
                    geometry.max_spread([c[1] for c in comps]),
                )
    return ClusterReport(
        composition=composition,
        needles=tuple(needles[int(i)] for i in members),
        censored=censored,
        per_orientation_hull_area=hulls,
        spreads=spreads,
    )


_T = TypeVar("_T")


def _map_trials(
    worker: Callable[[int], _T], trials: int, threads: int
) -> list[_T]:
    """Run worker(0..trials-1), results in trial order regardless of threads."""
    if threads <= 1 or trials <= 1:
        return [worker(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(trials)))


def _palm_trial_composition(
    config: SimConfig, stream: int, cap: int | None = None
) -> tuple[tuple[int, ...] | None, bool]:
    """(composition key, censored) for one palm trial; key None when censored
    or when the cluster outgrew a size cap."""
    cfg = config if config.palm else SimConfig(
        config.lam, config.window, config.marks, config.seed, config.max_needles, True
    )
    centers, mark_idx, origin_row = _sample_arrays(cfg, stream)
    angles = np.array([cfg.marks.angles[i] for i in mark_idx], dtype=float)
    halfs = np.array([cfg.marks.half_lengths[i] for i in mark_idx], dtype=float)
    members, censored = _origin_member_stats(
        centers, angles, halfs, cfg.window, origin_row, cap
    )
    if censored:
        return None, True
    if members is None:
        return None, False
    key = tuple(
        int(np.count_nonzero(mark_idx[members] == j)) for j in range(cfg.marks.d)
    )
    return key, False


def composition_histogram(
    config: SimConfig,
    trials: int,
    total_size: int | None = None,
    threads: int = 1,
) -> CompositionHistogram:
    """Empirical distribution of the origin-cluster composition.

    Runs independent palm trials (the palm flag on config is not required;
    conditioning is what the statistic is about).  With total_size set, the
    distribution is further conditioned on the total cluster size; clusters
    that outgrow it are abandoned early, so censored_trials then counts only
    clusters censored while still within the size of interest (the only kind
    whose loss could bias the conditional estimate).
    """
    if trials < 1:
        raise ProcessError("trials must be >= 1")
    outcomes = _map_trials(
        lambda t: _palm_trial_composition(config, t, total_size), trials, threads
    )
    counts: dict[tuple[int, ...], int] = {}
    censored = 0
    for key, was_censored in outcomes:
        if was_censored:
            censored += 1
            continue
        if key is None or (total_size is not None and sum(key) != total_size):
            continue
        counts[key] = counts.get(key, 0) + 1
    n_cond = sum(counts.values()) if total_size is not None else trials - censored
    estimates: dict[tuple[int, ...], tuple[float, float]] = {}
    if n_cond > 0:
        for key in sorted(counts):
            p_hat = counts[key] / n_cond
            se = math.sqrt(p_hat * (1.0 - p_hat) / n_cond)
            estimates[key] = (p_hat, se)
    return CompositionHistogram(
        trials=trials,
        censored_trials=censored,
        conditioning_trials=n_cond,
        counts=dict(sorted(counts.items())),
        estimates=estimates,
        total_size=total_size,
    )


def _palm_trial_compression(
    config: SimConfig, stream: int, target_size: int
) -> tuple[float, tuple[float, float]] | bool:
    """Bunch hull area and hub-box offset for one qualifying trial.

    Returns True for a censored trial and False for an uncensored trial that
    is the wrong size or not hub-and-bunch shaped, keeping the tally exact
    without re-running anything.
    """
    cfg = config if config.palm else SimConfig(
        config.lam, config.window, config.marks, config.seed, config.max_needles, True
    )
    centers, mark_idx, origin_row = _sample_arrays(cfg, stream)
    angles = np.array([cfg.marks.angles[i] for i in mark_idx], dtype=float)
    halfs = np.array([cfg.marks.half_lengths[i] for i in mark_idx], dtype=float)
    members, censored = _origin_member_stats(
        centers, angles, halfs, cfg.window, origin_row, target_size
    )
    if censored:
        return True
    if members is None or len(members) != target_size:
        return False
    marks_here = mark_idx[members]
    present = [j for j in range(cfg.marks.d) if np.count_nonzero(marks_here == j)]
    if len(present) != 2:
        return False
    counts = {j: int(np.count_nonzero(marks_here == j)) for j in present}
    if min(counts.values()) != 1:
        return False
    hub = min(present, key=lambda j: counts[j])
    bunch = next(j for j in present if j != hub)
    hub_pt = centers[members][marks_here == hub][0]
    bunch_pts = centers[members][marks_here == bunch]
    hull = geometry.convex_hull_area([tuple(p) for p in bunch_pts])
    # Parallel needles never touch each other, so every bunch needle leans on
    # the hub and its center sits inside the hub's contact box.  The skew
    # component along the hub direction is bounded by the hub half-length,
    # the one along the bunch direction by the bunch half-length.
    a_hub, a_bunch = cfg.marks.angles[hub], cfg.marks.angles[bunch]
    r_hub, r_bunch = cfg.marks.half_lengths[hub], cfg.marks.half_lengths[bunch]
    comps = []
    for pt in bunch_pts:
        rel = (float(pt[0] - hub_pt[0]), float(pt[1] - hub_pt[1]))
        if a_hub < a_bunch:
            s, t = geometry.skew_components(rel, DirPair(a_hub, a_bunch))
        else:
            t, s = geometry.skew_components(rel, DirPair(a_bunch, a_hub))
        comps.append((s, t))
    arr = np.array(comps, dtype=float)
    offset = (
        _normalized_midrange(arr[:, 0], r_hub),
        _normalized_midrange(arr[:, 1], r_bunch),
    )
    return (hull, offset)


def _normalized_midrange(vals: np.ndarray, half: float) -> float:
    """Center of the value range, rescaled by the room left in [-half, half].

    The vacancy weight of a hub-and-bunch cluster depends only on the bunch's
    relative offsets, so given the range the midrange is uniform over the
    positions where the range fits in the box; dividing by that slack makes
    it uniform on [-1, 1] regardless of the range.
    """
    mid = 0.5 * (vals.max() + vals.min())
    slack = half - 0.5 * (vals.max() - vals.min())
    if slack <= 0.0:
        return 0.0
    return float(mid / slack)


def compression_stats(
    config: SimConfig,
    trials: int,
    target_size: int,
    threads: int = 1,
) -> CompressionSummary:
    """Hub-and-bunch shape statistics at a fixed cluster size.

    A cluster qualifies when it is uncensored, has exactly target_size
    needles in exactly two orientations, and one orientation is down to a
    single needle (the hub).  The hull is taken over the centers of the
    remaining needles (the bunch); offsets place the bunch centroid in the
    hub's contact box.  Clusters of any other shape are counted in trials
    but contribute nothing.
    """
    if target_size < 2:
        raise ProcessError("target_size must be >= 2")
    if trials < 1:
        raise ProcessError("trials must be >= 1")
    outcomes = _map_trials(
        lambda t: _palm_trial_compression(config, t, target_size), trials, threads
    )
    hulls: list[float] = []
    offsets: list[tuple[float, float]] = []
    censored = 0
    for out in outcomes:
        if out is True:
            censored += 1
        elif out is False:
            continue
        else:
            hull, offset = out
            hulls.append(hull)
            offsets.append(offset)
    mean_hull = float(np.mean(hulls)) if hulls else math.nan
    return CompressionSummary(
        lam=config.lam,
        trials=trials,
        censored_trials=censored,
        n_target=len(hulls),
        mean_bunch_hull_area=mean_hull,
        bunch_hull_areas=np.array(hulls, dtype=float),
        offsets=np.array(offsets, dtype=float).reshape(-1, 2),
        target_size=target_size,
    )


def write_needles(path: str, needles: Iterable[Needle]) -> None:
    """Dump needles as one "x y theta r" line each (full float precision)."""
    with open(path, "w", encoding="ascii") as fh:
        for n in needles:
            fh.write(f"{n.center[0]!r} {n.center[1]!r} {n.angle!r} {n.half_length!r}\n")


def read_needles(path: str) -> list[Needle]:
    """Read a needle dump written by write_needles."""
    out: list[Needle] = []
    with open(path, "r", encoding="ascii") as fh:
        for line_no, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4:
                raise ProcessError(f"line {line_no}: expected 'x y theta r', got {line!r}")
            x, y, theta, r = map(float, parts)
            out.append(Needle((x, y), theta, r))
    return out
