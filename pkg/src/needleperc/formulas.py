"""Closed-form cluster laws for Poisson needle processes with few orientations.

A mark law places needles with orientations alpha_j (probability p_j, half
length R_j).  Conditioned on a needle through the origin, the cluster of
needles reachable by touching is almost surely finite off criticality, and as
the intensity lambda grows both its composition law and its probability decay
have explicit forms driven by contact-box geometry.  This module provides:

* exact areas of unions of the two contact boxes sharing a common direction,
  and the excess area picked up when one box is shifted (``shift_excess``);
* sandwich bounds for the union excess of translated boxes in terms of
  coordinate spreads, for one group and for two groups with a shift;
* the vacancy exponents, the per-orientation rates, and a classifier deciding
  which orientation pair survives in clusters at large intensity;
* spread-weight integrals G^k and the large-intensity cluster probability
  prefactors for two-orientation and three-orientation models.

Scalar geometry is delegated to :mod:`needleperc.geometry`; everything here
is closed form except the Monte Carlo fallback of :func:`spread_integral`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import lgamma
from typing import Sequence

import numpy as np

from . import geometry
from .geometry import DirPair, SkewBox, Vec2

__all__ = [
    "FormulaError",
    "HypothesisError",
    "UnsupportedRegimeError",
    "MarkLaw",
    "TwoStateParams",
    "ThreeStateParams",
    "ParamsH",
    "RegimeVerdict",
    "CompositionLaw",
    "h_units",
    "contact_pair_union_area",
    "shift_excess",
    "free_box_halflengths",
    "spread_excess_bounds",
    "two_group_excess_bounds",
    "shifted_excess_check",
    "vacancy_exponent",
    "rate_exponent",
    "classify_regime",
    "l1_threshold",
    "l2_threshold",
    "spread_weight",
    "spread_integral",
    "two_state_cluster_prob",
    "three_state_cluster_prob",
    "cluster_decay_power",
    "composition_limit",
    "entropy_rate",
]

_PROB_TOL = 1e-12


class FormulaError(ValueError):
    """Invalid parameter for a closed-form evaluation."""


class HypothesisError(FormulaError):
    """A bound was requested outside the hypotheses that make it valid."""


class UnsupportedRegimeError(FormulaError):
    """The requested asymptotic regime has no implemented closed form."""


# ----------------------------------------------------------------------------
# parameter containers


@dataclass(frozen=True)
class MarkLaw:
    """Discrete orientation/half-length/probability mark law.

    Angles must be strictly increasing in [0, pi); probabilities sum to 1
    (within 1e-12) and may include zeros; half lengths are positive.
    """

    angles: tuple[float, ...]
    half_lengths: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        d = len(self.angles)
        if d < 1 or len(self.half_lengths) != d or len(self.probs) != d:
            raise FormulaError("mark law needs matching, non-empty angle/length/prob tuples")
        for i, a in enumerate(self.angles):
            if not (0.0 <= a < math.pi):
                raise FormulaError(f"angle {a} outside [0, pi)")
            if i and not (a > self.angles[i - 1]):
                raise FormulaError("angles must be strictly increasing")
        if any(r <= 0.0 for r in self.half_lengths):
            raise FormulaError("half lengths must be positive")
        if any(p < 0.0 for p in self.probs):
            raise FormulaError("probabilities must be >= 0")
        if abs(sum(self.probs) - 1.0) > _PROB_TOL:
            raise FormulaError(f"probabilities sum to {sum(self.probs)}, not 1")

    @classmethod
    def from_entries(cls, entries: Sequence[tuple[float, float, float]]) -> "MarkLaw":
        """Build from (angle, half_length, prob) triples."""
        ang, hl, pr = zip(*entries) if entries else ((), (), ())
        return cls(tuple(ang), tuple(hl), tuple(pr))

    @property
    def d(self) -> int:
        return len(self.angles)

    @property
    def max_length(self) -> float:
        return 2.0 * max(self.half_lengths)


@dataclass(frozen=True)
class TwoStateParams:
    """Two orientations separated by angle alpha in (0, pi).

    Orientation "0" has half length r0 and probability p; the other has half
    length r_alpha and probability q = 1 - p.
    """

    alpha: float
    r0: float
    r_alpha: float
    p: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < math.pi):
            raise FormulaError("alpha must lie in (0, pi)")
        if self.r0 <= 0.0 or self.r_alpha <= 0.0:
            raise FormulaError("half lengths must be positive")
        if not (0.0 < self.p < 1.0):
            raise FormulaError("p must lie in (0, 1)")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def contact_area(self) -> float:
        """Area of the mixed contact box, 4 r0 r_alpha sin(alpha)."""
        return 4.0 * self.r0 * self.r_alpha * math.sin(self.alpha)

    def to_marks(self) -> MarkLaw:
        return MarkLaw((0.0, self.alpha), (self.r0, self.r_alpha), (self.p, self.q))

    @classmethod
    def from_marks(cls, marks: MarkLaw) -> "TwoStateParams":
        if marks.d != 2:
            raise FormulaError("need exactly two orientations")
        gap = marks.angles[1] - marks.angles[0]
        return cls(gap, marks.half_lengths[0], marks.half_lengths[1], marks.probs[0])


@dataclass(frozen=True)
class ThreeStateParams:
    """Orientations 0 < alpha < beta < pi with half lengths and probabilities."""

    alpha: float
    beta: float
    r0: float
    r_alpha: float
    r_beta: float
    p0: float
    p_alpha: float
    p_beta: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < self.beta < math.pi):
            raise FormulaError("need 0 < alpha < beta < pi")
        if min(self.r0, self.r_alpha, self.r_beta) <= 0.0:
            raise FormulaError("half lengths must be positive")
        if min(self.p0, self.p_alpha, self.p_beta) < 0.0:
            raise FormulaError("probabilities must be >= 0")
        if abs(self.p0 + self.p_alpha + self.p_beta - 1.0) > _PROB_TOL:
            raise FormulaError("probabilities must sum to 1")

    @property
    def dirs(self) -> DirPair:
        return DirPair(self.alpha, self.beta)

    @property
    def probs(self) -> tuple[float, float, float]:
        return (self.p0, self.p_alpha, self.p_beta)

    @property
    def half_lengths(self) -> tuple[float, float, float]:
        return (self.r0, self.r_alpha, self.r_beta)

    @property
    def angles(self) -> tuple[float, float, float]:
        return (0.0, self.alpha, self.beta)

    def to_marks(self) -> MarkLaw:
        return MarkLaw(self.angles, self.half_lengths, self.probs)

    @classmethod
    def from_marks(cls, marks: MarkLaw) -> "ThreeStateParams":
        if marks.d != 3:
            raise FormulaError("need exactly three orientations")
        a0 = marks.angles[0]
        return cls(
            marks.angles[1] - a0,
            marks.angles[2] - a0,
            *marks.half_lengths,
            *marks.probs,
        )


@dataclass(frozen=True)
class ParamsH:
    """Derived skew units: c and the per-orientation reach scales.

    c = sin(alpha) sin(beta) sin(beta - alpha) is the product of the sines of
    the three pairwise gaps; h0, h_alpha, h_beta are each orientation's half
    length divided by the sine of the gap between the OTHER two orientations;
    a = h_alpha / h0 and b = h_beta / h0.
    """

    c: float
    h0: float
    h_alpha: float
    h_beta: float
    a: float
    b: float


@dataclass(frozen=True)
class RegimeVerdict:
    """Outcome of the large-intensity regime classification.

    survivors: orientation-index pairs (i, j) achieving the minimal rate;
    rates[j] is the exponential rate (in units of 4 c lambda) of compositions
    avoiding orientation j; fixation means the surviving pair's reach scales
    coincide and stay within twice the absent orientation's scale, so cluster
    geometry collapses to a point at the leading order.
    """

    survivors: tuple[tuple[int, int], ...]
    fixation: bool
    case_label: str
    rates: tuple[float, float, float]


@dataclass(frozen=True)
class CompositionLaw:
    """Limit law of cluster composition (k needles of orientation 0, m-k other)."""

    m: int
    weights: dict[tuple[int, int], float]


# ----------------------------------------------------------------------------
# derived units and pair-union areas


def h_units(params: ThreeStateParams) -> ParamsH:
    """Derived skew units (c, h0, h_alpha, h_beta, a, b) of a 3-orientation model."""
    sa = math.sin(params.alpha)
    sb = math.sin(params.beta)
    sg = math.sin(params.beta - params.alpha)
    c = sa * sb * sg
    h0 = params.r0 / sg
    ha = params.r_alpha / sb
    hb = params.r_beta / sa
    return ParamsH(c, h0, ha, hb, ha / h0, hb / h0)


def contact_pair_union_area(h0: float, h_alpha: float, h_beta: float, c: float) -> float:
    """Area of the union of the two contact boxes sharing direction 0.

    In skew units the box against orientation alpha occupies
    |h_beta| <= h0, |h_bar0| <= h_alpha, and the box against beta occupies
    |h_alpha| <= h0, |h_bar0| <= h_beta; both contain the origin, and their
    union area has the closed form

        4 c h0 (h_alpha + h_beta - h0)                 if min > 2 h0,
        c (4 h0 max(h_alpha, h_beta) + min(...)^2)     otherwise,

    the two branches agreeing on the boundary min = 2 h0.
    """
    if min(h0, h_alpha, h_beta) <= 0.0 or c <= 0.0:
        raise FormulaError("h units and c must be positive")
    lo = min(h_alpha, h_beta)
    hi = max(h_alpha, h_beta)
    if lo > 2.0 * h0:
        return 4.0 * c * h0 * (h_alpha + h_beta - h0)
    return c * (4.0 * h0 * hi + lo * lo)


def _pair_boxes(params: ThreeStateParams, shift: Vec2 = (0.0, 0.0)):
    """The two contact boxes sharing direction 0, with the beta box at ``shift``."""
    box_a = SkewBox((0.0, 0.0), DirPair(0.0, params.alpha), params.r0, params.r_alpha)
    box_b = SkewBox(shift, DirPair(0.0, params.beta), params.r0, params.r_beta)
    return box_a, box_b


def shift_excess(x: Vec2, params: ThreeStateParams) -> float:
    """Excess (1/c) {|A union B(x)| - |A union B(0)|} of the shifted pair union.

    A is the contact box pairing direction 0 with alpha and B the one pairing
    0 with beta; B is translated to x.  The excess vanishes exactly on the
    free box (see :func:`free_box_halflengths`), grows quadratically near it,
    and is evaluated in closed form inside the coordinate box
    |h_alpha| <= h_alpha-unit, |h_beta| <= h_beta-unit, falling back to exact
    polygon union outside.
    """
    hu = h_units(params)
    hc = geometry.h_coords(x, params.dirs)
    if abs(hc.h_alpha) <= hu.h_alpha and abs(hc.h_beta) <= hu.h_beta:
        val = _shift_excess_h(hc.h_alpha, hc.h_beta, hu.h0, hu.h_alpha, hu.h_beta)
        return max(val, 0.0)
    box_a, box_b = _pair_boxes(params, shift=x)
    base = contact_pair_union_area(hu.h0, hu.h_alpha, hu.h_beta, hu.c)
    shifted = geometry.union_area(
        [geometry.skewbox_polygon(box_a), geometry.skewbox_polygon(box_b)]
    )
    return max((shifted - base) / hu.c, 0.0)


def _shift_excess_h(ha: float, hb: float, h0: float, cap_a: float, cap_b: float) -> float:
    """Closed-form shifted-union excess in skew coordinates, |ha|<=cap_a, |hb|<=cap_b."""
    if 2.0 * h0 < min(cap_a, cap_b):
        d1 = max(-ha + 2.0 * h0 - cap_a, hb + 2.0 * h0 - cap_b, 0.0)
        d2 = max(ha + 2.0 * h0 - cap_a, -hb + 2.0 * h0 - cap_b, 0.0)
        return 0.5 * (d1 * d1 + d2 * d2)
    if cap_a < cap_b:
        # the formulas below assume cap_a >= cap_b; the configuration is
        # symmetric under swapping the two roles
        return _shift_excess_h(hb, ha, h0, cap_b, cap_a)
    hbar = ha + hb
    t = 2.0 * h0 - cap_b  # >= 0 in this branch
    gap = cap_a - cap_b
    if abs(hbar) <= gap:
        if abs(hb) <= t:
            return hb * hb
        return hb * hb - 0.5 * (abs(hb) - t) ** 2
    e = abs(hbar) - gap
    if abs(hb) <= t:
        sgn_bar = 1.0 if hbar > 0 else -1.0
        return hb * hb + 0.5 * e * e + (t - sgn_bar * hb) * e
    if hbar * hb > 0:
        sgn_b = 1.0 if hb > 0 else -1.0
        bump = max(2.0 * h0 - cap_a + sgn_b * ha, 0.0)
        return hb * hb - 0.5 * (abs(hb) - t) ** 2 + 0.5 * bump * bump
    return hb * hb - 0.5 * (abs(hb) - t) ** 2 + e * (t + abs(hb) + 0.5 * e)


def free_box_halflengths(params: ThreeStateParams) -> tuple[float, float]:
    """Half lengths (along e_alpha, e_beta) of the box where shift_excess is 0."""
    hu = h_units(params)
    sb = math.sin(params.beta)
    sa = math.sin(params.alpha)
    if 2.0 * hu.h0 < min(hu.h_alpha, hu.h_beta):
        return (sb * (hu.h_alpha - 2.0 * hu.h0), sa * (hu.h_beta - 2.0 * hu.h0))
    return (sb * max(hu.h_alpha - hu.h_beta, 0.0), sa * max(hu.h_beta - hu.h_alpha, 0.0))


# ----------------------------------------------------------------------------
# spread sandwich bounds


def spread_excess_bounds(
    dirs: DirPair,
    half_a: float,
    half_b: float,
    comps_a: Sequence[float],
    comps_b: Sequence[float],
) -> tuple[float, float, float]:
    """Sandwich bounds (lower1, lower2, upper) for the union excess of
    translated boxes in terms of the coordinate spreads of their centers.

    The boxes share direction pair ``dirs`` and half extents (half_a, half_b);
    (comps_a[i], comps_b[i]) are each center's components in the (e_alpha,
    e_beta) basis.  With J = sin(beta - alpha), Ma/Mb the spreads, the union
    area minus one box area satisfies

        J (half_a Mb + half_b Ma)                        <= excess   (lower1)
        2 J (half_a Mb + half_b Ma) - J Ma Mb            <= excess   (lower2,
                                              valid when the union is connected)
        excess <= 2 J (half_a Mb + half_b Ma) + J Ma Mb             (upper)

    where the excess is |union of the translates| - 4 half_a half_b J.
    """
    if len(comps_a) != len(comps_b):
        raise FormulaError("component lists must have equal length")
    ma = geometry.max_spread(comps_a)
    mb = geometry.max_spread(comps_b)
    j = math.sin(dirs.gap)
    base = j * (half_a * mb + half_b * ma)
    upper = 2.0 * base + j * ma * mb
    lower2 = upper - 2.0 * j * ma * mb
    return (base, lower2, upper)


def _pinned_h_config(points: Sequence[Vec2], dirs: DirPair):
    pts = [(float(x), float(y)) for x, y in points]
    if not pts:
        raise FormulaError("configuration must be non-empty")
    if pts[-1] != (0.0, 0.0):
        raise FormulaError("configuration must be pinned: last point at the origin")
    hs = [geometry.h_coords(p, dirs) for p in pts]
    return pts, hs


def _group_excess(dirs: DirPair, half_a: float, half_b: float, centers) -> float:
    union = geometry.union_area_same_dirs(dirs, half_a, half_b, centers)
    single = 4.0 * half_a * half_b * math.sin(dirs.gap)
    return union - single


def two_group_excess_bounds(
    case: str,
    config_a: Sequence[Vec2],
    config_b: Sequence[Vec2],
    params: ThreeStateParams,
) -> tuple[float, float]:
    """Sandwich bounds for the two-group pair-union excess.

    config_a are centers of boxes pairing 0 with alpha, config_b of boxes
    pairing 0 with beta (both pinned: last center at the origin).  The target
    quantity is (1/c) {|A-boxes union B-boxes| - |A(0) union B(0)|}.  Three
    regimes, selected by ``case``:

      "i":   2 h0 < h_alpha, h_beta;  spreads must fit in the free box,
      "ii":  2 h0 >= min and the two reach scales differ,
      "iii": 2 h0 >= h_alpha = h_beta,

    each with spread-smallness hypotheses; violations raise HypothesisError.
    The bounds reduce the two-group excess to single-direction union excesses
    of shrunken boxes plus explicit spread cross terms.
    """
    if case not in ("i", "ii", "iii"):
        raise FormulaError(f"unknown case {case!r}")
    hu = h_units(params)
    if case == "ii" and hu.h_beta > hu.h_alpha:
        # the asymmetric case is stated with alpha carrying the larger reach;
        # reflecting across the vertical axis swaps the two roles exactly
        return two_group_excess_bounds(
            "ii",
            [_mirror_point(p) for p in config_b],
            [_mirror_point(p) for p in config_a],
            _swap_roles(params),
        )
    dirs = params.dirs
    sa, sb, sg = math.sin(params.alpha), math.sin(params.beta), math.sin(dirs.gap)
    _, hs_a = _pinned_h_config(config_a, dirs)
    _, hs_b = _pinned_h_config(config_b, dirs)
    ma_x = geometry.max_spread([h.h_alpha for h in hs_a])
    mb_x = geometry.max_spread([h.h_beta for h in hs_a])
    ma_y = geometry.max_spread([h.h_alpha for h in hs_b])
    mb_y = geometry.max_spread([h.h_beta for h in hs_b])
    h0, ha, hb = hu.h0, hu.h_alpha, hu.h_beta

    if case == "i":
        if not (2.0 * h0 < min(ha, hb)):
            raise HypothesisError("case i needs 2 h0 < h_alpha and 2 h0 < h_beta")
        if not (ma_x + ma_y < ha - 2.0 * h0 and mb_x + mb_y < hb - 2.0 * h0):
            raise HypothesisError("spreads too large for case i bounds")
        exc_a = _group_excess(
            DirPair(0.0, params.alpha), params.r0, params.r_alpha - h0 * sb, config_a
        )
        exc_b = _group_excess(
            DirPair(0.0, params.beta), params.r0, params.r_beta - h0 * sa, config_b
        )
        core = (exc_a + exc_b) / hu.c
        return (core - ma_y * mb_x, core)

    if case == "ii":
        if not (2.0 * h0 >= hb and ha > hb):
            raise HypothesisError("case ii needs 2 h0 >= h_beta and h_alpha > h_beta")
        if not (ma_x + ma_y < ha - hb and mb_x + mb_y < hb):
            raise HypothesisError("spreads too large for case ii bounds")
        exc_a = _group_excess(
            DirPair(0.0, params.alpha),
            params.r0,
            params.r_alpha - 0.5 * hb * sb,
            config_a,
        )
        exc_b = _group_excess(
            DirPair(0.0, params.beta), 0.5 * hb * sg, 0.5 * params.r_beta, config_b
        )
        core = (exc_a + exc_b) / hu.c
        # beta-offsets of either group cost corner triangles (one per group);
        # alpha-by-beta offsets within a group add a staircase overlap term
        upper = core + 0.5 * mb_x**2 + 0.5 * mb_y**2 + ma_x * mb_x + ma_y * mb_y
        lower = core - mb_x * mb_y - mb_x * ma_y - mb_x**2 - ma_y**2
        return (lower, upper)

    # case iii
    if not (2.0 * h0 >= ha and _close(ha, hb)):
        raise HypothesisError("case iii needs 2 h0 >= h_alpha = h_beta")
    if not (ma_x + ma_y < ha and mb_x + mb_y < hb):
        raise HypothesisError("spreads too large for case iii bounds")
    exc_a = _group_excess(
        DirPair(0.0, params.alpha), 0.5 * ha * sg, 0.5 * params.r_alpha, config_a
    )
    exc_b = _group_excess(
        DirPair(0.0, params.beta), 0.5 * hb * sg, 0.5 * params.r_beta, config_b
    )
    mbar_all = geometry.max_spread([h.h_bar0 for h in hs_a] + [h.h_bar0 for h in hs_b])
    mbar_x = geometry.max_spread([h.h_bar0 for h in hs_a])
    mbar_y = geometry.max_spread([h.h_bar0 for h in hs_b])
    core = (exc_a + exc_b) / hu.c + (2.0 * h0 - hb) * mbar_all
    # corner triangles in the costly direction of each group, per-group
    # staircase terms, and a cross term for the two diagonal-sum windows
    # moving the same way
    upper = (
        core
        + 0.5 * (mb_x + ma_y) ** 2
        + ma_x * mb_x
        + ma_y * mb_y
        + min(mbar_x, mbar_y) * (mbar_x + mbar_y)
    )
    lower = core - 0.5 * mbar_all**2 - min(mbar_x, mbar_y) * (mb_x + ma_y)
    return (lower, upper)


def _swap_roles(params: ThreeStateParams) -> ThreeStateParams:
    """Mirror a three-orientation model so alpha and beta swap roles.

    Reflecting across the vertical axis maps angle t to pi - t, which fixes
    the set {0} and swaps the other two orientations while preserving all
    pairwise gaps, areas, and probabilities.
    """
    return ThreeStateParams(
        math.pi - params.beta,
        math.pi - params.alpha,
        params.r0,
        params.r_beta,
        params.r_alpha,
        params.p0,
        params.p_beta,
        params.p_alpha,
    )


def _close(x: float, y: float, tol: float = 1e-12) -> bool:
    return abs(x - y) <= tol * max(abs(x), abs(y), 1.0)


def shifted_excess_check(
    case: str,
    config_a: Sequence[Vec2],
    config_b: Sequence[Vec2],
    u: Vec2,
    params: ThreeStateParams,
    tol: float = 1e-9,
) -> bool:
    """Verify the shift-stability relation for the two-group excess.

    Compares Delta(x, y | u), where the whole second group is additionally
    translated by u, against Delta(x, y):

      case "i":   the two agree exactly,
      case "ii":  they differ by at most h_beta(u)^2 plus a cross term
                  |h_beta(u)| times the combined beta spreads,
      case "iii": after removing the explicit (2 h0 - h_beta) correction
                  driven by the h_bar0 spreads, the difference is controlled
                  by h_alpha(u)^2 + h_beta(u)^2 plus spread cross terms.

    Hypotheses (the group spreads plus |h(u)| must fit the case windows) are
    enforced; violations raise HypothesisError.  Both sides are evaluated
    with the exact polygon-union engine, so this is a genuine check, not a
    tautology.
    """
    if case not in ("i", "ii", "iii"):
        raise FormulaError(f"unknown case {case!r}")
    hu = h_units(params)
    dirs = params.dirs
    if case == "ii" and hu.h_beta > hu.h_alpha:
        # mirror across the vertical axis: groups swap, the group shift u
        # becomes -u reflected (the reflected base pair keeps its own shift)
        return shifted_excess_check(
            "ii",
            [_mirror_point(p) for p in config_b],
            [_mirror_point(p) for p in config_a],
            (u[0], -u[1]),
            _swap_roles(params),
            tol,
        )
    pts_a, hs_a = _pinned_h_config(config_a, dirs)
    pts_b, hs_b = _pinned_h_config(config_b, dirs)
    hu_vec = geometry.h_coords(u, dirs)
    ma_x = geometry.max_spread([h.h_alpha for h in hs_a])
    mb_x = geometry.max_spread([h.h_beta for h in hs_a])
    ma_y = geometry.max_spread([h.h_alpha for h in hs_b])
    mb_y = geometry.max_spread([h.h_beta for h in hs_b])
    h0, ha, hb = hu.h0, hu.h_alpha, hu.h_beta

    if case == "i":
        if not (2.0 * h0 < min(ha, hb)):
            raise HypothesisError("case i needs 2 h0 < h_alpha and 2 h0 < h_beta")
        if not (
            ma_x + ma_y + abs(hu_vec.h_alpha) < ha - 2.0 * h0
            and mb_x + mb_y + abs(hu_vec.h_beta) < hb - 2.0 * h0
        ):
            raise HypothesisError("spreads plus shift too large for case i")
    elif case == "ii":
        if not (2.0 * h0 >= hb and ha > hb):
            raise HypothesisError("case ii needs 2 h0 >= h_beta and h_alpha > h_beta")
        if not (
            ma_x + ma_y + abs(hu_vec.h_alpha) < ha - hb
            and mb_x + mb_y + abs(hu_vec.h_beta) < hb
        ):
            raise HypothesisError("spreads plus shift too large for case ii")
    else:
        if not (2.0 * h0 >= ha and _close(ha, hb)):
            raise HypothesisError("case iii needs 2 h0 >= h_alpha = h_beta")
        if not (
            ma_x + ma_y + abs(hu_vec.h_alpha) < ha
            and mb_x + mb_y + abs(hu_vec.h_beta) < hb
        ):
            raise HypothesisError("spreads plus shift too large for case iii")

    d_u = _two_group_delta(pts_a, pts_b, u, params, hu)
    d_0 = _two_group_delta(pts_a, pts_b, (0.0, 0.0), params, hu)

    if case == "i":
        return abs(d_u - d_0) <= tol
    if case == "ii":
        allowed = hu_vec.h_beta**2 + (abs(hu_vec.h_alpha) + abs(hu_vec.h_beta)) * (
            ma_x + mb_x + ma_y + mb_y
        )
        return abs(d_u - d_0) <= allowed + tol
    hbar_xy = geometry.max_spread([h.h_bar0 for h in hs_a] + [h.h_bar0 for h in hs_b])
    shifted_bars = [h.h_bar0 for h in hs_a] + [h.h_bar0 + hu_vec.h_bar0 for h in hs_b]
    hbar_xyu = geometry.max_spread(shifted_bars)
    corr = hbar_xyu - abs(hu_vec.h_bar0) - hbar_xy
    lhs = abs(d_u - d_0 - (2.0 * h0 - hb) * corr)
    rhs = (
        hu_vec.h_alpha**2
        + hu_vec.h_beta**2
        + abs(corr)
        * (ma_x + ma_y + abs(hu_vec.h_alpha) + mb_x + mb_y + abs(hu_vec.h_beta))
        + (abs(hu_vec.h_alpha) + abs(hu_vec.h_beta)) * (ma_x + mb_x + ma_y + mb_y)
    )
    return lhs <= rhs + tol


def _mirror_point(x: Vec2) -> Vec2:
    return (-x[0], x[1])


def _two_group_delta(pts_a, pts_b, u: Vec2, params: ThreeStateParams, hu: ParamsH) -> float:
    """(1/c){|A(x) union B(y + u)| - |A(0) union B(u)|} via exact polygon union."""
    polys = [
        geometry.skewbox_polygon(
            SkewBox(p, DirPair(0.0, params.alpha), params.r0, params.r_alpha)
        )
        for p in pts_a
    ] + [
        geometry.skewbox_polygon(
            SkewBox((p[0] + u[0], p[1] + u[1]), DirPair(0.0, params.beta), params.r0, params.r_beta)
        )
        for p in pts_b
    ]
    big = geometry.union_area(polys)
    base_polys = [
        geometry.skewbox_polygon(
            SkewBox((0.0, 0.0), DirPair(0.0, params.alpha), params.r0, params.r_alpha)
        ),
        geometry.skewbox_polygon(
            SkewBox(u, DirPair(0.0, params.beta), params.r0, params.r_beta)
        ),
    ]
    base = geometry.union_area(base_polys)
    return (big - base) / hu.c


# ----------------------------------------------------------------------------
# vacancy rates and the regime classifier


def _h_triple(params: ThreeStateParams) -> tuple[float, float, float]:
    hu = h_units(params)
    return (hu.h0, hu.h_alpha, hu.h_beta)


def rate_exponent(params: ThreeStateParams, absent: int) -> float:
    """Exponential rate (units of 4 c lambda) of compositions avoiding ``absent``.

    With x the absent orientation and (y, z) the present ones, in reach units

        rate = p_x u(h_x; h_y, h_z) + (1 - p_x) h_y h_z,
        u = h_x (h_y + h_z - h_x)                  if min(h_y, h_z) > 2 h_x,
            h_x max(h_y, h_z) + min(h_y, h_z)^2/4  otherwise,

    which is (1/4c) times the vacancy exponent.  Smaller rate means the pair
    (y, z) dominates cluster compositions at large intensity.
    """
    if absent not in (0, 1, 2):
        raise FormulaError("absent orientation index must be 0, 1 or 2")
    hs = _h_triple(params)
    ps = params.probs
    hx = hs[absent]
    hy, hz = (hs[i] for i in range(3) if i != absent)
    px = ps[absent]
    if min(hy, hz) > 2.0 * hx:
        u = hx * (hy + hz - hx)
    else:
        u = hx * max(hy, hz) + min(hy, hz) ** 2 / 4.0
    return px * u + (1.0 - px) * hy * hz


def vacancy_exponent(params: ThreeStateParams, absent: int) -> float:
    """Coefficient of -lambda in the probability of compositions avoiding ``absent``."""
    hu = h_units(params)
    return 4.0 * hu.c * rate_exponent(params, absent)


def l1_threshold(p0: float, p_alpha: float, p_beta: float) -> float:
    """Fixation threshold for equal reach scales below the common one."""
    pmin = min(p_alpha, p_beta)
    return 4.0 * (1.0 - p0) / (4.0 - 3.0 * p0 - pmin)


def l2_threshold(p0: float, p_alpha: float, p_beta: float) -> float:
    """Fixation threshold for equal reach scales above the common one."""
    pmax = max(p_alpha, p_beta)
    pmin = min(p_alpha, p_beta)
    disc = 4.0 * pmax * pmax + 4.0 * p_alpha * p_beta + p0 * pmin
    return (2.0 * pmax + math.sqrt(disc)) / (4.0 * pmax + p0)


def classify_regime(params: ThreeStateParams, tie_tol: float = 1e-9) -> RegimeVerdict:
    """Which orientation pair dominates large-intensity cluster compositions.

    Computes the three per-absent-orientation rates and keeps the argmin set
    (ties within tie_tol, relative).  The case label records where the
    normalized reach pair (a, b) = (h_alpha/h0, h_beta/h0) falls:

      region 1: a, b >= 2              labels 1i/1ii/1iii by rate tie count
      region 2: 1/2 < min < 2, a != b, a, b != 1   labels 2i/2ii/2iii likewise
      region 3: a = b < 1              3i (p0 <= min p), else 3ii-fix/3ii-nofix
                                       split at a = l1_threshold
      region 4: 1 < a = b < 2          4ii (min p <= p0), else 4i-fix/4i-nofix
                                       split at a = l2_threshold
      region 5: a = b = 1              labels 5i/5ii/5iii by rate tie count

    Anything else is labelled "reduced" (the triple is equivalent, after
    renormalizing by another orientation's reach, to one of the regions; the
    survivors and fixation flags are computed from the rates either way).
    """
    if tie_tol < 0.0:
        raise FormulaError("tie_tol must be >= 0")
    hs = _h_triple(params)
    rates = tuple(rate_exponent(params, j) for j in range(3))
    scale = max(rates)
    rmin = min(rates)
    absent_set = [j for j in range(3) if rates[j] - rmin <= tie_tol * scale]
    survivors = tuple(
        sorted(tuple(i for i in range(3) if i != j) for j in absent_set)
    )

    hscale = max(hs)

    def pair_fixates(absent: int) -> bool:
        hx = hs[absent]
        hy, hz = (hs[i] for i in range(3) if i != absent)
        return (
            abs(hy - hz) <= tie_tol * hscale
            and min(hy, hz) <= 2.0 * hx + tie_tol * hscale
        )

    fixation = all(pair_fixates(j) for j in absent_set)

    a, b = hs[1] / hs[0], hs[2] / hs[0]
    ties = len(absent_set)
    sub = {1: "i", 2: "ii", 3: "iii"}[ties]

    def eq(x: float, y: float) -> bool:
        return abs(x - y) <= tie_tol * max(abs(x), abs(y), 1.0)

    label = "reduced"
    if eq(a, b):
        if eq(a, 1.0):
            label = f"5{sub}"
        elif a < 1.0:
            if params.p0 <= min(params.p_alpha, params.p_beta) + tie_tol:
                label = "3i"
            elif a < l1_threshold(params.p0, params.p_alpha, params.p_beta):
                label = "3ii-fix"
            else:
                label = "3ii-nofix"
        elif a < 2.0 and not eq(a, 2.0):
            if min(params.p_alpha, params.p_beta) <= params.p0 + tie_tol:
                label = "4ii"
            elif a < l2_threshold(params.p0, params.p_alpha, params.p_beta):
                label = "4i-fix"
            else:
                label = "4i-nofix"
        else:
            label = f"1{sub}"
    else:
        lo, hi = min(a, b), max(a, b)
        if lo >= 2.0 or eq(lo, 2.0):
            label = f"1{sub}"
        elif lo > 0.5 and not eq(lo, 0.5) and not eq(a, 1.0) and not eq(b, 1.0):
            label = f"2{sub}"
    return RegimeVerdict(survivors, fixation, label, rates)


# ----------------------------------------------------------------------------
# spread-weight integrals


def spread_weight(c1: float, c2: float, c3: float, u: Sequence[Vec2]) -> float:
    """exp(-(c1 M(u1) + c2 M(u2) + c3 M(u1 + u2))) for a pinned configuration.

    u is the full coordinate tuple with the last element at the origin; M is
    the coordinate spread (max minus min) of first components, second
    components, and their sums.
    """
    pts = [(float(a), float(b)) for a, b in u]
    if not pts:
        raise FormulaError("configuration must be non-empty")
    if pts[-1] != (0.0, 0.0):
        raise FormulaError("configuration must be pinned: last point at the origin")
    m1 = geometry.max_spread([p[0] for p in pts])
    m2 = geometry.max_spread([p[1] for p in pts])
    m3 = geometry.max_spread([p[0] + p[1] for p in pts])
    return math.exp(-(c1 * m1 + c2 * m2 + c3 * m3))


def spread_integral(
    c1: float,
    c2: float,
    c3: float,
    k: int,
    budget: int = 200_000,
    seed: int = 0,
    force_mc: bool = False,
) -> tuple[float, float]:
    """G^k(c1, c2, c3) = (1/k!)^2 * integral of the spread weight over k-1 free points.

    For c3 = 0 the integral factorizes and has the closed form
    (c1 c2)^(1-k) (stderr 0); G^1 is identically 1.  Otherwise importance
    sampling with per-coordinate Laplace proposals of rate 2 c_i / (k + 1)
    (heavier-tailed than the integrand by enough that the weight has finite
    variance for every k).  Returns (value, stderr).
    """
    if not (isinstance(k, int) and k >= 1):
        raise FormulaError("k must be a positive integer")
    if c1 <= 0.0 or c2 <= 0.0:
        raise FormulaError("c1 and c2 must be positive")
    if c3 < 0.0:
        raise FormulaError("c3 must be >= 0")
    if k == 1:
        return (1.0, 0.0)
    if c3 == 0.0 and not force_mc:
        return ((c1 * c2) ** (1 - k), 0.0)
    if budget < 1000:
        raise FormulaError("budget too small for a meaningful estimate")
    n_free = k - 1
    scale1 = (k + 1) / (2.0 * c1)
    scale2 = (k + 1) / (2.0 * c2)
    norm = 1.0 / float(math.factorial(k)) ** 2
    chunk = 1 << 19
    total = 0.0
    total_sq = 0.0
    drawn = 0
    stream = 0
    while drawn < budget:
        n = min(chunk, budget - drawn)
        rng = np.random.Generator(np.random.Philox(key=[seed & (2**63 - 1), stream]))
        a = rng.laplace(0.0, scale1, size=(n, n_free))
        b = rng.laplace(0.0, scale2, size=(n, n_free))
        m1 = np.maximum(a.max(axis=1), 0.0) - np.minimum(a.min(axis=1), 0.0)
        m2 = np.maximum(b.max(axis=1), 0.0) - np.minimum(b.min(axis=1), 0.0)
        s = a + b
        m3 = np.maximum(s.max(axis=1), 0.0) - np.minimum(s.min(axis=1), 0.0)
        log_g = -(np.abs(a).sum(axis=1) / scale1 + np.abs(b).sum(axis=1) / scale2)
        log_g -= n_free * (math.log(2.0 * scale1) + math.log(2.0 * scale2))
        log_f = -(c1 * m1 + c2 * m2 + c3 * m3)
        w = np.exp(log_f - log_g)
        total += float(w.sum())
        total_sq += float((w * w).sum())
        drawn += n
        stream += 1
    mean = total / drawn
    var = max(total_sq / drawn - mean * mean, 0.0)
    return (norm * mean, norm * math.sqrt(var / drawn))


# ----------------------------------------------------------------------------
# cluster probability asymptotics


def two_state_cluster_prob(k: int, l: int, lam: float, params: TwoStateParams) -> float:
    """Large-intensity probability of a cluster with k + l needles (two orientations).

    Evaluates, in log space,

        (1/(lam |B|))^(m-3) e^(-lam |B|) (p q)^(-2(m-1)) m p^(3k) k! q^(3l) l!

    with m = k + l and |B| the mixed contact box area.  Valid as written for
    lam |B| large; exact in the constant for m = 2.
    """
    if k < 1 or l < 1:
        raise FormulaError("both orientation counts must be >= 1")
    if lam <= 0.0:
        raise FormulaError("lambda must be positive")
    m = k + l
    area = params.contact_area
    lp, lq = math.log(params.p), math.log(params.q)
    logv = (
        -(m - 3) * math.log(lam * area)
        - lam * area
        - 2.0 * (m - 1) * (lp + lq)
        + math.log(m)
        + 3.0 * k * lp
        + lgamma(k + 1)
        + 3.0 * l * lq
        + lgamma(l + 1)
    )
    return math.exp(logv)


def composition_limit(m: int, p: float) -> CompositionLaw:
    """Limit composition law of size-m clusters in a two-orientation model.

    Weights of (k, m - k), k = 1..m-1, are proportional to
    p^(3k) k! q^(3(m-k)) (m-k)!; normalized in log space.
    """
    if m < 2:
        raise FormulaError("composition needs m >= 2")
    if not (0.0 < p < 1.0):
        raise FormulaError("p must lie in (0, 1)")
    q = 1.0 - p
    logs = {}
    for k in range(1, m):
        logs[(k, m - k)] = (
            3.0 * k * math.log(p)
            + lgamma(k + 1)
            + 3.0 * (m - k) * math.log(q)
            + lgamma(m - k + 1)
        )
    top = max(logs.values())
    weights = {key: math.exp(v - top) for key, v in logs.items()}
    z = sum(weights.values())
    return CompositionLaw(m, {key: w / z for key, w in weights.items()})


def entropy_rate(s: float, p: float) -> float:
    """Large-m rate of log-probability for composition fraction s (orientation 0).

    s log s + (1-s) log(1-s) plus the orientation penalty
    3 (1-s) log(q/p) if p > q, 3 s log(p/q) if p < q, and 0 at p = q.
    Conventions: 0 log 0 = 0.
    """
    if not (0.0 <= s <= 1.0):
        raise FormulaError("s must lie in [0, 1]")
    if not (0.0 < p < 1.0):
        raise FormulaError("p must lie in (0, 1)")
    q = 1.0 - p

    def xlogx(t: float) -> float:
        return t * math.log(t) if t > 0.0 else 0.0

    h = xlogx(s) + xlogx(1.0 - s)
    if p > q:
        h += 3.0 * (1.0 - s) * math.log(q / p)
    elif p < q:
        h += 3.0 * s * math.log(p / q)
    return h


def _present_roles(params: ThreeStateParams, kvec: Sequence[int]):
    """Split a one-absent-orientation composition into (absent, (y, z)) roles."""
    kv = tuple(int(v) for v in kvec)
    if len(kv) != 3 or any(v < 0 for v in kv):
        raise FormulaError("kvec must be three non-negative counts")
    zeros = [i for i, v in enumerate(kv) if v == 0]
    if len(zeros) != 1:
        raise FormulaError("composition must use exactly two orientations (one zero count)")
    absent = zeros[0]
    present = [i for i in range(3) if i != absent]
    if any(kv[i] < 1 for i in present):
        raise FormulaError("present orientations need at least one needle each")
    return kv, absent, present


def cluster_decay_power(params: ThreeStateParams, kvec: Sequence[int]) -> float:
    """Power of 1/lambda in the three-orientation cluster prefactor.

    |k| - 3 when both present reach scales exceed twice the absent one,
    |k| - 5/2 when they differ with the smaller within reach,
    |k| - 2 when both equal exactly twice the absent scale.
    """
    kv, absent, present = _present_roles(params, kvec)
    hs = _h_triple(params)
    hx = hs[absent]
    hy, hz = hs[present[0]], hs[present[1]]
    total = sum(kv)
    if _close(hy, hz):
        if _close(2.0 * hx, hy):
            return total - 2.0
        if 2.0 * hx < hy:
            return total - 3.0
        raise UnsupportedRegimeError(
            "equal reach scales strictly below twice the absent scale have no closed form"
        )
    if 2.0 * hx < min(hy, hz):
        return total - 3.0
    return total - 2.5


def three_state_cluster_prob(
    params: ThreeStateParams,
    kvec: Sequence[int],
    lam: float,
    g_budget: int = 200_000,
    g_seed: int = 0,
) -> float:
    """Large-intensity probability of a composition avoiding one orientation.

    kvec holds the per-orientation needle counts (exactly one must be zero).
    The value is exp(-lambda Phi) times an algebraic prefactor in
    1/(4 c lambda) whose power and constants depend on how the two present
    reach scales compare with twice the absent one; the spread integrals G^k
    enter with coefficients mixing the probabilities and reach scales.  The
    regime with both present scales equal and strictly below twice the absent
    one is not implemented (no closed form) and raises UnsupportedRegimeError.
    """
    if lam <= 0.0:
        raise FormulaError("lambda must be positive")
    if min(params.probs) <= 0.0:
        raise FormulaError("asymptotics need strictly positive orientation probabilities")
    kv, absent, present = _present_roles(params, kvec)
    hu = h_units(params)
    hs = _h_triple(params)
    ps = params.probs
    hx, px = hs[absent], ps[absent]
    i, j = present
    # the asymmetric regime is written for the larger present scale first
    if hs[i] >= hs[j]:
        y, z = i, j
    else:
        y, z = j, i
    hy, hz = hs[y], hs[z]
    py, pz = ps[y], ps[z]
    ky, kz = kv[y], kv[z]
    total = ky + kz
    c = hu.c
    phi = vacancy_exponent(params, absent)
    log_base = -math.log(4.0 * c * lam)

    if _close(hy, hz) and _close(2.0 * hx, hy):
        power = total - 2.0
        const = math.log((3.0 * math.pi + 4.0) / (2.0 * px))
        gy, _ = spread_integral((px + 2.0 * pz) * hx, 2.0 * pz * hx, px * hx, ky,
                                budget=g_budget, seed=g_seed)
        gz, _ = spread_integral(2.0 * py * hx, (px + 2.0 * py) * hx, px * hx, kz,
                                budget=g_budget, seed=g_seed + 1)
    elif 2.0 * hx < hz and not _close(2.0 * hx, hz):
        power = total - 3.0
        const = math.log(hy * hz * (hy - 2.0 * hx) * (hz - 2.0 * hx))
        gy, _ = spread_integral(px * hx + pz * hz, pz * hy, px * (hy - hx), ky,
                                budget=g_budget, seed=g_seed)
        gz, _ = spread_integral(py * hz, px * hx + py * hy, px * (hz - hx), kz,
                                budget=g_budget, seed=g_seed + 1)
    elif not _close(hy, hz):
        power = total - 2.5
        const = math.log(hy - hz) + 0.5 * math.log(math.pi / px)
        gy, _ = spread_integral(px * hx + pz * hz, pz * hy, px * (hy - 0.5 * hz), ky,
                                budget=g_budget, seed=g_seed)
        gz, _ = spread_integral(py * hz, 0.5 * px * hz + py * hy, 0.5 * px * hz, kz,
                                budget=g_budget, seed=g_seed + 1)
    else:
        raise UnsupportedRegimeError(
            "equal reach scales strictly below twice the absent scale have no closed form"
        )

    logv = (
        -lam * phi
        + power * log_base
        + math.log(total)
        + const
        + ky * math.log(py)
        + lgamma(ky + 1)
        + math.log(gy)
        + kz * math.log(pz)
        + lgamma(kz + 1)
        + math.log(gz)
    )
    return math.exp(logv)
