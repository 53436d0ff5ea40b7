"""Exact planar geometry for needle (segment) systems and their contact boxes.

A direction theta in [0, pi) has unit vector e_theta = (cos theta, sin theta).
A needle is the closed segment center +/- half_length * e_theta.  Two needles
with directions theta != gamma touch exactly when the center of one lies in
the other's *contact box*: the parallelogram spanned by +/- r e_theta and
+/- s e_gamma around the other's center (r, s the two half-lengths), with
area 4 r s sin(gamma - theta).  Parallel needles have a degenerate, area zero
contact box, so under a Poisson process they almost surely never touch.

All union areas go through exact rational arithmetic (fractions.Fraction) on
the float inputs.  Floats are rationals, so clipping and inclusion-exclusion
have no epsilon branches and results are bit-deterministic; plain floats come
back out at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "GeometryError",
    "DegenerateDirectionError",
    "EmptyInputError",
    "Vec2",
    "Needle",
    "DirPair",
    "SkewBox",
    "ConvexPolygon",
    "HCoords",
    "direction",
    "needles_intersect",
    "needle_contact_box",
    "h_coords",
    "skew_components",
    "skewbox_polygon",
    "point_in_skewbox",
    "union_area",
    "union_area_same_dirs",
    "raster_area_oracle",
    "max_spread",
    "convex_hull_area",
]

Vec2 = tuple[float, float]


class GeometryError(ValueError):
    """Invalid geometric input."""


class DegenerateDirectionError(GeometryError):
    """Operation requires distinct (or nonzero) directions and got none."""


class EmptyInputError(GeometryError):
    """Operation requires at least one item and got an empty collection."""


def direction(theta: float) -> Vec2:
    """Unit vector e_theta = (cos theta, sin theta)."""
    return (math.cos(theta), math.sin(theta))


@dataclass(frozen=True)
class Needle:
    """Closed segment center +/- half_length * e_angle, angle in [0, pi)."""

    center: Vec2
    angle: float
    half_length: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.angle < math.pi):
            raise GeometryError(f"needle angle must lie in [0, pi), got {self.angle}")
        if not (self.half_length > 0.0 and math.isfinite(self.half_length)):
            raise GeometryError(f"needle half_length must be positive, got {self.half_length}")

    def endpoints(self) -> tuple[Vec2, Vec2]:
        ex, ey = direction(self.angle)
        cx, cy = self.center
        h = self.half_length
        return (cx - h * ex, cy - h * ey), (cx + h * ex, cy + h * ey)


@dataclass(frozen=True)
class DirPair:
    """Ordered pair of directions 0 <= alpha < beta < pi."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha < self.beta < math.pi):
            raise GeometryError(
                f"need 0 <= alpha < beta < pi, got alpha={self.alpha}, beta={self.beta}"
            )

    @property
    def gap(self) -> float:
        return self.beta - self.alpha


@dataclass(frozen=True)
class SkewBox:
    """Parallelogram center +/- half_a * e_alpha +/- half_b * e_beta.

    half_a extends along e_alpha and half_b along e_beta.  A zero half extent
    makes the box degenerate (empty interior), which is legal: it is the
    contact region shape, not an error.
    """

    center: Vec2
    dirs: DirPair
    half_a: float
    half_b: float

    def __post_init__(self) -> None:
        if self.half_a < 0.0 or self.half_b < 0.0:
            raise GeometryError("SkewBox half extents must be >= 0")

    @property
    def area(self) -> float:
        return 4.0 * self.half_a * self.half_b * math.sin(self.dirs.gap)

    @property
    def degenerate(self) -> bool:
        return self.half_a == 0.0 or self.half_b == 0.0


class ConvexPolygon:
    """Convex polygon as a CCW vertex tuple; () is the explicit empty polygon."""

    __slots__ = ("vertices",)

    def __init__(self, vertices: Sequence[Vec2] = ()):
        verts = tuple((float(x), float(y)) for x, y in vertices)
        if verts and len(verts) < 3:
            raise GeometryError("a non-empty polygon needs at least 3 vertices")
        if verts and _signed_area2_float(verts) <= 0.0:
            raise GeometryError("polygon vertices must be in CCW order with positive area")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def empty(cls) -> "ConvexPolygon":
        return cls(())

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def area(self) -> float:
        if not self.vertices:
            return 0.0
        return 0.5 * _signed_area2_float(self.vertices)

    def __repr__(self) -> str:  # pragma: no cover
        return f"ConvexPolygon({list(self.vertices)!r})"


class HCoords(NamedTuple):
    """Skew coordinates of a point for a direction pair with alpha > 0.

    With c = sin(alpha) sin(beta) sin(beta - alpha):

        h_alpha = sin(alpha) <x, (sin beta, -cos beta)> / c
        h_beta  = sin(beta) <x, (-sin alpha, cos alpha)> / c
        h_bar0  = x2 / (sin alpha sin beta) = h_alpha + h_beta

    These normalize contact box membership to coordinate boxes.  Writing
    H = r / sin(opposite gap), i.e. H0 = r0/sin(beta-alpha),
    Ha = ra/sin(beta), Hb = rb/sin(alpha):

      x in box(alpha, beta; ra, rb)   iff  |h_alpha| <= Ha and |h_beta| <= Hb
      x in box(0, alpha; r0, ra)      iff  |h_beta|  <= H0 and |h_bar0| <= Ha
      x in box(0, beta;  r0, rb)      iff  |h_alpha| <= H0 and |h_bar0| <= Hb

    and Lebesgue measure satisfies d(x1, x2) = c * d(h_alpha, h_beta).
    """

    h_alpha: float
    h_beta: float
    h_bar0: float


def h_coords(x: Vec2, dirs: DirPair) -> HCoords:
    """Skew coordinates of ``x`` for ``dirs``; requires dirs.alpha > 0."""
    sa = math.sin(dirs.alpha)
    if dirs.alpha == 0.0 or sa == 0.0:
        raise DegenerateDirectionError("h-coordinates need alpha > 0 (sin(alpha) != 0)")
    sb, cb = math.sin(dirs.beta), math.cos(dirs.beta)
    ca = math.cos(dirs.alpha)
    sg = math.sin(dirs.gap)
    x1, x2 = float(x[0]), float(x[1])
    ha = (x1 * sb - x2 * cb) / (sb * sg)
    hb = (-x1 * sa + x2 * ca) / (sa * sg)
    return HCoords(ha, hb, x2 / (sa * sb))


def skew_components(x: Vec2, dirs: DirPair) -> tuple[float, float]:
    """Components (u, v) with x = u e_alpha + v e_beta; alpha = 0 is allowed."""
    sa, ca = math.sin(dirs.alpha), math.cos(dirs.alpha)
    sb, cb = math.sin(dirs.beta), math.cos(dirs.beta)
    det = ca * sb - sa * cb  # sin(beta - alpha) > 0
    x1, x2 = float(x[0]), float(x[1])
    u = (x1 * sb - x2 * cb) / det
    v = (-x1 * sa + x2 * ca) / det
    return u, v


def skewbox_polygon(box: SkewBox) -> ConvexPolygon:
    """Vertex polygon of a skew box; degenerate boxes map to the empty polygon."""
    if box.degenerate:
        return ConvexPolygon.empty()
    ax, ay = direction(box.dirs.alpha)
    bx, by = direction(box.dirs.beta)
    cx, cy = box.center
    ha, hb = box.half_a, box.half_b
    # CCW because det(e_alpha, e_beta) = sin(beta - alpha) > 0.
    return ConvexPolygon(
        [
            (cx - ha * ax - hb * bx, cy - ha * ay - hb * by),
            (cx + ha * ax - hb * bx, cy + ha * ay - hb * by),
            (cx + ha * ax + hb * bx, cy + ha * ay + hb * by),
            (cx - ha * ax + hb * bx, cy - ha * ay + hb * by),
        ]
    )


def point_in_skewbox(x: Vec2, box: SkewBox, pad: float = 0.0) -> bool:
    """Closed membership test, optionally padding the half extents by ``pad``."""
    u, v = skew_components((x[0] - box.center[0], x[1] - box.center[1]), box.dirs)
    return abs(u) <= box.half_a + pad and abs(v) <= box.half_b + pad


def needle_contact_box(needle: Needle, other_angle: float, other_half_length: float) -> SkewBox:
    """Contact box of ``needle`` against needles of the given angle and half length.

    The box is centered at ``needle.center``; a needle with ``other_angle``
    touches ``needle`` exactly when its center lies in the box.  Equal angles
    are rejected (the touching set is a segment of zero area).
    """
    if other_angle == needle.angle:
        raise DegenerateDirectionError("parallel needles have a degenerate contact region")
    if needle.angle < other_angle:
        dirs = DirPair(needle.angle, other_angle)
        return SkewBox(needle.center, dirs, needle.half_length, other_half_length)
    dirs = DirPair(other_angle, needle.angle)
    return SkewBox(needle.center, dirs, other_half_length, needle.half_length)


# ----------------------------------------------------------------------------
# exact rational engine


def _fr(x: float) -> Fraction:
    return Fraction(float(x))


def _signed_area2_float(verts: Sequence[Vec2]) -> float:
    s = 0.0
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return s


def _shoelace2(pts: list[tuple[Fraction, Fraction]]) -> Fraction:
    s = Fraction(0)
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return s


def _clip_halfplane(
    pts: list[tuple[Fraction, Fraction]], a: Fraction, b: Fraction, c: Fraction
) -> list[tuple[Fraction, Fraction]]:
    """Sutherland-Hodgman step keeping {a x + b y <= c}, exact arithmetic."""
    out: list[tuple[Fraction, Fraction]] = []
    n = len(pts)
    for i in range(n):
        cur = pts[i]
        nxt = pts[(i + 1) % n]
        s_cur = a * cur[0] + b * cur[1] - c
        s_nxt = a * nxt[0] + b * nxt[1] - c
        if s_cur <= 0:
            out.append(cur)
        if (s_cur < 0 < s_nxt) or (s_nxt < 0 < s_cur):
            t = s_cur / (s_cur - s_nxt)
            out.append((cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])))
    return out


def _convex_intersect(
    p: list[tuple[Fraction, Fraction]], q: list[tuple[Fraction, Fraction]]
) -> list[tuple[Fraction, Fraction]]:
    """Intersection of two CCW convex polygons (exact), possibly empty."""
    out = p
    n = len(q)
    for i in range(n):
        if not out:
            return out
        q1 = q[i]
        q2 = q[(i + 1) % n]
        a = q2[1] - q1[1]
        b = q1[0] - q2[0]
        c = a * q1[0] + b * q1[1]
        out = _clip_halfplane(out, a, b, c)
    return out


def _as_fraction_poly(poly) -> list[tuple[Fraction, Fraction]]:
    verts = poly.vertices if isinstance(poly, ConvexPolygon) else tuple(poly)
    return [(_fr(x), _fr(y)) for x, y in verts]


def union_area(polys: Iterable) -> float:
    """Exact area of the union of convex CCW polygons.

    Inclusion-exclusion over the subset lattice with exact rational clipping;
    subsets whose running intersection is empty are pruned, so overlapping
    chains stay cheap.  Accepts ConvexPolygon objects or raw vertex sequences;
    empty polygons are ignored.
    """
    items: list[list[tuple[Fraction, Fraction]]] = []
    for poly in polys:
        pts = _as_fraction_poly(poly)
        if len(pts) < 3:
            continue
        s2 = _shoelace2(pts)
        if s2 < 0:  # raw CW input: normalize instead of dropping it
            pts.reverse()
            s2 = -s2
        if s2 > 0:
            items.append(pts)
    if not items:
        return 0.0
    n = len(items)
    total = Fraction(0)
    # stack entries: (next candidate index, running intersection, sign)
    stack: list[tuple[int, list[tuple[Fraction, Fraction]], int]] = [
        (i + 1, items[i], 1) for i in range(n)
    ]
    while stack:
        start, pts, sign = stack.pop()
        total += sign * _shoelace2(pts)
        for j in range(start, n):
            inter = _convex_intersect(pts, items[j])
            if inter and _shoelace2(inter) > 0:
                stack.append((j + 1, inter, -sign))
    return float(total / 2)


def _rect_union_area(
    rects: list[tuple[Fraction, Fraction, Fraction, Fraction]]
) -> Fraction:
    """Union area of axis-aligned rectangles (x1, x2, y1, y2), exact sweep."""
    xs = sorted({r[0] for r in rects} | {r[1] for r in rects})
    total = Fraction(0)
    for lo, hi in zip(xs, xs[1:]):
        if hi <= lo:
            continue
        spans = sorted(
            (r[2], r[3]) for r in rects if r[0] <= lo and r[1] >= hi and r[3] > r[2]
        )
        covered = Fraction(0)
        cur_lo = cur_hi = None
        for y1, y2 in spans:
            if cur_hi is None:
                cur_lo, cur_hi = y1, y2
            elif y1 <= cur_hi:
                if y2 > cur_hi:
                    cur_hi = y2
            else:
                covered += cur_hi - cur_lo
                cur_lo, cur_hi = y1, y2
        if cur_hi is not None:
            covered += cur_hi - cur_lo
        total += (hi - lo) * covered
    return total


def union_area_same_dirs(
    dirs: DirPair,
    half_a: float,
    half_b: float,
    centers: Sequence[Vec2],
) -> float:
    """Exact union area of equal skew boxes translated to ``centers``.

    The boxes are mapped to axis-aligned rectangles by the inverse of the
    basis (e_alpha, e_beta), their union is computed with an exact rational
    sweep line, and the result is scaled by the basis determinant.  Uses the
    same float-to-rational arithmetic as :func:`union_area`, so the two agree
    to machine precision on shared inputs.
    """
    if len(centers) == 0:
        raise EmptyInputError("union_area_same_dirs needs at least one center")
    if half_a < 0.0 or half_b < 0.0:
        raise GeometryError("half extents must be >= 0")
    if half_a == 0.0 or half_b == 0.0:
        return 0.0
    fsa, fca = _fr(math.sin(dirs.alpha)), _fr(math.cos(dirs.alpha))
    fsb, fcb = _fr(math.sin(dirs.beta)), _fr(math.cos(dirs.beta))
    det = fca * fsb - fsa * fcb
    if det <= 0:
        raise DegenerateDirectionError("direction pair has no positive basis determinant")
    fha, fhb = _fr(half_a), _fr(half_b)
    rects = []
    for x, y in centers:
        fx, fy = _fr(x), _fr(y)
        u = (fx * fsb - fy * fcb) / det
        v = (-fx * fsa + fy * fca) / det
        rects.append((u - fha, u + fha, v - fhb, v + fhb))
    return float(_rect_union_area(rects) * det)


def raster_area_oracle(
    polys: Sequence, samples: int = 200_000, seed: int = 0
) -> tuple[float, float]:
    """Monte Carlo union area estimate with a binomial standard error.

    Samples uniformly in the tight bounding box of the non-empty polygons.
    Deliberately independent of the exact engine: membership is tested with
    float sign checks against each polygon's edges.  An empty input (or all
    empty polygons) gives (0.0, 0.0).
    """
    arrs = []
    for poly in polys:
        verts = poly.vertices if isinstance(poly, ConvexPolygon) else tuple(poly)
        if len(verts) >= 3:
            arr = np.asarray(verts, dtype=float)
            if _signed_area2_float([tuple(p) for p in arr]) < 0:
                arr = arr[::-1]
            arrs.append(arr)
    if not arrs:
        return 0.0, 0.0
    allv = np.concatenate(arrs, axis=0)
    lo = allv.min(axis=0)
    hi = allv.max(axis=0)
    span = hi - lo
    box_area = float(span[0] * span[1])
    if box_area == 0.0:
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    pts = lo + rng.random((int(samples), 2)) * span
    inside = np.zeros(len(pts), dtype=bool)
    for v in arrs:
        edges_from = v
        edges_to = np.roll(v, -1, axis=0)
        ok = np.ones(len(pts), dtype=bool)
        for (x1, y1), (x2, y2) in zip(edges_from, edges_to):
            cross = (x2 - x1) * (pts[:, 1] - y1) - (y2 - y1) * (pts[:, 0] - x1)
            ok &= cross >= 0.0
            if not ok.any():
                break
        inside |= ok
    phat = inside.mean()
    est = box_area * float(phat)
    stderr = box_area * math.sqrt(max(phat * (1.0 - phat), 0.0) / len(pts))
    return est, stderr


def max_spread(values: Sequence[float]) -> float:
    """max(values) - min(values); rejects empty input."""
    vals = list(values)
    if not vals:
        raise EmptyInputError("max_spread needs at least one value")
    return float(max(vals) - min(vals))


def convex_hull_area(points: Sequence[Vec2]) -> float:
    """Area of the convex hull of a point set (0.0 for fewer than 3 points)."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) < 3:
        return 0.0

    def half(points_iter):
        hull: list[Vec2] = []
        for p in points_iter:
            while len(hull) >= 2:
                ox, oy = hull[-2]
                ax, ay = hull[-1]
                if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) <= 0:
                    hull.pop()
                else:
                    break
            hull.append(p)
        return hull

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return 0.0
    return 0.5 * abs(_signed_area2_float(hull))


# ----------------------------------------------------------------------------
# segment intersection (exact)


def _orient(a, b, c) -> int:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


def _on_segment(a, b, c) -> bool:
    """Whether c (collinear with a, b) lies on the closed segment [a, b]."""
    return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(
        a[1], b[1]
    )


def needles_intersect(n1: Needle, n2: Needle) -> bool:
    """Whether two needles (closed segments) share a point; touching counts.

    Endpoints are formed in float, then all sign tests run on exact rationals,
    so the predicate is total and deterministic, including collinear overlap
    and endpoint contact.
    """
    (p1, p2) = n1.endpoints()
    (q1, q2) = n2.endpoints()
    a = (_fr(p1[0]), _fr(p1[1]))
    b = (_fr(p2[0]), _fr(p2[1]))
    c = (_fr(q1[0]), _fr(q1[1]))
    d = (_fr(q2[0]), _fr(q2[1]))
    o1 = _orient(a, b, c)
    o2 = _orient(a, b, d)
    o3 = _orient(c, d, a)
    o4 = _orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and _on_segment(a, b, c):
        return True
    if o2 == 0 and _on_segment(a, b, d):
        return True
    if o3 == 0 and _on_segment(c, d, a):
        return True
    if o4 == 0 and _on_segment(c, d, b):
        return True
    return False
