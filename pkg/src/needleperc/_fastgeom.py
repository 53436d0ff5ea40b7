"""Vectorized float kernels mirroring the exact geometry engine.

Throughput paths for the simulator and the Monte Carlo integrator.  Each
kernel is property-tested against the exact rational routines in geometry.py.
They use plain float comparisons, so ties sitting exactly on a boundary can
differ from the exact engine; under the continuous sampling distributions
these ties have probability zero, and for fixed inputs the kernels are fully
deterministic.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def _cross(ux, uy, vx, vy):
    return ux * vy - uy * vx


def segments_intersect_batch(a0, a1, b0, b1) -> np.ndarray:
    """Closed-segment intersection test, broadcast over leading axes.

    Arguments are arrays of shape (..., 2) holding the two endpoints of each
    segment pair; touching (including collinear overlap) counts.
    """
    a0 = np.asarray(a0, dtype=float)
    a1 = np.asarray(a1, dtype=float)
    b0 = np.asarray(b0, dtype=float)
    b1 = np.asarray(b1, dtype=float)
    d1 = _cross(a1[..., 0] - a0[..., 0], a1[..., 1] - a0[..., 1],
                b0[..., 0] - a0[..., 0], b0[..., 1] - a0[..., 1])
    d2 = _cross(a1[..., 0] - a0[..., 0], a1[..., 1] - a0[..., 1],
                b1[..., 0] - a0[..., 0], b1[..., 1] - a0[..., 1])
    d3 = _cross(b1[..., 0] - b0[..., 0], b1[..., 1] - b0[..., 1],
                a0[..., 0] - b0[..., 0], a0[..., 1] - b0[..., 1])
    d4 = _cross(b1[..., 0] - b0[..., 0], b1[..., 1] - b0[..., 1],
                a1[..., 0] - b0[..., 0], a1[..., 1] - b0[..., 1])
    proper = (((d1 > 0) & (d2 < 0)) | ((d1 < 0) & (d2 > 0))) & (
        ((d3 > 0) & (d4 < 0)) | ((d3 < 0) & (d4 > 0))
    )

    def on_seg(p, q, r):
        return (
            (np.minimum(p[..., 0], q[..., 0]) <= r[..., 0])
            & (r[..., 0] <= np.maximum(p[..., 0], q[..., 0]))
            & (np.minimum(p[..., 1], q[..., 1]) <= r[..., 1])
            & (r[..., 1] <= np.maximum(p[..., 1], q[..., 1]))
        )

    touch = (
        ((d1 == 0) & on_seg(a0, a1, b0))
        | ((d2 == 0) & on_seg(a0, a1, b1))
        | ((d3 == 0) & on_seg(b0, b1, a0))
        | ((d4 == 0) & on_seg(b0, b1, a1))
    )
    return proper | touch


def rect_union_area_translates(width: float, height: float, du, dv) -> np.ndarray:
    """Union area of m translates of a width x height axis-aligned rectangle.

    du, dv: arrays of shape (N, m) with the translate offsets per sample.
    Uses the identity that the intersection of equal translated rectangles is
    the rectangle shrunk by the offset spreads, so inclusion-exclusion needs
    only subset spreads.  Intended for small m (2**m subsets).
    """
    du = np.asarray(du, dtype=float)
    dv = np.asarray(dv, dtype=float)
    n, m = du.shape
    if m > 12:
        raise ValueError("rect_union_area_translates is exponential in m; m <= 12 required")
    total = np.zeros(n)
    for r in range(1, m + 1):
        sign = 1.0 if r % 2 == 1 else -1.0
        for subset in combinations(range(m), r):
            s = list(subset)
            su = du[:, s]
            sv = dv[:, s]
            w = np.maximum(width - (su.max(axis=1) - su.min(axis=1)), 0.0)
            h = np.maximum(height - (sv.max(axis=1) - sv.min(axis=1)), 0.0)
            total += sign * w * h
    return total


def _clip_halfplane_batch(pts, cnt, a, b, c):
    """One batched Sutherland-Hodgman step keeping {a x + b y <= c} per row."""
    n, v, _ = pts.shape
    idx = np.arange(v)
    valid = idx[None, :] < cnt[:, None]
    s = a[:, None] * pts[..., 0] + b[:, None] * pts[..., 1] - c[:, None]
    nxt = idx[None, :] + 1
    nxt = np.where(nxt >= np.maximum(cnt, 1)[:, None], 0, nxt)
    s_nxt = np.take_along_axis(s, nxt, axis=1)
    p_nxt = np.take_along_axis(pts, nxt[..., None], axis=1)
    inside = (s <= 0.0) & valid
    straddle = (((s < 0) & (s_nxt > 0)) | ((s > 0) & (s_nxt < 0))) & valid
    denom = s - s_nxt
    t = np.where(straddle, s / np.where(denom == 0.0, 1.0, denom), 0.0)
    cross_pts = pts + t[..., None] * (p_nxt - pts)
    cand = np.empty((n, 2 * v, 2))
    cand[:, 0::2] = pts
    cand[:, 1::2] = cross_pts
    emit = np.zeros((n, 2 * v), dtype=bool)
    emit[:, 0::2] = inside
    emit[:, 1::2] = straddle
    new_cnt = emit.sum(axis=1).astype(np.int64)
    out = np.zeros((n, v + 2, 2))
    pos = np.cumsum(emit, axis=1) - 1
    rows, cols = np.nonzero(emit)
    out[rows, pos[rows, cols]] = cand[rows, cols]
    return out, new_cnt


def _polygon_area_batch(pts, cnt):
    n, v, _ = pts.shape
    idx = np.arange(v)
    valid = idx[None, :] < cnt[:, None]
    nxt = np.where(idx[None, :] + 1 >= np.maximum(cnt, 1)[:, None], 0, idx[None, :] + 1)
    x1 = pts[..., 0]
    y1 = pts[..., 1]
    x2 = np.take_along_axis(x1, nxt, axis=1)
    y2 = np.take_along_axis(y1, nxt, axis=1)
    terms = np.where(valid, x1 * y2 - x2 * y1, 0.0)
    return 0.5 * terms.sum(axis=1)


def quad_union_area_batch(quads) -> np.ndarray:
    """Union area of m convex CCW quadrilaterals per sample.

    quads: array (N, m, 4, 2).  Inclusion-exclusion with batched clipping;
    exponential in m, so keep m small (the callers use m <= 6).
    """
    quads = np.asarray(quads, dtype=float)
    n, m = quads.shape[0], quads.shape[1]
    if m > 8:
        raise ValueError("quad_union_area_batch is exponential in m; m <= 8 required")
    total = np.zeros(n)
    for r in range(1, m + 1):
        sign = 1.0 if r % 2 == 1 else -1.0
        for subset in combinations(range(m), r):
            pts = quads[:, subset[0]].copy()
            cnt = np.full(n, 4, dtype=np.int64)
            for j in subset[1:]:
                if not cnt.any():
                    break
                q = quads[:, j]
                for e in range(4):
                    q1 = q[:, e]
                    q2 = q[:, (e + 1) % 4]
                    a = q2[:, 1] - q1[:, 1]
                    b = q1[:, 0] - q2[:, 0]
                    c = a * q1[:, 0] + b * q1[:, 1]
                    pts, cnt = _clip_halfplane_batch(pts, cnt, a, b, c)
            total += sign * _polygon_area_batch(pts, cnt)
    return total


def transitive_closure_batch(adj) -> np.ndarray:
    """Boolean transitive closure of batched adjacency matrices (N, m, m)."""
    adj = np.asarray(adj)
    m = adj.shape[-1]
    reach = adj | np.eye(m, dtype=bool)
    steps = max(1, int(np.ceil(np.log2(max(m, 2)))))
    for _ in range(steps):
        reach = np.matmul(reach.astype(np.uint8), reach.astype(np.uint8)) > 0
    return reach


def all_connected_batch(adj) -> np.ndarray:
    """Whether each batched adjacency matrix describes one connected component."""
    reach = transitive_closure_batch(adj)
    return reach[:, 0, :].all(axis=1)
