import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from needleperc import geometry
from needleperc.geometry import (
    DegenerateDirectionError,
    DirPair,
    EmptyInputError,
    GeometryError,
    Needle,
    SkewBox,
    convex_hull_area,
    direction,
    h_coords,
    max_spread,
    needle_contact_box,
    needles_intersect,
    point_in_skewbox,
    raster_area_oracle,
    skew_components,
    skewbox_polygon,
    union_area,
    union_area_same_dirs,
)

from conftest import rng_of

DIRS = DirPair(math.pi / 5, 2 * math.pi / 3)

angles_st = st.floats(0.0, math.pi - 1e-6, allow_nan=False)
coords_st = st.floats(-5.0, 5.0, allow_nan=False, allow_infinity=False)


def box_at(center, half_a=0.5, half_b=0.5, dirs=DIRS):
    return skewbox_polygon(SkewBox(center, dirs, half_a, half_b))


# ----------------------------------------------------------------------------
# basic area identities


def test_single_box_area_is_closed_form():
    box = SkewBox((0.3, -0.2), DIRS, 0.7, 1.1)
    assert union_area([skewbox_polygon(box)]) == pytest.approx(box.area, rel=1e-12)
    assert box.area == pytest.approx(4 * 0.7 * 1.1 * math.sin(DIRS.gap), rel=1e-15)


def test_far_apart_boxes_add_up():
    got = union_area([box_at((0.0, 0.0)), box_at((100.0, 0.0)), box_at((0.0, 100.0))])
    assert got == pytest.approx(3 * union_area([box_at((0.0, 0.0))]), rel=1e-12)


def test_duplicate_boxes_do_not_double_count():
    one = union_area([box_at((0.1, 0.2))])
    three = union_area([box_at((0.1, 0.2))] * 3)
    assert three == pytest.approx(one, rel=1e-12)


def test_degenerate_box_contributes_nothing():
    flat = SkewBox((0.0, 0.0), DIRS, 0.0, 1.0)
    assert flat.degenerate
    assert union_area([skewbox_polygon(flat)]) == 0.0
    got = union_area([box_at((0.0, 0.0)), skewbox_polygon(flat)])
    assert got == pytest.approx(union_area([box_at((0.0, 0.0))]), rel=1e-12)


def test_empty_unions():
    # the generic engine treats no polygons as an empty union, the
    # same-direction sweep insists on at least one center
    assert union_area([]) == 0.0
    with pytest.raises(EmptyInputError):
        union_area_same_dirs(DIRS, 0.5, 0.5, [])


def test_adding_a_box_never_shrinks_the_union():
    rng = rng_of(31)
    centers = [(float(x), float(y)) for x, y in rng.uniform(-1.5, 1.5, (8, 2))]
    prev = 0.0
    for n in range(1, len(centers) + 1):
        cur = union_area([box_at(c) for c in centers[:n]])
        assert cur >= prev - 1e-12
        prev = cur


# ----------------------------------------------------------------------------
# the two union routes agree exactly


def test_same_direction_routes_agree_to_machine_precision():
    rng = rng_of(7)
    for _ in range(200):
        dirs = DirPair(float(rng.uniform(0, 1.2)), float(rng.uniform(1.4, 3.0)))
        half_a = float(rng.uniform(0.1, 1.4))
        half_b = float(rng.uniform(0.1, 1.4))
        k = int(rng.integers(1, 7))
        centers = [(float(x), float(y)) for x, y in rng.uniform(-2, 2, (k, 2))]
        generic = union_area([skewbox_polygon(SkewBox(c, dirs, half_a, half_b)) for c in centers])
        sweep = union_area_same_dirs(dirs, half_a, half_b, centers)
        assert generic == pytest.approx(sweep, rel=1e-12, abs=1e-12)


def test_union_matches_raster_oracle_within_three_sigma():
    rng = rng_of(8)
    for _ in range(10):
        k = int(rng.integers(2, 5))
        polys = [
            box_at(
                (float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1))),
                float(rng.uniform(0.3, 0.9)),
                float(rng.uniform(0.3, 0.9)),
            )
            for _ in range(k)
        ]
        exact = union_area(polys)
        est, se = raster_area_oracle(polys, samples=100_000, seed=5)
        assert abs(est - exact) <= 3.0 * se + 1e-9


def test_overlapping_pair_by_inclusion_exclusion():
    # axis-aligned unit squares offset by (0.5, 0); overlap is 0.5
    dirs = DirPair(0.0, math.pi / 2)
    got = union_area_same_dirs(dirs, 0.5, 0.5, [(0.0, 0.0), (0.5, 0.0)])
    assert got == pytest.approx(1.5, abs=1e-12)


# ----------------------------------------------------------------------------
# coordinates


@given(x=coords_st, y=coords_st)
def test_skew_components_reconstruct_the_point(x, y):
    ca, cb = skew_components((x, y), DIRS)
    ea, eb = direction(DIRS.alpha), direction(DIRS.beta)
    assert ca * ea[0] + cb * eb[0] == pytest.approx(x, abs=1e-9)
    assert ca * ea[1] + cb * eb[1] == pytest.approx(y, abs=1e-9)


def test_h_coords_rescale_skew_components():
    pt = (0.7, -0.3)
    u, v = skew_components(pt, DIRS)
    hc = h_coords(pt, DIRS)
    assert hc.h_alpha == pytest.approx(u / math.sin(DIRS.beta), rel=1e-12)
    assert hc.h_beta == pytest.approx(v / math.sin(DIRS.alpha), rel=1e-12)
    assert hc.h_bar0 == pytest.approx(hc.h_alpha + hc.h_beta, rel=1e-9)


def test_h_coords_pin_contact_box_membership():
    """|h_alpha| <= r_a/sin(beta) and |h_beta| <= r_b/sin(alpha) is the box"""
    rng = rng_of(12)
    box = SkewBox((0.0, 0.0), DIRS, 0.6, 0.9)
    cap_a = 0.6 / math.sin(DIRS.beta)
    cap_b = 0.9 / math.sin(DIRS.alpha)
    for _ in range(200):
        pt = (float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        hc = h_coords(pt, DIRS)
        by_coords = abs(hc.h_alpha) <= cap_a - 1e-9 and abs(hc.h_beta) <= cap_b - 1e-9
        outside = abs(hc.h_alpha) >= cap_a + 1e-9 or abs(hc.h_beta) >= cap_b + 1e-9
        if by_coords:
            assert point_in_skewbox(pt, box, pad=1e-12)
        elif outside:
            assert not point_in_skewbox(pt, box, pad=-1e-12)


def test_direction_pair_validation():
    with pytest.raises(GeometryError):
        DirPair(1.0, 1.0)
    with pytest.raises(GeometryError):
        DirPair(-0.1, 1.0)
    with pytest.raises(GeometryError):
        DirPair(1.0, math.pi)


def test_h_coords_need_a_positive_alpha():
    with pytest.raises(DegenerateDirectionError):
        h_coords((1.0, 0.0), DirPair(0.0, 1.0))


# ----------------------------------------------------------------------------
# needles and contact boxes


def test_crossing_needles_intersect():
    assert needles_intersect(
        Needle((0.0, 0.0), 0.0, 1.0), Needle((0.0, 0.0), math.pi / 2, 1.0)
    )


def test_endpoint_touch_counts_as_intersection():
    # segments are closed: tip-to-tip contact connects
    a = Needle((0.0, 0.0), 0.0, 1.0)
    b = Needle((2.0, 0.0), math.pi / 2, 1.0)
    assert not needles_intersect(a, b)
    c = Needle((1.0, 1.0), math.pi / 2, 1.0)
    assert needles_intersect(a, c)


def test_parallel_offset_needles_miss():
    a = Needle((0.0, 0.0), 0.3, 1.0)
    b = Needle((0.0, 1e-9), 0.3, 1.0)
    assert not needles_intersect(a, b)


def test_contact_box_characterizes_intersection():
    """center of the second needle inside the box <=> the needles touch"""
    rng = rng_of(9)
    checked = 0
    for _ in range(400):
        t1, t2 = sorted(rng.uniform(0, math.pi, 2))
        if t2 - t1 < 1e-3 or t2 - t1 > math.pi - 1e-3:
            continue
        n1 = Needle((0.0, 0.0), float(t1), float(rng.uniform(0.2, 1.0)))
        r2 = float(rng.uniform(0.2, 1.0))
        c2 = (float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        n2 = Needle(c2, float(t2), r2)
        box = needle_contact_box(n1, n2.angle, n2.half_length)
        strictly_in = point_in_skewbox(c2, box, pad=-1e-9)
        strictly_out = not point_in_skewbox(c2, box, pad=1e-9)
        if strictly_in:
            assert needles_intersect(n1, n2)
            checked += 1
        elif strictly_out:
            assert not needles_intersect(n1, n2)
            checked += 1
    assert checked >= 300


def test_contact_box_area_is_the_mixed_product():
    n = Needle((0.0, 0.0), 0.2, 0.7)
    box = needle_contact_box(n, 1.5, 0.4)
    assert box.area == pytest.approx(4 * 0.7 * 0.4 * math.sin(1.3), rel=1e-12)


def test_parallel_contact_box_is_rejected():
    n = Needle((0.0, 0.0), 0.9, 0.5)
    with pytest.raises(DegenerateDirectionError):
        needle_contact_box(n, 0.9, 0.5)


def test_needle_validation():
    with pytest.raises(GeometryError):
        Needle((0.0, 0.0), math.pi, 1.0)
    with pytest.raises(GeometryError):
        Needle((0.0, 0.0), 0.5, 0.0)


# ----------------------------------------------------------------------------
# hull and spread helpers


def test_hull_area_of_a_square():
    assert convex_hull_area([(0, 0), (1, 0), (1, 1), (0, 1)]) == pytest.approx(1.0)


def test_hull_area_degenerate_inputs():
    assert convex_hull_area([(0.0, 0.0)]) == 0.0
    assert convex_hull_area([(0, 0), (1, 1)]) == 0.0
    assert convex_hull_area([(0, 0), (1, 1), (2, 2), (3, 3)]) == 0.0


@settings(max_examples=60)
@given(st.lists(st.tuples(coords_st, coords_st), min_size=3, max_size=9))
def test_hull_area_ignores_point_order(pts):
    a = convex_hull_area(pts)
    b = convex_hull_area(list(reversed(pts)))
    assert a == pytest.approx(b, abs=1e-9)
    assert a >= 0.0


def test_interior_points_do_not_change_the_hull():
    square = [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]
    assert convex_hull_area(square + [(1.0, 1.0), (0.5, 1.5)]) == pytest.approx(4.0)


def test_max_spread():
    assert max_spread([3.0]) == 0.0
    assert max_spread([-1.0, 2.5, 0.0]) == pytest.approx(3.5)
