import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avoidlab.geometry import (Box, BoxUnion, ConfigKind, Interval, boxes_area_range,
                               boxes_corner_feasible, boxunion_avoids, corner_witness_point,
                               hyperbolic_corner_param, triangle_area)

coord = st.floats(0, 6, allow_nan=False)
side = st.floats(0.01, 3, allow_nan=False)


@st.composite
def boxes(draw):
    x, y, w, h = draw(coord), draw(coord), draw(side), draw(side)
    return Box.from_bounds(x, x + w, y, y + h)


def test_interval_rejects_reversed():
    with pytest.raises(ValueError):
        Interval(1.0, 0.0)


def test_corner_param_recovers_t():
    assert hyperbolic_corner_param((1, 2), (1.5, 2), (1, 4)) == pytest.approx(0.5)
    assert hyperbolic_corner_param((1, 2), (0.5, 2), (1, 0)) is None  # t < 0
    assert hyperbolic_corner_param((1, 2), (2, 2.1), (1, 3)) is None


def test_corner_triangle_has_area_half():
    for t in (0.1, 1.0, 7.0):
        assert triangle_area((0, 0), (t, 0), (0, 1 / t)) == pytest.approx(0.5)


def test_single_small_box_has_no_corner():
    b = Box.from_bounds(0, 0.9, 0, 0.9)
    assert not boxes_corner_feasible(b, b, b)


def test_unit_box_touches_corner_at_t_one():
    # t = 1 needs width and height 1: the closed unit square hosts (0,0),(1,0),(0,1)
    b = Box.from_bounds(0, 1, 0, 1)
    assert boxes_corner_feasible(b, b, b)
    x, y, t = corner_witness_point(b, b, b)
    assert t == pytest.approx(1.0)


def test_signed_t_allows_backward_corners():
    r0 = Box.from_bounds(2, 2.1, 2, 2.1)
    r1 = Box.from_bounds(0.9, 1.1, 2, 2.1)  # t ~ -1
    r2 = Box.from_bounds(2, 2.1, 0.9, 1.1)  # 1/t ~ -1
    assert not boxes_corner_feasible(r0, r1, r2)
    assert boxes_corner_feasible(r0, r1, r2, signed_t=True)


@settings(max_examples=300, deadline=None)
@given(boxes(), boxes(), boxes())
def test_corner_witness_is_a_corner(r0, r1, r2):
    """Feasible triples come with an explicit corner inside the boxes (completeness side)."""
    if not boxes_corner_feasible(r0, r1, r2):
        return
    x, y, t = corner_witness_point(r0, r1, r2)
    tol = 1e-9 * (1 + abs(t) + 1 / t)
    inside = lambda b, p: (b.X.lo - tol <= p[0] <= b.X.hi + tol) and (b.Y.lo - tol <= p[1] <= b.Y.hi + tol)
    assert inside(r0, (x, y)) and inside(r1, (x + t, y)) and inside(r2, (x, y + 1 / t))


@settings(max_examples=200, deadline=None)
@given(boxes(), boxes(), boxes(), st.floats(0, 1), st.floats(0, 1), st.floats(0.05, 5))
def test_corner_soundness_pointwise(r0, r1, r2, a, b, t):
    """A corner built from a point of r0 is never missed by the predicate."""
    x = r0.X.lo + a * r0.X.length
    y = r0.Y.lo + b * r0.Y.length
    pts_in = (r1.X.lo <= x + t <= r1.X.hi and r1.Y.lo <= y <= r1.Y.hi
              and r2.X.lo <= x <= r2.X.hi and r2.Y.lo <= y + 1 / t <= r2.Y.hi)
    if pts_in:
        assert boxes_corner_feasible(r0, r1, r2)


@settings(max_examples=200, deadline=None)
@given(boxes(), boxes(), boxes())
def test_corner_predicate_invariant_under_translation(r0, r1, r2):
    sh = lambda b: Box.from_bounds(b.X.lo + 1.25, b.X.hi + 1.25, b.Y.lo - 0.5, b.Y.hi - 0.5)
    assert boxes_corner_feasible(r0, r1, r2) == boxes_corner_feasible(sh(r0), sh(r1), sh(r2))


@settings(max_examples=200, deadline=None)
@given(boxes(), boxes(), boxes(), st.lists(st.floats(0, 1), min_size=6, max_size=6))
def test_area_range_contains_samples(r0, r1, r2, u):
    iv = boxes_area_range(r0, r1, r2)
    p = [(b.X.lo + u[2 * k] * b.X.length, b.Y.lo + u[2 * k + 1] * b.Y.length) for k, b in enumerate((r0, r1, r2))]
    c = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1])
    assert iv.lo - 1e-9 <= c <= iv.hi + 1e-9


def test_boxunion_normalization_preserves_measure():
    U = BoxUnion.from_tuples([(0, 2, 0, 2), (1, 3, 1, 3)])
    assert U.measure() == pytest.approx(7.0)
    assert U.contains([2.5], [2.5])[0] and not U.contains([2.5], [0.5])[0]


def test_boxunion_avoids_detects_unit_square():
    U = BoxUnion.from_tuples([(0, 1, 0, 1)])
    rep = boxunion_avoids(U, ConfigKind.corner())
    assert not rep.avoids and rep.witness is not None
    assert boxunion_avoids(BoxUnion.from_tuples([(0, 0.99, 0, 0.99)]), ConfigKind.corner())


def test_boxunion_triangle_check():
    # the largest triangle in a unit square has area 1/2
    sq = BoxUnion.from_tuples([(0, 1, 0, 1)])
    assert boxunion_avoids(sq, ConfigKind.triangle(1.0))
    assert not boxunion_avoids(sq, ConfigKind.triangle(0.5))


def test_narrow_skew_staircase_avoids_corners():
    # all boxes lie in {3.75 <= x + y <= 4.5}; a corner inside needs t <= 0.75 and 1/t <= 0.75
    w = 0.5
    n = 40
    boxes = [(k * w / 2, (k + 1) * w / 2, 4 - (k + 1) * w / 2, 4 - k * w / 2 + w / 2) for k in range(n)]
    U = BoxUnion.from_tuples([b for b in boxes if b[1] <= 8 and b[2] >= 0], bounding=(0, 8, 0, 8))
    assert boxunion_avoids(U, ConfigKind.corner())


def test_configkind_validation():
    with pytest.raises(ValueError):
        ConfigKind.triangle(0.0)
    with pytest.raises(ValueError):
        ConfigKind("Square")
    assert math.isclose(ConfigKind.triangle(2).area, 2.0)
