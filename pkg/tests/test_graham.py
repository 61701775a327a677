import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avoidlab.constructions import build_AR
from avoidlab.graham import (STEP_ROWS_AP, GrahamParams, GridSet, find_ap, find_ap_bruteforce,
                             find_triangle_bruteforce, find_triangle_of_area, graham_extract,
                             populated_rows, transference_sample, twice_area)


@settings(max_examples=150, deadline=None)
@given(st.sets(st.integers(0, 40), max_size=15), st.integers(2, 4))
def test_find_ap_matches_bruteforce(S, length):
    assert find_ap(S, length) == find_ap_bruteforce(S, length)


def test_find_ap_step_filter():
    S = [0, 1, 2, 3, 4, 6, 8]
    assert find_ap(S, 3) == (0, 1)
    assert find_ap(S, 3, step_filter=lambda s: s % 2 == 0) == (0, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 9), st.floats(0.2, 0.8), st.integers(1, 12), st.integers(0, 2 ** 31))
def test_triangle_search_matches_cubic_oracle(n, density, two_T, seed):
    B = GridSet.random(n, density, np.random.default_rng(seed))
    assert find_triangle_of_area(B, two_T) == find_triangle_bruteforce(B, two_T)


def test_twice_area_is_exact_integer():
    assert twice_area((0, 0), (6, 0), (0, 2)) == 12
    assert twice_area((1, 1), (2, 2), (3, 3)) == 0


def test_gridset_validation():
    with pytest.raises(ValueError):
        GridSet.from_points(4, [(4, 0)])
    with pytest.raises(ValueError):
        GridSet(3, np.ones((3, 4), dtype=bool))


def test_populated_rows_threshold():
    B = GridSet.from_points(4, [(0, 0), (1, 0), (2, 1)])
    pr = populated_rows(B, 0.5)  # threshold beta n / 2 = 1 point
    assert pr.rows == [0, 1] and pr.threshold == 1.0


def test_params_validation():
    with pytest.raises(ValueError):
        GrahamParams(0.5, 2, 3, l=4)  # 3! / 4 not an integer
    with pytest.raises(ValueError):
        GrahamParams(0.5, 2, 3, T=5)  # r! N! / 2 = 6
    p = GrahamParams(1.0, 2, 3, 1)
    assert p.two_T == 12 and p.rows_needed == 3


def test_full_grid_extraction_gives_area_six():
    tr = graham_extract(GridSet.full(24), GrahamParams(1.0, 2, 3, 1))
    assert tr.success
    assert twice_area(*tr.triangle) == 12
    assert tr.flags  # r below 4/beta: desk parameters, not the guaranteed regime
    assert all(s.ok for s in tr.steps)


def test_single_row_fails_at_row_progression():
    B = GridSet.from_points(24, [(x, 5) for x in range(24)])
    tr = graham_extract(B, GrahamParams(0.04, 2, 3, 1))
    assert not tr.success and tr.failed_step == STEP_ROWS_AP


def test_dense_random_grids_succeed():
    for seed in range(3):
        B = GridSet.random(30, 0.9, np.random.default_rng(seed))
        tr = graham_extract(B, GrahamParams(0.85, 2, 3, 1))
        assert tr.success and twice_area(*tr.triangle) == 12


def test_transference_preserves_density_on_average():
    res = transference_sample(build_AR(64), 8, 0.5, 200, seed=7)
    assert res.grid.n == 8
    assert res.density >= res.densities.mean() and res.achieved
    again = transference_sample(build_AR(64), 8, 0.5, 200, seed=7)
    assert np.array_equal(res.grid.mask, again.grid.mask)
