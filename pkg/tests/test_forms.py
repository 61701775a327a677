import numpy as np
import pytest
from scipy import integrate

from avoidlab.constructions import build_AR
from avoidlab.corpus import corpus
from avoidlab.forms import (FormEvaluation, error_part_scan, eval_form, eval_Mvec, eval_N0, eval_N1,
                            eval_N1_kernel, eval_Neps, lambda_grid, rasterization_error_bound,
                            rescale_identity_check, single_rectangle_bound, structured_lower_scan,
                            uniform_part_scan)
from avoidlab.geometry import BoxUnion
from avoidlab.mollifiers import zeta
from avoidlab.raster import rasterize


def square_N0(L, lam):
    """Exact N0 of [0, L]^2: for each u the admissible (x, y) form a rectangle."""
    f = lambda u: float(zeta(np.array(u))) * max(L - lam * u, 0) * max(L - 1 / (lam * u), 0)
    return integrate.quad(f, 0.5, 2, epsabs=1e-13, limit=200)[0]


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_N0_full_square_matches_one_dimensional_oracle(lam):
    F = rasterize(BoxUnion.from_tuples([(0, 4, 0, 4)]), 1 / 16)
    ev = eval_N0(F, F, F, lam, n_nodes=128)
    assert ev.value == pytest.approx(square_N0(4, lam), rel=1e-6)


def test_N0_vanishes_on_band_construction():
    F = rasterize(build_AR(16), 1 / 32)
    for lam in (0.25, 1.0, 4.0):
        ev = eval_N0(F, F, F, lam)
        assert abs(ev.value) <= rasterization_error_bound(F) + ev.quad_error
        # far tighter in practice: only boundary cells interact
        assert abs(ev.value) < 1e-3 * square_N0(4, 1.0)


def test_eval_form_dispatch_and_eps_one_is_structured():
    F = rasterize(corpus()["l_shape"], 0.25)
    assert eval_form(F, 1.0, 0).kind == "N0"
    assert eval_Neps(F, 1.0, 1.0).value == pytest.approx(eval_N1(F, 1.0).value, rel=1e-14)
    with pytest.raises(ValueError):
        eval_Neps(F, 1.0, 1.5)
    with pytest.raises(ValueError):
        eval_N0(F, F, F, -1.0)


def test_structured_form_kernel_route_agrees():
    F = rasterize(BoxUnion.from_tuples([(0, 2, 0, 1.5), (2.5, 3, 0, 3)]), 0.25)
    for lam in (0.7, 1.0, 1.6):
        a = eval_N1(F, lam, n_nodes=256).value
        b = eval_N1_kernel(F, F, F, lam)
        assert a == pytest.approx(b, rel=1e-3)


def test_structured_part_of_rectangle_beats_kernel_floor():
    for lam in (0.5, 1.0, 2.0):
        w, h = 0.75 * lam, 0.75 / lam
        F = rasterize(BoxUnion.from_tuples([(0, w, 0, h)]), 1 / 64)
        assert eval_N1(F, lam).value >= single_rectangle_bound(lam, w, h) > 0
    with pytest.raises(ValueError):
        single_rectangle_bound(1.0, 2.0, 0.5)


def test_horizontal_form_identity_matches_direct_sum():
    F = rasterize(corpus()["two_boxes"], 1 / 16)
    for lam, eps in ((1.0, 0.0), (2.0, 0.25)):
        a = eval_Mvec(F, lam, eps, "identity", u_tol=1e-4).value
        b = eval_Mvec(F, lam, eps, "direct").value
        assert a == pytest.approx(b, rel=1e-2)


def test_lambda_grid_is_geometric():
    g = lambda_grid(8, 17)
    assert g[0] == pytest.approx(1 / 8) and g[-1] == pytest.approx(8) and g[8] == pytest.approx(1)
    assert np.allclose(g[1:] / g[:-1], g[1] / g[0])


def test_error_scan_is_zero_at_eps_one_and_positive_below():
    F = rasterize(corpus()["cross"], 0.25)
    assert error_part_scan(F, 1.0, 6, n_lambda=16).value == 0.0
    assert error_part_scan(F, 0.125, 6, n_lambda=16).value > 0


def test_structured_scan_ratio_positive_on_square():
    F = rasterize(BoxUnion.from_tuples([(0, 4, 0, 4)]), 0.25)
    sc = structured_lower_scan(F, 4, n_lambda=16)
    assert sc.min_ratio > 0 and len(sc.ratios) == 16


def test_uniform_scan_needs_resolvable_scales():
    F = rasterize(BoxUnion.from_tuples([(0, 4, 0, 4)]), 0.5)
    with pytest.raises(ValueError, match="insufficient"):
        uniform_part_scan(F, 1.0, [0.5, 0.25, 0.125])


def test_rescale_identity_dyadic_lambda_is_exact():
    # at lam = 2^k the rescaled raster is the original one with cells relabelled
    A = corpus()["staircase"]
    for lam in (0.25, 2.0):
        assert rescale_identity_check(A, lam, 1 / 8) < 1e-10


def test_rescale_identity_converges_for_generic_lambda():
    C = corpus()
    assert rescale_identity_check(C["full_square"], 3.0, 1 / 16) < 5e-3
    gaps = [rescale_identity_check(C["random_0"], 3.0, h) for h in (1 / 8, 1 / 16, 1 / 32)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert rescale_identity_check(C["random_0"], 3.0, 1 / 16, extrapolate=True) < 1e-2


def test_form_evaluation_rejects_negative_error():
    with pytest.raises(ValueError):
        FormEvaluation("N0", 1.0, 0.0, 1.0, -1e-3)
