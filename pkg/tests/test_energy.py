import math

import numpy as np
import pytest
from scipy import integrate

from avoidlab.constructions import build_AR
from avoidlab.energy import (DISK_ENERGY, SQUARE_SELF_ENERGY, Disk, EnergyReport, backprojection_energy,
                             cell_pair_coefficient, direct_potential, hls_ratio, kernel_table,
                             layer_cake_potential, montecarlo_energy, rasterize_disk, rect_potential,
                             riesz_energy, xray_transform)
from avoidlab.geometry import BoxUnion
from avoidlab.raster import rasterize


def test_rect_potential_matches_quadrature():
    for p in ((2.0, 0.5), (-0.7, 1.3), (0.3, 0.4)):
        ref = integrate.dblquad(lambda y, x: 1 / math.hypot(p[0] - x, p[1] - y), 0, 1, 0, 2,
                                epsabs=1e-11)[0]
        assert rect_potential(p[0], p[1], 0, 1, 0, 2) == pytest.approx(ref, rel=1e-7)


def test_self_cell_coefficient_is_square_energy():
    assert cell_pair_coefficient(0, 0) == pytest.approx(SQUARE_SELF_ENERGY, rel=1e-6)
    assert SQUARE_SELF_ENERGY == pytest.approx(2.97320, abs=1e-5)


def test_far_coefficients_follow_moment_expansion():
    for d in ((4, 0), (3, 3), (6, 2)):
        r = math.hypot(*d)
        assert cell_pair_coefficient(*d) == pytest.approx(1 / r + 1 / (12 * r ** 3), rel=2e-4)


def test_kernel_table_is_symmetric():
    K = kernel_table(5, 4)
    assert K.shape == (9, 7)
    assert np.allclose(K, K[::-1, :]) and np.allclose(K, K[:, ::-1])


def test_unit_square_energy_three_ways(rng):
    F = rasterize(BoxUnion.from_tuples([(0, 1, 0, 1)]), 1 / 16)
    assert riesz_energy(F).energy == pytest.approx(SQUARE_SELF_ENERGY, rel=1e-5)
    e, se = montecarlo_energy(F, 1_000_000, rng)
    assert abs(e - SQUARE_SELF_ENERGY) < 4 * se
    assert backprojection_energy(F, 64) == pytest.approx(SQUARE_SELF_ENERGY, rel=1e-3)


def test_disk_energy_grid_and_backprojection():
    F = rasterize_disk(Disk(0, 0, 1), 1 / 32)
    assert riesz_energy(F).energy == pytest.approx(DISK_ENERGY, rel=5e-3)
    assert riesz_energy(F, "backprojection").energy == pytest.approx(DISK_ENERGY, rel=5e-3)


def test_dilation_scales_energy_by_cube():
    A = BoxUnion.from_tuples([(0, 1, 0, 0.5), (0.5, 1.5, 1, 2)])
    e1 = riesz_energy(rasterize(A, 1 / 16)).energy
    e2 = riesz_energy(rasterize(A.scaled(2, 2), 1 / 16)).energy
    assert e2 / e1 == pytest.approx(8.0, rel=1e-3)


def test_xray_transform_conserves_mass():
    F = rasterize(BoxUnion.from_tuples([(0, 2, 0, 1), (3, 4, 2, 3)]), 1 / 8)
    for th in (0.0, 0.4, math.pi / 4, 2.5):
        y, G = xray_transform(F, th)
        assert np.sum(G) * (y[1] - y[0]) == pytest.approx(F.measure(), rel=1e-12)


def test_xray_of_bands_along_antidiagonal_is_chord():
    # at theta = pi/4 the projection coordinate is (x + y)/sqrt 2: bands project to chords
    R = 8
    F = rasterize(build_AR(R), 1 / 64)
    y, G = xray_transform(F, math.pi / 4)
    c = 4.0625  # middle of the band [4, 4.125]
    k = np.argmin(np.abs(y - c / math.sqrt(2)))
    assert G[k] == pytest.approx(math.sqrt(2) * min(c, 2 * R - c), rel=2e-2)


def test_layer_cake_on_disk_and_square():
    F = rasterize_disk(Disk(0, 0, 0.5), 1 / 64)
    d, lc = layer_cake_potential(F, (0.0, 0.0), 1.0)
    assert d == pytest.approx(math.pi, rel=1e-2) and lc == pytest.approx(math.pi, rel=1e-2)
    S = rasterize(BoxUnion.from_tuples([(0, 1, 0, 1)]), 1 / 32)
    d, lc = layer_cake_potential(S, (0.5, 0.5), 1.0)
    assert lc == pytest.approx(d, rel=1e-2)
    assert d == pytest.approx(direct_potential(S, (0.5, 0.5)))


def test_layer_cake_rejects_small_radius():
    S = rasterize(BoxUnion.from_tuples([(0, 1, 0, 1)]), 1 / 8)
    with pytest.raises(ValueError):
        layer_cake_potential(S, (0.5, 0.5), 0.2)


def test_disk_beats_square_beats_strip_in_normalized_energy():
    disk = hls_ratio(rasterize_disk(Disk(0, 0, 1), 1 / 16))
    square = hls_ratio(rasterize(BoxUnion.from_tuples([(0, 1, 0, 1)]), 1 / 16))
    strip = hls_ratio(rasterize(BoxUnion.from_tuples([(0, 4, 0, 0.25)]), 1 / 16))
    assert disk > square > strip


def test_energy_report_validation():
    with pytest.raises(ValueError):
        EnergyReport(-1.0, "grid", 0.0)
    with pytest.raises(ValueError):
        riesz_energy(rasterize(BoxUnion.from_tuples([(0, 1, 0, 1)]), 0.25), "spectral")
