"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the verdict lines are
written straight to the terminal, so they show without ``-s``.  Two criteria
are strict expected failures; the reason is stated on the marker.
"""
import math
import time

import numpy as np
import pytest

from avoidlab.constructions import (BandSet, band_measure, build_AR, certify_AR_avoidance, find_band_corner,
                                    monte_carlo_area, sample_corner_violations)
from avoidlab.corpus import corpus, random_box_union, side
from avoidlab.energy import (DISK_ENERGY, Disk, layer_cake_potential, rasterize_disk, riesz_energy)
from avoidlab.forms import (error_part_scan, eval_N0, rasterization_error_bound, rescale_identity_check,
                            structured_lower_scan, uniform_part_scan)
from avoidlab.geometry import Box, BoxUnion, ConfigKind, boxes_area_range, boxes_corner_feasible, boxunion_avoids
from avoidlab.graham import GrahamParams, GridSet, find_triangle_bruteforce, find_triangle_of_area, graham_extract
from avoidlab.raster import rasterize
from avoidlab.search import SearchConfig, anneal, bandset_avoids, replay_states
from avoidlab.spectral import lp_partition_check, multiplier_decay_fit, multiplier_m


@pytest.fixture
def verdict(request, capsys):
    def emit(ok, detail):
        num = request.node.get_closest_marker("criterion").args[0]
        with capsys.disabled():
            print(f"\n[criterion {num:2d}] {'PASS' if ok else 'FAIL'}: {detail}")
        return ok
    return emit


def closed_form(R):
    m = int(R // 4)
    H = sum(1.0 / j for j in range(1, m + 1))
    return R / 8 * H - m / 2 + sum(1.0 / j ** 2 for j in range(1, m + 1)) / 128


@pytest.mark.criterion(1)
def test_band_construction_measure(verdict):
    t0 = time.perf_counter()
    Rs = [2.0 ** k for k in range(3, 13)]
    errs = [abs(band_measure(build_AR(R)) - closed_form(R)) / R ** 2 for R in Rs]
    B = build_AR(64)
    est, se = monte_carlo_area(B.contains, B.bounds, 2_000_000, np.random.default_rng(1))
    z = abs(est - band_measure(B)) / se
    dt = time.perf_counter() - t0
    ok = max(errs) <= 1e-9 and z <= 3 and dt < 10
    verdict(ok, f"max |measure - closed form|/R^2 = {max(errs):.2e}; MC at R=64 off by {z:.2f} sigma; {dt:.1f} s")
    assert ok


@pytest.mark.criterion(2)
def test_avoidance_certificate(verdict):
    t0 = time.perf_counter()
    certs = {R: certify_AR_avoidance(build_AR(R)).status for R in (8, 64, 512)}
    hits, drawn = sample_corner_violations(build_AR(64), 1_000_000, np.random.default_rng(2))
    bad = BandSet(8, [(4, 4.125), (2.95, 3.05)])
    cert = certify_AR_avoidance(bad)
    w = cert.witness
    real = w is not None and w[2] > 0 and bool(
        bad.contains(np.array([w[0], w[0] + w[2], w[0]]), np.array([w[1], w[1], w[1] + 1 / w[2]])).all())
    dt = time.perf_counter() - t0
    ok = all(s == "PASS" for s in certs.values()) and hits == 0 and drawn == 1_000_000 \
        and cert.status == "FAIL" and real and dt < 60
    verdict(ok, f"certificates {certs}; {hits} violations in {drawn} sampled triples; "
                f"tampered set {cert.status} with witness {w}; {dt:.1f} s")
    assert ok


@pytest.mark.criterion(3)
def test_exact_zero_form_on_AR(verdict):
    F = rasterize(build_AR(64), 1 / 64)
    bound_r = rasterization_error_bound(F)
    worst = 0.0
    for lam in np.geomspace(1 / 64, 64, 16):
        ev = eval_N0(F, F, F, lam)
        worst = max(worst, abs(ev.value) / (ev.quad_error + bound_r))
    ok = worst <= 1
    verdict(ok, f"max |N0| / (quadrature + rasterization bound) = {worst:.2e} over 16 lambdas")
    assert ok


@pytest.mark.criterion(4)
def test_rescaling_identity(verdict):
    worst, where = 0.0, None
    for name, U in corpus().items():
        for lam in (0.25, 0.5, 1.0, 2.0, 4.0):
            r = rescale_identity_check(U, lam, 1 / 16)
            if r > worst:
                worst, where = r, (name, lam)
    ok = worst <= 2e-2
    verdict(ok, f"max relative defect {worst:.2e} at {where} over 10 sets x 5 lambdas")
    assert ok


def test_error_part_vanishes_at_eps_one():
    # the exact-zero half of the error-part criterion, checked on its own
    for U in corpus().values():
        assert error_part_scan(rasterize(U, 1 / 16), 1.0, side(U), 16).value == 0.0


@pytest.mark.criterion(5)
@pytest.mark.xfail(strict=True, reason="V(eps)/ln(1/eps) decreases over eps = 2^-3..2^-8 instead of "
                                       "stabilizing; the spread exceeds 3 on most corpus sets (see ledger)")
def test_error_part_growth(verdict):
    spreads = {}
    for name, U in corpus().items():
        F, cache = rasterize(U, 1 / 32), {}
        v = [error_part_scan(F, 2.0 ** -k, side(U), 16, _structured_cache=cache).value / (k * math.log(2))
             for k in range(3, 9)]
        spreads[name] = max(v) / min(v)
    ok = max(spreads.values()) <= 3
    verdict(ok, "c2/c1 per set: " + ", ".join(f"{k} {v:.2f}" for k, v in spreads.items()))
    assert ok


@pytest.mark.criterion(6)
@pytest.mark.xfail(strict=True, reason="the mollifier spans 40 eps, so |N0 - N^eps| rises before it decays "
                                       "on sets with features below ~20 eps (see ledger)")
def test_uniform_part_decay(verdict):
    eps = [2.0 ** -k for k in range(1, 7)]
    bad = []
    for name, U in corpus().items():
        fit = uniform_part_scan(rasterize(U, 1 / 64), 1.0, eps)
        assert len(fit.eps_used) >= 4
        d, e = fit.differences, fit.errors
        mono = bool(np.all(np.diff(d) <= e[1:] + e[:-1]))
        if fit.noise_limited or not fit.sigma_hat > 0 or not mono:
            bad.append(f"{name} (sigma {fit.sigma_hat:.2f}, monotone {mono})")
    ok = not bad
    verdict(ok, "all sets decay" if ok else "fails on " + ", ".join(bad))
    assert ok


@pytest.mark.criterion(7)
def test_structured_part_floor(verdict):
    L, h, nl = 6.0, 1 / 16, 16
    sq = rasterize(BoxUnion.from_tuples([(0, L, 0, L)]), h)
    c = {f: 0.5 * structured_lower_scan(sq, L, nl, f).min_ratio for f in ("N", "M")}
    rng = np.random.default_rng(7)
    worst = {"N": math.inf, "M": math.inf}
    for _ in range(20):
        U = random_box_union(rng, L=L, n_boxes=6, min_density=0.3)
        F = rasterize(U, h)
        for f in worst:
            worst[f] = min(worst[f], structured_lower_scan(F, L, nl, f).min_ratio / c[f])
    ok = worst["N"] >= 1 and worst["M"] >= 1
    verdict(ok, f"min ratio / calibrated floor: N1 {worst['N']:.3f}, M1 {worst['M']:.3f} (floors "
                f"{c['N']:.4g}, {c['M']:.4g})")
    assert ok


@pytest.mark.criterion(8)
def test_multiplier_decay(verdict):
    t0 = time.perf_counter()
    fit = multiplier_decay_fit(True, np.geomspace(2 ** 5, 2 ** 10, 11))
    anti = abs(multiplier_m(256.0, -256.0)) / abs(multiplier_m(256.0, 256.0))
    dev = lp_partition_check(np.linspace(-4000, 4000, 80001))
    dt = time.perf_counter() - t0
    ok = -0.6 <= fit.slope <= -0.4 and anti <= 1e-2 and dev <= 1e-10 and dt < 300
    verdict(ok, f"diagonal slope {fit.slope:.4f}; anti/diagonal {anti:.2e}; partition deviation {dev:.1e}; "
                f"{dt:.1f} s")
    assert ok


@pytest.mark.criterion(9)
def test_energy_identities(verdict):
    D = rasterize_disk(Disk(0, 0, 1), 1 / 32)
    grid = riesz_energy(D).energy / DISK_ENERGY - 1
    back = riesz_energy(D, "backprojection", n_angles=64).energy / DISK_ENERGY - 1
    rho = 0.5
    d, lc = layer_cake_potential(rasterize_disk(Disk(0, 0, rho), 1 / 64), (0.0, 0.0), 1.0)
    disk_lc = max(abs(d / (2 * math.pi * rho) - 1), abs(lc / (2 * math.pi * rho) - 1))
    S = rasterize(BoxUnion.from_tuples([(0, 1, 0, 1)]), 1 / 32)
    d, lc = layer_cake_potential(S, (0.5, 0.5), 1.0)
    sq_lc = abs(lc / d - 1)
    A = BoxUnion.from_tuples([(0, 1, 0, 0.5), (0.5, 1.5, 1, 2)])
    scale = riesz_energy(rasterize(A.scaled(2, 2), 1 / 16)).energy / riesz_energy(rasterize(A, 1 / 16)).energy / 8 - 1
    ok = abs(grid) <= 0.02 and abs(back) <= 0.02 and disk_lc <= 0.01 and sq_lc <= 0.01 and abs(scale) <= 1e-3
    verdict(ok, f"disk energy rel. error grid {grid:+.2e}, backprojection {back:+.2e}; layer cake disk "
                f"{disk_lc:.1e}, square {sq_lc:.1e}; E(2A)/(8E(A)) - 1 = {scale:+.1e}")
    assert ok


@pytest.mark.criterion(10)
def test_graham_machinery(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(10)
    mismatches = 0
    for _ in range(100):
        n = int(rng.integers(3, 13))
        B = GridSet(n, rng.random((n, n)) < rng.uniform(0.05, 0.5))
        two_T = int(rng.integers(1, 2 * n))
        fast, slow = find_triangle_of_area(B, two_T), find_triangle_bruteforce(B, two_T)
        mismatches += (fast is None) != (slow is None)
    tr = graham_extract(GridSet.full(24), GrahamParams(1.0, 2, 3, 1))
    area = None
    if tr.success:
        (x0, y0), (x1, y1), (x2, y2) = tr.triangle
        area = abs((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)) / 2
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and area == 6 and dt < 30
    verdict(ok, f"{mismatches} existence mismatches vs cubic oracle on 100 grids; extracted triangle "
                f"{tr.triangle} of area {area}; {dt:.1f} s")
    assert ok


@pytest.mark.criterion(11)
def test_search_soundness(verdict):
    corner = ConfigKind.corner()
    replayed = 0
    for cfg in (SearchConfig(8, h=0.25, steps=1500, seed=1),
                SearchConfig(4, ConfigKind.triangle(1.0), h=0.25, steps=300, seed=2)):
        res = anneal(cfg)
        for _, U in replay_states(cfg, res):
            assert boxunion_avoids(U, cfg.cfg)
            replayed += 1
    band_cfg = SearchConfig(12, representation="bands", h=1 / 16, steps=200, seed=3, init="A_R")
    res = anneal(band_cfg)
    for _, B in replay_states(band_cfg, res):
        assert bandset_avoids(B) and find_band_corner(B, n_t=801) is None
        replayed += 1
    seeded = []
    for R in (8, 16, 32):
        r = anneal(SearchConfig(R, representation="bands", h=1 / 16, steps=60, seed=R, init="A_R"))
        seeded.append(r.best_measure - band_measure(build_AR(R)))
    t0 = time.perf_counter()
    big = anneal(SearchConfig(64, h=0.25, steps=5000, seed=0))
    dt = time.perf_counter() - t0
    final_ok = bool(boxunion_avoids(big.best, corner))
    ok = min(seeded) >= 0 and big.best_measure > 32 and final_ok and dt < 600
    verdict(ok, f"{replayed} replayed states re-checked; seeded gains over A_R {np.round(seeded, 3).tolist()}; "
                f"empty start R=64 reaches {big.best_measure:.2f} > 32 in {dt:.1f} s")
    assert ok


def _rand_box(rng):
    x, y = rng.uniform(0, 4, 2)
    w, h = rng.uniform(0.05, 2.5, 2)
    return Box.from_bounds(x, x + w, y, y + h)


def _in(b, x, y):
    return (b.X.lo <= x) & (x <= b.X.hi) & (b.Y.lo <= y) & (y <= b.Y.hi)


@pytest.mark.criterion(12)
def test_interval_oracles(verdict):
    rng = np.random.default_rng(12)
    n = 100_000
    corner_bad = corner_hits = area_bad = 0
    for _ in range(200):
        r0, r1, r2 = (_rand_box(rng) for _ in range(3))
        # corner: anchor in r0, horizontal partner abscissa in r1
        x = rng.uniform(r0.X.lo, r0.X.hi, n)
        y = rng.uniform(r0.Y.lo, r0.Y.hi, n)
        t = rng.uniform(r1.X.lo, r1.X.hi, n) - x
        pos = t > 0
        hit = pos & _in(r1, x + t, y) & _in(r2, x, y + 1 / np.where(pos, t, 1.0))
        if hit.any():
            corner_hits += 1
            corner_bad += not boxes_corner_feasible(r0, r1, r2)
    for _ in range(200):
        bs = [_rand_box(rng) for _ in range(3)]
        P = [(rng.uniform(b.X.lo, b.X.hi, n), rng.uniform(b.Y.lo, b.Y.hi, n)) for b in bs]
        # signed cross product = twice the signed area
        cross = (P[1][0] - P[0][0]) * (P[2][1] - P[0][1]) - (P[2][0] - P[0][0]) * (P[1][1] - P[0][1])
        iv = boxes_area_range(*bs)
        tol = 1e-12 * (1 + abs(iv.lo) + abs(iv.hi))
        area_bad += bool(np.any(cross < iv.lo - tol) or np.any(cross > iv.hi + tol))
    ok = corner_bad == 0 and area_bad == 0
    verdict(ok, f"corner: {corner_bad} contradictions ({corner_hits} of 200 triples hit by sampling); "
                f"area range: {area_bad} contradictions on 200 triples")
    assert ok
