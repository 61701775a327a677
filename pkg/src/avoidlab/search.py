"""Greedy and annealing searches for large configuration-avoiding sets.

Two representations:

* ``cells`` -- closed grid cells of pitch h in [0, R]^2.  For the corner,
  feasibility of a cell triple depends only on integer offsets, so the
  feasible offset patterns are tabulated once with the exact box predicate
  and every incremental check is an occupancy lookup.
* ``bands`` -- antidiagonal bands {c_lo <= x + y <= c_hi} in [0, R]^2, checked
  exactly per band triple (see :func:`band_triples_feasible`).

Avoidance is a hard constraint: infeasible proposals are rejected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .constructions import BandSet, band_measure, build_AR
from .geometry import (HYPERBOLIC_CORNER, Box, BoxUnion, ConfigKind,
                       _area_hits, _area_range_arrays, _corner_feasible_arrays, boxunion_avoids)


@dataclass
class SearchConfig:
    R: float
    cfg: ConfigKind = field(default_factory=ConfigKind.corner)
    representation: str = "cells"
    h: float = 0.25
    T0: Optional[float] = None  # default: one cell's measure h^2
    cooling: float = 0.995
    steps: int = 1000
    seed: int = 0
    init: str = "empty"  # empty | A_R | random
    grow: float = 0.8  # share of cell additions proposed next to an occupied cell

    def __post_init__(self):
        if self.R <= 0 or self.h <= 0:
            raise ValueError("R and h must be positive")
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.representation not in ("cells", "bands"):
            raise ValueError(f"unknown representation {self.representation!r}")
        if self.init not in ("empty", "A_R", "random"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.representation == "bands" and self.cfg.tag != HYPERBOLIC_CORNER:
            raise ValueError("band representation supports the corner configuration only")
        if self.init == "A_R" and self.representation != "bands":
            raise ValueError("init A_R requires the band representation")
        if self.representation == "cells":
            n = self.R / self.h
            if abs(n - round(n)) > 1e-9:
                raise ValueError("R must be a multiple of h")

    @property
    def temperature0(self) -> float:
        return self.T0 if self.T0 is not None else self.h * self.h


# --------------------------------------------------------------------------
# cell representation

def corner_patterns_h(n: int, h: float, signed_t: bool = False) -> np.ndarray:
    """Rows (di1, dj1, di2, dj2): cell offsets of r1 and r2 from r0 admitting a corner."""
    a = np.arange(-(n - 1) if signed_t else 0, n)
    out = []
    for dj1 in (-1, 0, 1):
        for di2 in (-1, 0, 1):
            A, B = np.meshgrid(a, a, indexing="ij")  # A: column offset of r1, B: row offset of r2
            f = _corner_feasible_arrays(
                0.0, h, 0.0, h,
                A * h, (A + 1) * h, dj1 * h, (dj1 + 1) * h,
                di2 * h, (di2 + 1) * h, B * h, (B + 1) * h, signed_t)
            ia, ib = np.nonzero(f)
            out.append(np.stack([a[ia], np.full(len(ia), dj1), np.full(len(ia), di2), a[ib]], axis=1))
    return np.concatenate(out).astype(np.int64)


class CellState:
    """Occupancy of the n x n cell grid with incremental feasibility checks."""

    def __init__(self, R: float, h: float, cfg: ConfigKind):
        self.R, self.h, self.cfg = R, h, cfg
        self.n = int(round(R / h))
        n = self.n
        self.pad = n
        self.occ = np.zeros((3 * n, 3 * n), dtype=bool)  # padded so offsets never leave the array
        self.count = 0
        if cfg.tag == HYPERBOLIC_CORNER:
            self.patterns = corner_patterns_h(n, h, cfg.signed_t)
        else:
            self.patterns = None

    # -- basic access
    def occupied(self, i: int, j: int) -> bool:
        return bool(self.occ[i + self.pad, j + self.pad])

    def cells(self) -> np.ndarray:
        ii, jj = np.nonzero(self.occ)
        return np.stack([ii - self.pad, jj - self.pad], axis=1)

    def set(self, i: int, j: int, value: bool):
        cur = self.occ[i + self.pad, j + self.pad]
        if cur != value:
            self.occ[i + self.pad, j + self.pad] = value
            self.count += 1 if value else -1

    @property
    def measure(self) -> float:
        return self.count * self.h * self.h

    def copy_occ(self) -> np.ndarray:
        n, p = self.n, self.pad
        return self.occ[p:p + n, p:p + n].copy()

    # -- feasibility
    def can_add(self, i: int, j: int) -> bool:
        """True iff adding cell (i, j) keeps the set avoiding."""
        if self.occupied(i, j):
            return True
        self.occ[i + self.pad, j + self.pad] = True
        try:
            if self.cfg.tag == HYPERBOLIC_CORNER:
                return not self._corner_hit(i, j)
            return not self._triangle_hit(i, j)
        finally:
            self.occ[i + self.pad, j + self.pad] = False

    def _corner_hit(self, i, j) -> bool:
        P = self.patterns
        occ, p = self.occ, self.pad
        ci, cj = i + p, j + p
        # new cell as r0
        if np.any(occ[ci + P[:, 0], cj + P[:, 1]] & occ[ci + P[:, 2], cj + P[:, 3]]):
            return True
        # as r1
        i0, j0 = ci - P[:, 0], cj - P[:, 1]
        if np.any(occ[i0, j0] & occ[i0 + P[:, 2], j0 + P[:, 3]]):
            return True
        # as r2
        i0, j0 = ci - P[:, 2], cj - P[:, 3]
        return bool(np.any(occ[i0, j0] & occ[i0 + P[:, 0], j0 + P[:, 1]]))

    def _triangle_hit(self, i, j) -> bool:
        h = self.h
        C = self.cells()
        boxes = np.stack([C[:, 0] * h, (C[:, 0] + 1) * h, C[:, 1] * h, (C[:, 1] + 1) * h], axis=1)
        b0 = np.array([i * h, (i + 1) * h, j * h, (j + 1) * h])
        J, K = np.meshgrid(np.arange(len(boxes)), np.arange(len(boxes)), indexing="ij")
        m = J <= K
        lo, hi = _area_range_arrays(b0[None, :], boxes[J[m]], boxes[K[m]])
        return bool(np.any(_area_hits(lo, hi, self.cfg.area)))

    def avoids_from_scratch(self) -> bool:
        """Full re-check by the independent box-union checker."""
        return bool(boxunion_avoids(cells_to_boxunion(self.copy_occ(), self.h, self.R), self.cfg))


def cells_to_boxunion(occ: np.ndarray, h: float, R: float) -> BoxUnion:
    """Merge occupied cells into maximal horizontal runs, then stack equal runs vertically."""
    n = occ.shape[0]
    runs = {}
    for j in range(n):
        row = occ[:, j]
        if not row.any():
            continue
        d = np.diff(np.concatenate([[0], row.astype(np.int8), [0]]))
        starts = np.nonzero(d == 1)[0]
        ends = np.nonzero(d == -1)[0]
        for s, e in zip(starts, ends):
            runs.setdefault((int(s), int(e)), []).append(j)
    boxes = []
    for (s, e), js in sorted(runs.items()):
        js = sorted(js)
        start = prev = js[0]
        for y in js[1:] + [None]:
            if y is not None and y == prev + 1:
                prev = y
                continue
            boxes.append(Box.from_bounds(s * h, e * h, start * h, (prev + 1) * h))
            if y is not None:
                start = prev = y
    return BoxUnion(boxes, Box.from_bounds(0, R, 0, R))


# --------------------------------------------------------------------------
# band representation

def _band_constraints(la, ha, lb, hb, ld, hd, R):
    """(c, beta, gamma) with c + beta t + gamma/t >= 0 for every upper-minus-lower pair."""
    R2 = 2.0 * R
    z = np.zeros_like(la)
    one = np.ones_like(la)
    rows = [
        (ha - la, z, z), (ha - lb, one, z), (ha - ld, z, one),
        (hb - la, -one, z), (hb - lb, z, z), (hb - ld, -one, one),
        (hd - la, z, -one), (hd - lb, one, -one), (hd - ld, z, z),
        (R2 - la, -one, -one), (R2 - lb, z, -one), (R2 - ld, -one, z),
        (R + z, -one, z), (R + z, z, -one),
    ]
    c = np.stack([r[0] for r in rows], axis=-1)
    b = np.stack([r[1] for r in rows], axis=-1)
    g = np.stack([r[2] for r in rows], axis=-1)
    return c, b, g


def band_triples_feasible(la, ha, lb, hb, ld, hd, R: float, tol: float = 1e-12):
    """Exact test for a corner with (x, y) in band a, (x + t, y) in b, (x, y + 1/t) in d, t > 0.

    With c0 = x + y the conditions are max(lower_i(t)) <= min(upper_k(t)) for
    affine-in-(t, 1/t) bounds, plus the square constraints.  Each pairwise
    inequality times t is a quadratic in t, so all signs are constant between
    consecutive roots: checking roots, midpoints and the ends of [1/R, R]
    decides feasibility.  ``tol`` makes the test conservative (near-touching
    triples count as feasible).
    """
    arrs = [np.atleast_1d(np.asarray(v, dtype=float)) for v in (la, ha, lb, hb, ld, hd)]
    c, b, g = _band_constraints(*arrs, R)
    # roots of b t^2 + c t + g
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = c * c - 4 * b * g
        sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
        quad = b != 0
        r1 = np.where(quad, (-c + sq) / (2 * np.where(quad, b, 1)), -g / np.where(c != 0, c, np.nan))
        r2 = np.where(quad, (-c - sq) / (2 * np.where(quad, b, 1)), np.nan)
    lo_t, hi_t = 1.0 / R, float(R)
    pts = np.concatenate([r1, r2, np.broadcast_to([lo_t, 1.0, hi_t], r1.shape[:-1] + (3,))], axis=-1)
    pts = np.where(np.isfinite(pts), np.clip(pts, lo_t, hi_t), 1.0)
    pts = np.sort(pts, axis=-1)
    mids = 0.5 * (pts[..., 1:] + pts[..., :-1])
    cand = np.concatenate([pts, mids], axis=-1)  # (..., P)
    t = cand[..., :, None]
    val = b[..., None, :] * t * t + c[..., None, :] * t + g[..., None, :]
    scale = 1.0 + np.abs(c[..., None, :]) * t + np.abs(b[..., None, :]) * t * t + np.abs(g[..., None, :])
    ok = np.all(val >= -tol * scale, axis=-1)
    return np.any(ok, axis=-1)


def bandset_corner_witness(B: BandSet):
    """First band triple (a, b, d) admitting a corner, or None (exact up to ``tol``)."""
    m = len(B.bands)
    if m == 0:
        return None
    lo = np.array([a for a, _ in B.bands])
    hi = np.array([b for _, b in B.bands])
    A, Bi, D = np.meshgrid(np.arange(m), np.arange(m), np.arange(m), indexing="ij")
    A, Bi, D = A.ravel(), Bi.ravel(), D.ravel()
    f = band_triples_feasible(lo[A], hi[A], lo[Bi], hi[Bi], lo[D], hi[D], B.R)
    if not f.any():
        return None
    k = int(np.argmax(f))
    return int(A[k]), int(Bi[k]), int(D[k])


def bandset_avoids(B: BandSet) -> bool:
    return bandset_corner_witness(B) is None


class BandState:
    def __init__(self, R: float, bands: Sequence = ()):
        self.R = R
        self.bands = sorted(((float(a), float(b)) for a, b in bands), key=lambda ab: -ab[0])

    def as_bandset(self) -> BandSet:
        return BandSet(self.R, list(self.bands))

    @property
    def measure(self) -> float:
        return band_measure(self.as_bandset()) if self.bands else 0.0

    def feasible_with(self, bands, changed: int) -> bool:
        """Check triples that involve band index ``changed`` of the candidate list."""
        m = len(bands)
        lo = np.array([a for a, _ in bands])
        hi = np.array([b for _, b in bands])
        idx = np.arange(m)
        X, Y = np.meshgrid(idx, idx, indexing="ij")
        X, Y = X.ravel(), Y.ravel()
        k = np.full(len(X), changed)
        trip = np.concatenate([np.stack([k, X, Y], 1), np.stack([X, k, Y], 1), np.stack([X, Y, k], 1)])
        a, b, d = trip.T
        return not bool(np.any(band_triples_feasible(lo[a], hi[a], lo[b], hi[b], lo[d], hi[d], self.R)))


def _bands_valid(bands, R) -> bool:
    s = sorted(bands, key=lambda ab: -ab[0])
    for a, b in s:
        if not (0 <= a < b <= 2 * R):
            return False
    return all(s[k + 1][1] < s[k][0] for k in range(len(s) - 1))


# --------------------------------------------------------------------------
# greedy and annealing

def _greedy_order(n: int):
    """Row-major from the top-right corner."""
    for j in range(n - 1, -1, -1):
        for i in range(n - 1, -1, -1):
            yield i, j


def greedy_fill(config: SearchConfig) -> BoxUnion:
    if config.representation != "cells":
        raise ValueError("greedy fill works on cells")
    st = CellState(config.R, config.h, config.cfg)
    for i, j in _greedy_order(st.n):
        if st.can_add(i, j):
            st.set(i, j, True)
    return cells_to_boxunion(st.copy_occ(), config.h, config.R)


@dataclass
class HistoryRow:
    step: int
    move: str
    detail: tuple
    feasible: bool
    accepted: bool
    measure: float
    temperature: float


@dataclass
class AnnealResult:
    best: object  # BoxUnion (cells) or BandSet (bands)
    best_measure: float
    final_measure: float
    history: list
    initial: object


def _init_cells(config: SearchConfig, rng) -> CellState:
    st = CellState(config.R, config.h, config.cfg)
    if config.init == "random":
        for _ in range(st.n * st.n // 4):
            i, j = rng.integers(0, st.n, size=2)
            if st.can_add(int(i), int(j)):
                st.set(int(i), int(j), True)
    return st


def _init_bands(config: SearchConfig, rng) -> BandState:
    if config.init == "A_R":
        return BandState(config.R, build_AR(config.R).bands)
    st = BandState(config.R)
    if config.init == "random":
        for _ in range(int(config.R)):
            c = rng.uniform(0, 2 * config.R - config.h)
            cand = st.bands + [(c, c + config.h)]
            if _bands_valid(cand, config.R):
                cand = sorted(cand, key=lambda ab: -ab[0])
                k = cand.index((c, c + config.h))
                if st.feasible_with(cand, k):
                    st.bands = cand
    return st


def anneal(config: SearchConfig) -> AnnealResult:
    """Metropolis walk with hard avoidance; returns the best-ever state and the history."""
    rng = np.random.default_rng(config.seed)
    if config.representation == "cells":
        return _anneal_cells(config, rng)
    return _anneal_bands(config, rng)


def _accept(delta, T, rng) -> bool:
    if delta >= 0:
        return True
    return bool(T > 0 and rng.random() < math.exp(delta / T))


def _anneal_cells(config, rng) -> AnnealResult:
    st = _init_cells(config, rng)
    n, h = st.n, config.h
    initial = cells_to_boxunion(st.copy_occ(), h, config.R)
    best_occ, best_m = st.copy_occ(), st.measure
    T = config.temperature0
    hist = []
    cell_area = h * h
    for step in range(config.steps):
        u = rng.random()
        if u < 0.5 or st.count == 0:
            if st.count and rng.random() < config.grow:
                # grow: a neighbour of a random occupied cell
                C = st.cells()
                i, j = (int(v) for v in C[rng.integers(len(C))] + rng.integers(-1, 2, size=2))
                i, j = min(max(i, 0), n - 1), min(max(j, 0), n - 1)
            else:
                i, j = (int(v) for v in rng.integers(0, n, size=2))
            if st.occupied(i, j):
                hist.append(HistoryRow(step, "add", (i, j), True, False, st.measure, T))
            else:
                ok = st.can_add(i, j)
                acc = ok
                if acc:
                    st.set(i, j, True)
                hist.append(HistoryRow(step, "add", (i, j), ok, acc, st.measure, T))
        else:
            C = st.cells()
            i, j = (int(v) for v in C[rng.integers(len(C))])
            if u < 0.75:
                acc = _accept(-cell_area, T, rng)
                if acc:
                    st.set(i, j, False)
                hist.append(HistoryRow(step, "remove", (i, j), True, acc, st.measure, T))
            else:
                di, dj = (int(v) for v in rng.integers(-1, 2, size=2))
                i2, j2 = i + di, j + dj
                if (di, dj) == (0, 0) or not (0 <= i2 < n and 0 <= j2 < n) or st.occupied(i2, j2):
                    hist.append(HistoryRow(step, "shift", (i, j, i2, j2), True, False, st.measure, T))
                else:
                    st.set(i, j, False)
                    ok = st.can_add(i2, j2)
                    if ok:
                        st.set(i2, j2, True)
                    else:
                        st.set(i, j, True)
                    hist.append(HistoryRow(step, "shift", (i, j, i2, j2), ok, ok, st.measure, T))
        if st.measure > best_m:
            best_m, best_occ = st.measure, st.copy_occ()
        T *= config.cooling
    best = cells_to_boxunion(best_occ, h, config.R)
    return AnnealResult(best, best_m, st.measure, hist, initial)


def _anneal_bands(config, rng) -> AnnealResult:
    st = _init_bands(config, rng)
    R, w = config.R, config.h
    initial = st.as_bandset()
    best_b, best_m = list(st.bands), st.measure
    T = config.temperature0
    hist = []
    for step in range(config.steps):
        u = rng.random()
        cand, move = None, None
        if u < 0.4 or not st.bands:
            c = rng.uniform(0, 2 * R - w)
            new = (c, c + w * rng.uniform(0.05, 1.0))
            cand, move = st.bands + [new], ("add", new)
        elif u < 0.55:
            k = int(rng.integers(len(st.bands)))
            cand, move = st.bands[:k] + st.bands[k + 1:], ("remove", st.bands[k])
        elif u < 0.8:
            k = int(rng.integers(len(st.bands)))
            d = rng.uniform(-w, w)
            a, b = st.bands[k]
            new = (a + d, b + d)
            cand, move = st.bands[:k] + [new] + st.bands[k + 1:], ("shift", (a, b) + new)
        else:
            k = int(rng.integers(len(st.bands)))
            a, b = st.bands[k]
            d = rng.uniform(0, w / 4)
            new = (a - d, b) if rng.random() < 0.5 else (a, b + d)
            cand, move = st.bands[:k] + [new] + st.bands[k + 1:], ("widen", (a, b) + new)
        name, payload = move
        if not _bands_valid(cand, R):
            hist.append(HistoryRow(step, name, tuple(payload), False, False, st.measure, T))
            T *= config.cooling
            continue
        cand = sorted(cand, key=lambda ab: -ab[0])
        if name == "remove" or not cand:
            ok = True
        else:
            ok = st.feasible_with(cand, cand.index(tuple(payload[-2:])))
        acc = False
        if ok:
            new_m = band_measure(BandSet(R, cand)) if cand else 0.0
            acc = _accept(new_m - st.measure, T, rng)
            if acc:
                st.bands = cand
        hist.append(HistoryRow(step, name, tuple(payload), ok, acc, st.measure, T))
        if st.measure > best_m:
            best_m, best_b = st.measure, list(st.bands)
        T *= config.cooling
    return AnnealResult(BandSet(R, best_b), best_m, st.measure, hist, initial)


def anneal_chains(config: SearchConfig, seeds: Sequence[int]):
    """Independent chains; best by measure, ties broken by the smaller seed."""
    from dataclasses import replace
    results = [(s, anneal(replace(config, seed=int(s)))) for s in seeds]
    seed, best = min(results, key=lambda sr: (-sr[1].best_measure, sr[0]))
    return seed, best, results


def replay_states(config: SearchConfig, result: AnnealResult):
    """Yield the state after every step by re-applying the accepted moves."""
    if config.representation == "cells":
        n = int(round(config.R / config.h))
        occ = np.zeros((n, n), dtype=bool)
        for b in result.initial.boxes:
            i0, i1 = int(round(b.X.lo / config.h)), int(round(b.X.hi / config.h))
            j0, j1 = int(round(b.Y.lo / config.h)), int(round(b.Y.hi / config.h))
            occ[i0:i1, j0:j1] = True
        for row in result.history:
            if row.accepted:
                if row.move == "add":
                    occ[row.detail] = True
                elif row.move == "remove":
                    occ[row.detail] = False
                else:
                    i, j, i2, j2 = row.detail
                    occ[i, j] = False
                    occ[i2, j2] = True
            yield row.step, cells_to_boxunion(occ, config.h, config.R)
    else:
        bands = list(result.initial.bands)
        for row in result.history:
            if row.accepted:
                if row.move == "add":
                    bands.append(row.detail)
                elif row.move == "remove":
                    bands.remove(row.detail)
                else:
                    # shift/widen details are (old_lo, old_hi, new_lo, new_hi)
                    bands.remove(tuple(row.detail[:2]))
                    bands.append(tuple(row.detail[2:]))
                bands.sort(key=lambda ab: -ab[0])
            yield row.step, BandSet(config.R, list(bands))


# --------------------------------------------------------------------------
# density table

@dataclass
class DensityRow:
    R: float
    best_measure: float
    band_measure: float
    curves: dict


def theory_curves(R: float, constants: dict) -> dict:
    """Bound shapes with user constants; keys among 'RlogR', 'quarter', 'third', 'half'."""
    out = {}
    L = math.log(R) if R > 1 else float("nan")
    q = math.log(L) / L if R > math.e else float("nan")
    shapes = {
        "RlogR": R * L,
        "quarter": R * R * q ** 0.25 if q == q else float("nan"),
        "third": R * R * q ** (1 / 3) if q == q else float("nan"),
        "half": R * R * q ** 0.5 if q == q else float("nan"),
    }
    for k, c in constants.items():
        if k not in shapes:
            raise ValueError(f"unknown curve {k!r}")
        out[k] = c * shapes[k]
    return out


def density_curve(R_list: Sequence[float], cfg: ConfigKind, budget: int, h: float = 0.25,
                  seed: int = 0, constants: Optional[dict] = None) -> list:
    """Best measure found per R (greedy on cells, annealing on bands seeded with A_R)."""
    R_list = list(R_list)
    if any(b <= a for a, b in zip(R_list, R_list[1:])):
        raise ValueError("R_list must be increasing")
    rows = []
    for R in R_list:
        best = greedy_fill(SearchConfig(R, cfg, "cells", h, steps=0, seed=seed)).measure()
        bm = band_measure(build_AR(R)) if R >= 4 else 0.0
        if cfg.tag == HYPERBOLIC_CORNER and R >= 4:
            res = anneal(SearchConfig(R, cfg, "bands", h=1 / 16, steps=budget, seed=seed, init="A_R"))
            best = max(best, res.best_measure)
        rows.append(DensityRow(R, best, bm, theory_curves(R, constants or {})))
    return rows
