"""The antidiagonal band construction and its avoidance certificate.

Band ``j`` of ``A_R`` is ``{(x, y) in [0,R]^2 : R - 4j <= x + y <= R - 4j + 1/(8j)}``
for ``j = 1..floor(R/4)``.  Bands live in the rotated coordinate ``c = x + y``.
Logarithms are natural.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .geometry import Box, BoxUnion


def _lower_triangle_area(c, R):
    """Area of {x + y <= c} inside [0,R]^2."""
    c = np.clip(np.asarray(c, dtype=float), 0.0, 2.0 * R)
    return np.where(c <= R, 0.5 * c * c, R * R - 0.5 * (2 * R - c) ** 2)


@dataclass
class BandSet:
    R: float
    bands: list  # (c_lo, c_hi), sorted by decreasing c

    def __post_init__(self):
        self.bands = [(float(a), float(b)) for a, b in self.bands]
        for a, b in self.bands:
            if not (0 <= a < b <= 2 * self.R):
                raise ValueError(f"invalid band ({a}, {b}) for R={self.R}")
        for (a1, b1), (a2, b2) in zip(self.bands, self.bands[1:]):
            if not b2 <= a1:
                raise ValueError("bands must be disjoint and sorted by decreasing c")

    @property
    def bounds(self):
        return (0.0, float(self.R), 0.0, float(self.R))

    def _sorted_edges(self):
        lo = np.array([a for a, _ in self.bands][::-1])
        hi = np.array([b for _, b in self.bands][::-1])
        return lo, hi

    def band_index_of(self, c) -> np.ndarray:
        """Index (into ``bands``) of the band containing ``c``, or -1."""
        c = np.asarray(c, dtype=float)
        if not self.bands:
            return np.full(c.shape, -1)
        lo, hi = self._sorted_edges()
        pos = np.searchsorted(lo, c, side="right") - 1
        safe = np.clip(pos, 0, len(lo) - 1)
        inside = (pos >= 0) & (c <= hi[safe])
        return np.where(inside, len(lo) - 1 - safe, -1)

    def contains(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        in_square = (x >= 0) & (x <= self.R) & (y >= 0) & (y <= self.R)
        return in_square & (self.band_index_of(x + y) >= 0)

    def measure(self) -> float:
        return band_measure(self)

    def to_boxunion(self, slab: float) -> BoxUnion:
        """Outer approximation by horizontal slabs of height ``slab`` (flagged inexact)."""
        R = self.R
        boxes = []
        n = int(math.ceil(R / slab))
        for i in range(n):
            y0, y1 = i * slab, min((i + 1) * slab, R)
            for a, b in self.bands:
                x0, x1 = max(0.0, a - y1), min(R, b - y0)
                if x0 <= x1:
                    boxes.append(Box.from_bounds(x0, x1, y0, y1))
        u = BoxUnion(boxes, Box.from_bounds(0, R, 0, R), inexact=True)
        return u.normalized()


def build_AR(R: float) -> BandSet:
    if R < 4:
        raise ValueError(f"R={R} too small for one band")
    m = int(math.floor(R / 4))
    return BandSet(R, [(R - 4 * j, R - 4 * j + 1.0 / (8 * j)) for j in range(1, m + 1)])


def band_measure(B: BandSet) -> float:
    total = 0.0
    for a, b in B.bands:
        total += float(_lower_triangle_area(b, B.R) - _lower_triangle_area(a, B.R))
    return total


def AR_measure_closed_form(R: float) -> float:
    """(R/8) H_m - m/2 + (1/128) sum_{j<=m} j^-2 with m = floor(R/4)."""
    m = int(math.floor(R / 4))
    j = np.arange(1, m + 1, dtype=float)
    return R / 8 * np.sum(1.0 / j) - m / 2 + np.sum(1.0 / j ** 2) / 128


def sample_points(B: BandSet, n: int, rng: np.random.Generator):
    """Uniform samples from the band set (area-weighted band choice, then rejection)."""
    areas = np.array([float(_lower_triangle_area(b, B.R) - _lower_triangle_area(a, B.R))
                      for a, b in B.bands])
    idx = rng.choice(len(areas), size=n, p=areas / areas.sum())
    xs = np.empty(n)
    ys = np.empty(n)
    todo = np.arange(n)
    lo = np.array([a for a, _ in B.bands])
    hi = np.array([b for _, b in B.bands])
    while len(todo):
        k = idx[todo]
        c = lo[k] + (hi[k] - lo[k]) * rng.random(len(todo))
        # along x + y = c, x is uniform on the chord; rejection fixes the c-density
        x_lo = np.maximum(0.0, c - B.R)
        x = x_lo + rng.random(len(todo)) * (np.minimum(c, B.R) - x_lo)
        y = c - x
        chord = np.where(c <= B.R, c, 2 * B.R - c)
        c_peak = np.clip(B.R, lo[k], hi[k])
        cmax = np.where(c_peak <= B.R, c_peak, 2 * B.R - c_peak)
        accept = rng.random(len(todo)) * cmax <= chord
        xs[todo[accept]] = x[accept]
        ys[todo[accept]] = y[accept]
        todo = todo[~accept]
    return xs, ys


def monte_carlo_area(contains, bounds, n: int, rng: np.random.Generator, batch=1_000_000):
    """Hit-or-miss area with its standard error."""
    x0, x1, y0, y1 = bounds
    box = (x1 - x0) * (y1 - y0)
    hits = 0
    done = 0
    while done < n:
        k = min(batch, n - done)
        x = x0 + (x1 - x0) * rng.random(k)
        y = y0 + (y1 - y0) * rng.random(k)
        hits += int(np.count_nonzero(contains(x, y)))
        done += k
    p = hits / n
    return box * p, box * math.sqrt(p * (1 - p) / n)


# --------------------------------------------------------------------------
# certificate

@dataclass
class CaseCheck:
    case: str
    band: int
    inequality: str
    margin: Fraction

    @property
    def ok(self) -> bool:
        return self.margin > 0


@dataclass
class Certificate:
    passed: bool
    checks: list = field(default_factory=list)
    violated: Optional[CaseCheck] = None
    witness: Optional[tuple] = None  # (x, y, t) realizing a corner, if one was found

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def min_margin(self, case: str) -> Fraction:
        return min(c.margin for c in self.checks if c.case == case)

    def summary(self) -> str:
        if self.passed:
            parts = [f"{c}: min margin {float(self.min_margin(c)):.6g}"
                     for c in ("same-band", "separation", "mixed")
                     if any(k.case == c for k in self.checks)]
            return "PASS; " + "; ".join(parts)
        v = self.violated
        return f"FAIL in {v.case} case at band {v.band}: {v.inequality} (margin {float(v.margin):.6g})"


def _canonical_fraction_bands(B: BandSet):
    """Rational band edges: exact for canonical A_R, otherwise the float values."""
    out = []
    R = Fraction(B.R).limit_denominator(10 ** 9)
    for j, (a, b) in enumerate(B.bands, start=1):
        ca, cb = R - 4 * j, R - 4 * j + Fraction(1, 8 * j)
        if float(ca) == a and float(cb) == b:
            out.append((ca, cb))
        else:
            out.append((Fraction(a), Fraction(b)))
    return out


def _fmt(q: Fraction) -> str:
    return str(q) if q.denominator <= 10 ** 6 else f"{float(q):.12g}"


def certify_AR_avoidance(B: BandSet, find_witness: bool = True) -> Certificate:
    """Run the three-case separation argument as exact inequalities.

    For a point in band j and higher bands k < j:

    * same-band: width_j < 1 (t and 1/t cannot both fit inside one band);
    * separation: gap below band j-1 exceeds 1 (t and 1/t cannot both jump it);
    * mixed: width_j * reach_j < 1 where reach_j is the largest jump from band j
      to any higher band (t <= width_j forces 1/t >= 1/width_j > reach_j).

    Each check stores a positive margin when it holds.  Passing is a proof
    of avoidance for t > 0.  Failing is only a failed sufficient condition, so
    a concrete corner is searched for separately.
    """
    m = int(math.floor(B.R / 4)) if B.R >= 4 else 0
    if m == 0 or len(B.bands) != m:
        raise ValueError("certificate only defined for A_R")
    for a, b in B.bands:
        if b > B.R:
            raise ValueError("certificate only defined for A_R")
    fb = _canonical_fraction_bands(B)
    checks = []
    top_hi = fb[0][1]
    for j, (lo, hi) in enumerate(fb, start=1):
        w = hi - lo
        checks.append(CaseCheck("same-band", j, f"width {_fmt(w)} < 1", 1 - w))
        if j >= 2:
            gap = fb[j - 2][0] - hi
            checks.append(CaseCheck("separation", j, f"gap {_fmt(gap)} > 1", gap - 1))
            reach = top_hi - lo
            checks.append(CaseCheck("mixed", j, f"width*reach {_fmt(w * reach)} < 1", 1 - w * reach))
    bad = next((c for c in checks if not c.ok), None)
    cert = Certificate(bad is None, checks, bad)
    if bad is not None and find_witness:
        cert.witness = find_band_corner(B)
    return cert


def find_band_corner(B: BandSet, n_t: int = 4001):
    """Search for (x, y, t) with all three corner points inside the band set."""
    R = B.R
    ts = np.concatenate([np.geomspace(1e-3, 1e3, n_t), [1.0]])
    for t in ts:
        s = 1.0 / t
        for (a0, b0) in B.bands:
            for (a1, b1) in B.bands:
                lo = max(a0, a1 - t)
                hi = min(b0, b1 - t)
                if lo > hi:
                    continue
                for (a2, b2) in B.bands:
                    clo = max(lo, a2 - s)
                    chi = min(hi, b2 - s)
                    if clo > chi:
                        continue
                    c = 0.5 * (clo + chi)
                    x_lo, x_hi = max(0.0, c - (R - s)), min(R - t, c)
                    if x_lo <= x_hi:
                        x = 0.5 * (x_lo + x_hi)
                        y = c - x
                        pts = np.array([[x, y], [x + t, y], [x, y + s]])
                        if B.contains(pts[:, 0], pts[:, 1]).all():
                            return (float(x), float(y), float(t))
    return None


def sample_corner_violations(B: BandSet, n: int, rng: np.random.Generator, batch=500_000):
    """Random corners anchored in B with the horizontal partner in B.

    Draws (x, y) uniformly in B, then a partner band at or above the anchor's
    band and an offset so that (x + t, y) lies in B with t > 0.  Counts how
    often the vertical partner (x, y + 1/t) is in B as well.
    Returns (number of violating triples, number of triples drawn).
    """
    lo = np.array([a for a, _ in B.bands])
    hi = np.array([b for _, b in B.bands])
    hits = 0
    drawn = 0
    while drawn < n:
        x, y = sample_points(B, batch, rng)
        c = x + y
        own = B.band_index_of(c)
        k = (rng.random(batch) * (own + 1)).astype(int)
        start = np.maximum(lo[k], c)
        cp = start + (hi[k] - start) * rng.random(batch)
        t = cp - c
        valid = (t > 0) & (x + t <= B.R)
        x, y, t = x[valid], y[valid], t[valid]
        take = min(len(t), n - drawn)
        x, y, t = x[:take], y[:take], t[:take]
        hits += int(np.count_nonzero(B.contains(x, y + 1.0 / t)))
        drawn += take
    return hits, drawn
