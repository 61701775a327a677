"""Discrete fixed-area triangles: progression search, populated rows, the
constructive strip/progression extraction, and continuous-to-grid sampling.

All areas are handled as twice-areas in integer arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

MAX_SIDE = 2 ** 20


@dataclass
class GridSet:
    """Subset of {0..n-1}^2 stored as a boolean array indexed [x, y]."""
    n: int
    mask: np.ndarray

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.mask.shape != (self.n, self.n):
            raise ValueError("mask must have shape (n, n)")
        if self.n > MAX_SIDE:
            raise ValueError(f"side above {MAX_SIDE} risks 64-bit overflow in cross products")

    @classmethod
    def from_points(cls, n: int, points: Iterable) -> "GridSet":
        mask = np.zeros((n, n), dtype=bool)
        for x, y in points:
            if not (0 <= x < n and 0 <= y < n):
                raise ValueError(f"point ({x}, {y}) outside the {n} x {n} grid")
            mask[x, y] = True
        return cls(n, mask)

    @classmethod
    def full(cls, n: int) -> "GridSet":
        return cls(n, np.ones((n, n), dtype=bool))

    @classmethod
    def random(cls, n: int, density: float, rng: np.random.Generator) -> "GridSet":
        return cls(n, rng.random((n, n)) < density)

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @property
    def density(self) -> float:
        return self.size / self.n ** 2

    def points(self) -> np.ndarray:
        """Members sorted by (x, y), as an int64 array of shape (size, 2)."""
        return np.argwhere(self.mask).astype(np.int64)

    def contains(self, x: int, y: int) -> bool:
        return 0 <= x < self.n and 0 <= y < self.n and bool(self.mask[x, y])

    def row(self, y: int) -> np.ndarray:
        return np.nonzero(self.mask[:, y])[0]


def twice_area(p0, p1, p2) -> int:
    """|cross(p1 - p0, p2 - p0)| in exact integer arithmetic."""
    return abs((int(p1[0]) - int(p0[0])) * (int(p2[1]) - int(p0[1]))
               - (int(p1[1]) - int(p0[1])) * (int(p2[0]) - int(p0[0])))


# --------------------------------------------------------------------------
# progressions

def find_ap(S: Iterable[int], length: int, step_filter: Optional[Callable[[int], bool]] = None):
    """First AP of ``length`` terms with positive step inside S, ordered by (step, start)."""
    if length < 2:
        raise ValueError("length must be at least 2")
    pts = sorted(set(int(s) for s in S))
    if len(pts) < length:
        return None
    members = set(pts)
    span = pts[-1] - pts[0]
    for step in range(1, span // (length - 1) + 1):
        if step_filter is not None and not step_filter(step):
            continue
        for a in pts:
            if a + (length - 1) * step > pts[-1]:
                break
            if all(a + m * step in members for m in range(1, length)):
                return (a, step)
    return None


def find_ap_bruteforce(S: Iterable[int], length: int):
    """Reference: every (start, step) pair in increasing (step, start) order."""
    pts = sorted(set(int(s) for s in S))
    if len(pts) < length:
        return None
    lo, hi = pts[0], pts[-1]
    for step in range(1, hi - lo + 1):
        for a in range(lo, hi + 1):
            if all(a + m * step in pts for m in range(length)):
                return (a, step)
    return None


# --------------------------------------------------------------------------
# rows

@dataclass
class PopulatedRows:
    rows: list
    threshold: float
    counting_bound_holds: bool  # at least (beta/2) n populated rows
    density_precondition: bool  # |B| >= beta n^2


def populated_rows(B: GridSet, beta: float) -> PopulatedRows:
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    thr = 0.5 * beta * B.n
    counts = B.mask.sum(axis=0)
    rows = [int(y) for y in np.nonzero(counts >= thr)[0]]
    return PopulatedRows(rows, thr, len(rows) >= thr, B.size >= beta * B.n ** 2)


# --------------------------------------------------------------------------
# triangles

def find_triangle_of_area(B: GridSet, two_T: int):
    """First triple (by index order of sorted members) with twice-area ``two_T``.

    For each first vertex the cross products against all later pairs are
    formed at once; second vertices whose offset has gcd not dividing two_T
    are dropped first, since the cross product is a multiple of that gcd.
    """
    if two_T < 1:
        raise ValueError("two_T must be at least 1")
    P = B.points()
    m = len(P)
    for i in range(m - 2):
        W = P[i + 1:] - P[i]
        g = np.gcd(W[:, 0], W[:, 1])
        ok = (two_T % np.maximum(g, 1) == 0) & (g > 0)
        js = np.nonzero(ok[:-1])[0]
        if len(js) == 0:
            continue
        C = W[js, 0][:, None] * W[None, :, 1] - W[js, 1][:, None] * W[None, :, 0]
        hit = (np.abs(C) == two_T) & (np.arange(len(W))[None, :] > js[:, None])
        if hit.any():
            a, b = np.unravel_index(np.argmax(hit), hit.shape)
            j, k = i + 1 + js[a], i + 1 + b
            return tuple(tuple(int(c) for c in P[t]) for t in (i, j, k))
    return None


def find_triangle_bruteforce(B: GridSet, two_T: int):
    P = [tuple(int(c) for c in p) for p in B.points()]
    m = len(P)
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                if twice_area(P[i], P[j], P[k]) == two_T:
                    return (P[i], P[j], P[k])
    return None


# --------------------------------------------------------------------------
# extraction

@dataclass
class GrahamParams:
    beta: float
    r: int
    N: int
    l: Optional[int] = None
    T: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.beta <= 1:
            raise ValueError("beta must lie in (0, 1]")
        if self.r < 1 or self.N < 1:
            raise ValueError("r and N must be positive integers")
        nf = math.factorial(self.N)
        if self.l is not None and (self.l < 1 or nf % self.l != 0):
            raise ValueError(f"k = N!/l must be an integer (N! = {nf}, l = {self.l})")
        if self.T is not None and 2 * self.T != math.factorial(self.r) * nf:
            raise ValueError(f"T must equal r! N!/2 = {math.factorial(self.r) * nf / 2}")

    @property
    def two_T(self) -> int:
        return math.factorial(self.r) * math.factorial(self.N)

    @property
    def target_area(self) -> float:
        return self.two_T / 2

    @property
    def rows_needed(self) -> int:
        return math.factorial(self.r) + 1

    def precondition_flags(self, n: int) -> list:
        flags = []
        if self.r < math.ceil(4 / self.beta):
            flags.append(f"r = {self.r} < ceil(4/beta) = {math.ceil(4 / self.beta)}")
        if n % self.N:
            flags.append(f"n = {n} is not a multiple of N = {self.N}")
        if n < (self.r + 1) * math.factorial(self.N):
            flags.append(f"n = {n} < (r+1) N! = {(self.r + 1) * math.factorial(self.N)}")
        return flags


@dataclass
class Step:
    name: str
    ok: bool
    detail: str


@dataclass
class GrahamTrace:
    success: bool
    triangle: Optional[tuple] = None
    steps: list = field(default_factory=list)
    failed_step: Optional[str] = None
    flags: list = field(default_factory=list)

    def log(self, name, ok, detail):
        self.steps.append(Step(name, ok, detail))

    def fail(self, name, detail):
        self.log(name, False, detail)
        self.failed_step = name
        return self


STEP_POPULATED = "populated rows"
STEP_STRIP = "strip with many populated rows"
STEP_ROWS_AP = "r!+1 equally spaced populated rows"
STEP_PAIR = "two points of one progression in the lowest row"
STEP_THIRD = "third point in row y1"
STEP_AREA = "area equals T"


def graham_extract(B: GridSet, params: GrahamParams) -> GrahamTrace:
    """Run the strip / row-progression / lowest-row argument as explicit searches.

    Counting claims (populated-row count, strip count) are recorded as
    checks; the extraction stops at the first search that finds nothing.
    """
    n, r, N = B.n, params.r, params.N
    nf, rf = math.factorial(N), math.factorial(r)
    tr = GrahamTrace(False, flags=params.precondition_flags(n))

    pr = populated_rows(B, params.beta)
    tr.log(STEP_POPULATED, pr.counting_bound_holds,
           f"{len(pr.rows)} populated rows (threshold {pr.threshold:g} points); "
           f"need >= {pr.threshold:g} rows; |B| >= beta n^2: {pr.density_precondition}")
    if not pr.rows:
        return tr.fail(STEP_ROWS_AP, "no populated rows")
    populated = set(pr.rows)

    strips = [(s, [y for y in range(s, s + N) if y in populated]) for s in range(0, n - N + 1, N)]
    rich = [s for s in strips if len(s[1]) >= 0.5 * params.beta * N]
    tr.log(STEP_STRIP, bool(rich), f"{len(rich)} of {len(strips)} strips of height {N} "
                                   f"hold >= {0.5 * params.beta * N:g} populated rows")
    ordered = rich + [s for s in strips if s not in rich]

    if params.l is not None:
        step_ok = lambda d: d == params.l
    else:
        step_ok = lambda d: nf % d == 0
    found = None
    for start, rows in ordered:
        ap = find_ap(rows, rf + 1, step_ok)
        if ap is not None:
            found = (start, ap)
            break
    if found is None:
        return tr.fail(STEP_ROWS_AP, f"no progression of {rf + 1} populated rows "
                                     f"with step dividing N! inside one strip")
    strip_start, (y0, l) = found
    k = nf // l
    tr.log(STEP_ROWS_AP, True, f"strip [{strip_start}, {strip_start + N}); rows y0 = {y0}, step l = {l}; k = N!/l = {k}")

    xs = set(int(x) for x in B.row(y0))
    pair = None
    for x0 in range(0, n - r * k):
        hits = [i for i in range(r + 1) if x0 + i * k in xs]
        if len(hits) >= 2:
            pair = (x0, hits[0], hits[1])
            break
    if pair is None:
        return tr.fail(STEP_PAIR, f"no progression x0 + i k (i = 0..{r}, k = {k}) inside the grid "
                                  f"meets row {y0} twice")
    x0, i, j = pair
    tr.log(STEP_PAIR, True, f"x0 = {x0}, i = {i}, j = {j}: ({x0 + i * k}, {y0}), ({x0 + j * k}, {y0})")

    y1 = y0 + (rf // (j - i)) * l
    row1 = B.row(y1)
    if len(row1) == 0:
        return tr.fail(STEP_THIRD, f"row {y1} is empty")
    x1 = int(row1[0])
    tr.log(STEP_THIRD, True, f"y1 = y0 + (r!/(j-i)) l = {y1}; x1 = {x1}")

    tri = ((x0 + i * k, y0), (x0 + j * k, y0), (x1, y1))
    ta = twice_area(*tri)
    if ta != params.two_T:
        return tr.fail(STEP_AREA, f"twice-area {ta} != r! N! = {params.two_T}")
    tr.log(STEP_AREA, True, f"twice-area {ta} = r! N!")
    tr.success = True
    tr.triangle = tri
    return tr


# --------------------------------------------------------------------------
# transference

@dataclass
class TransferResult:
    grid: GridSet
    density: float
    corner: tuple  # (u, v)
    target: float  # delta / 2
    achieved: bool
    precondition_ok: bool
    densities: np.ndarray


def transference_sample(A, n: int, T: float, trials: int, seed: int,
                        delta: Optional[float] = None) -> TransferResult:
    """Densest B_{u,v} = {(k, l) : (u, v) + T^{-1/2} (k, l) in A} over random (u, v) in Q.

    ``A`` needs ``contains`` and ``bounds``; R is the side of its bounding square.
    """
    if n < 1 or T <= 0 or trials < 1:
        raise ValueError("need n >= 1, T > 0, trials >= 1")
    x0, x1, y0, y1 = A.bounds
    R = max(x1 - x0, y1 - y0)
    s = 1.0 / math.sqrt(T)
    if delta is None:
        delta = A.measure() / R ** 2
    pre = delta > 0 and R >= 8 * n * s / delta
    q = R - (n - 1) * s
    if q < 0:
        raise ValueError("grid does not fit: R < (n - 1) T^{-1/2}")
    rng = np.random.default_rng(seed)
    kk = np.arange(n) * s
    best, best_d, best_uv = None, -1.0, None
    dens = np.empty(trials)
    for t in range(trials):
        u, v = x0 + q * rng.random(), y0 + q * rng.random()
        mask = np.asarray(A.contains((u + kk)[:, None], (v + kk)[None, :]), dtype=bool)
        dens[t] = mask.mean()
        if dens[t] > best_d:
            best, best_d, best_uv = mask, dens[t], (u, v)
    return TransferResult(GridSet(n, best), float(best_d), best_uv, delta / 2,
                          bool(best_d > delta / 2), bool(pre), dens)
