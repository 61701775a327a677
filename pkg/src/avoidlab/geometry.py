"""Exact planar primitives and configuration-avoidance predicates.

Two configurations are supported:

* the hyperbolic corner ``(x, y), (x + t, y), (x, y + 1/t)`` with ``t > 0``
  (optionally also ``t < 0``), and
* three points spanning a triangle of a fixed area.

Point-level predicates take an explicit tolerance.  Box-level predicates are
tolerance-free interval arithmetic over closed boxes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

DEFAULT_TOL = 1e-9

HYPERBOLIC_CORNER = "HyperbolicCorner"
FIXED_AREA_TRIANGLE = "FixedAreaTriangle"


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def contains(self, v: float) -> bool:
        return self.lo <= v <= self.hi

    def __iter__(self):
        yield self.lo
        yield self.hi


@dataclass(frozen=True)
class Box:
    X: Interval
    Y: Interval

    @classmethod
    def from_bounds(cls, x_lo, x_hi, y_lo, y_hi) -> "Box":
        return cls(Interval(float(x_lo), float(x_hi)), Interval(float(y_lo), float(y_hi)))

    @property
    def area(self) -> float:
        return self.X.length * self.Y.length

    def contains_box(self, other: "Box") -> bool:
        return (self.X.lo <= other.X.lo and other.X.hi <= self.X.hi
                and self.Y.lo <= other.Y.lo and other.Y.hi <= self.Y.hi)

    def corners(self):
        return [Point2(x, y) for x in self.X for y in self.Y]

    def scaled(self, sx: float, sy: float) -> "Box":
        return Box.from_bounds(self.X.lo * sx, self.X.hi * sx, self.Y.lo * sy, self.Y.hi * sy)

    def as_tuple(self):
        return (self.X.lo, self.X.hi, self.Y.lo, self.Y.hi)


@dataclass(frozen=True)
class ConfigKind:
    tag: str = HYPERBOLIC_CORNER
    area: float = 1.0
    signed_t: bool = False

    def __post_init__(self):
        if self.tag not in (HYPERBOLIC_CORNER, FIXED_AREA_TRIANGLE):
            raise ValueError(f"unknown configuration {self.tag!r}")
        if self.area <= 0:
            raise ValueError("area must be positive")

    @classmethod
    def corner(cls, signed_t: bool = False) -> "ConfigKind":
        return cls(HYPERBOLIC_CORNER, 1.0, signed_t)

    @classmethod
    def triangle(cls, area: float = 1.0) -> "ConfigKind":
        return cls(FIXED_AREA_TRIANGLE, float(area))


# --------------------------------------------------------------------------
# point predicates

def cross(p0, p1, p2) -> float:
    return (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1])


def triangle_area(p0, p1, p2) -> float:
    return abs(cross(p0, p1, p2)) / 2.0


def hyperbolic_corner_param(p0, p1, p2, tol: float = DEFAULT_TOL) -> Optional[float]:
    """Return ``t`` if ``(p0, p1, p2) = ((x,y), (x+t,y), (x,y+1/t))`` with t > 0."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if abs(p1[1] - p0[1]) > tol or abs(p2[0] - p0[0]) > tol:
        return None
    t = p1[0] - p0[0]
    if t <= 0:
        return None
    if abs((p2[1] - p0[1]) * t - 1.0) > tol:
        return None
    return t


# --------------------------------------------------------------------------
# box predicates

def _corner_feasible_arrays(x0lo, x0hi, y0lo, y0hi, x1lo, x1hi, y1lo, y1hi,
                            x2lo, x2hi, y2lo, y2hi, signed_t=False):
    """Vectorized form of :func:`boxes_corner_feasible` over broadcast arrays."""
    ax_lo = np.maximum(x0lo, x2lo)
    ax_hi = np.minimum(x0hi, x2hi)
    ay_lo = np.maximum(y0lo, y1lo)
    ay_hi = np.minimum(y0hi, y1hi)
    ok = (ax_lo <= ax_hi) & (ay_lo <= ay_hi)
    # t = (x+t) - x sweeps T; 1/t = (y+1/t) - y sweeps S
    t_lo = x1lo - ax_hi
    t_hi = x1hi - ax_lo
    s_lo = y2lo - ay_hi
    s_hi = y2hi - ay_lo
    with np.errstate(divide="ignore", invalid="ignore"):
        # t > 0 branch: t in [1/s_hi, 1/s_lo] (upper end infinite when s_lo <= 0)
        inv_hi = np.where(s_lo > 0, 1.0 / np.where(s_lo > 0, s_lo, 1.0), np.inf)
        inv_lo = 1.0 / np.where(s_hi > 0, s_hi, 1.0)
        pos = (t_hi > 0) & (s_hi > 0) & (np.maximum(t_lo, inv_lo) <= np.minimum(t_hi, inv_hi))
        feasible = pos
        if signed_t:
            # t < 0 branch: s in [s_lo, min(s_hi,0)), t = 1/s in (-inf, 1/s_lo] ∩ [1/s_hi, ...]
            n_inv_lo = np.where(s_hi < 0, 1.0 / np.where(s_hi < 0, s_hi, -1.0), -np.inf)
            n_inv_hi = 1.0 / np.where(s_lo < 0, s_lo, -1.0)
            neg = (t_lo < 0) & (s_lo < 0) & (
                np.maximum(t_lo, n_inv_lo) <= np.minimum(t_hi, n_inv_hi))
            feasible = pos | neg
    return ok & feasible


def boxes_corner_feasible(r0: Box, r1: Box, r2: Box, signed_t: bool = False) -> bool:
    """True iff some (x,y) in r0, (x+t,y) in r1, (x,y+1/t) in r2 with t > 0."""
    return bool(_corner_feasible_arrays(
        r0.X.lo, r0.X.hi, r0.Y.lo, r0.Y.hi,
        r1.X.lo, r1.X.hi, r1.Y.lo, r1.Y.hi,
        r2.X.lo, r2.X.hi, r2.Y.lo, r2.Y.hi, signed_t))


def _area_range_arrays(b0, b1, b2):
    """Min and max of the signed cross product; b* have shape (..., 4)."""
    vals = []
    for i0, j0, i1, j1, i2, j2 in itertools.product((0, 1), repeat=6):
        x0, y0 = b0[..., i0], b0[..., 2 + j0]
        x1, y1 = b1[..., i1], b1[..., 2 + j1]
        x2, y2 = b2[..., i2], b2[..., 2 + j2]
        vals.append((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))
    vals = np.stack(vals)
    return vals.min(axis=0), vals.max(axis=0)


def boxes_area_range(r0: Box, r1: Box, r2: Box) -> Interval:
    """Exact range of the signed cross product over r0 x r1 x r2.

    The cross product is affine in each coordinate separately, so its extremes
    sit at the 64 corner combinations.
    """
    lo, hi = _area_range_arrays(np.array(r0.as_tuple()), np.array(r1.as_tuple()),
                                np.array(r2.as_tuple()))
    return Interval(float(lo), float(hi))


def _area_hits(lo, hi, area):
    two_a = 2.0 * area
    return ((lo <= two_a) & (two_a <= hi)) | ((lo <= -two_a) & (-two_a <= hi))


# --------------------------------------------------------------------------
# box unions

def _subtract(box: Box, other: Box) -> list[Box]:
    """Pieces of ``box`` outside the interior of ``other``."""
    ix = box.X.intersect(other.X)
    iy = box.Y.intersect(other.Y)
    if ix is None or iy is None or ix.length == 0 or iy.length == 0:
        return [box]
    pieces = []
    if box.Y.lo < iy.lo:
        pieces.append(Box(box.X, Interval(box.Y.lo, iy.lo)))
    if iy.hi < box.Y.hi:
        pieces.append(Box(box.X, Interval(iy.hi, box.Y.hi)))
    if box.X.lo < ix.lo:
        pieces.append(Box(Interval(box.X.lo, ix.lo), iy))
    if ix.hi < box.X.hi:
        pieces.append(Box(Interval(ix.hi, box.X.hi), iy))
    return pieces


@dataclass
class BoxUnion:
    boxes: list
    bounding: Box
    inexact: bool = False

    def __post_init__(self):
        for b in self.boxes:
            if not self.bounding.contains_box(b):
                raise ValueError(f"box {b.as_tuple()} outside bounding box")

    @classmethod
    def from_tuples(cls, tuples: Iterable[Sequence[float]], bounding=None, normalize=True):
        boxes = [Box.from_bounds(*t) for t in tuples]
        if bounding is None:
            bounding = bounding_box(boxes)
        elif not isinstance(bounding, Box):
            bounding = Box.from_bounds(*bounding)
        u = cls(boxes, bounding)
        return u.normalized() if normalize else u

    def normalized(self) -> "BoxUnion":
        """Interior-disjoint copy obtained by successive subtraction."""
        out: list[Box] = []
        for b in self.boxes:
            pieces = [b]
            for o in out:
                pieces = [p for q in pieces for p in _subtract(q, o)]
                if not pieces:
                    break
            out.extend(p for p in pieces if p.area > 0 or b.area == 0)
        return BoxUnion(out, self.bounding, self.inexact)

    def measure(self) -> float:
        return float(sum(b.area for b in self.boxes))

    def as_array(self) -> np.ndarray:
        if not self.boxes:
            return np.zeros((0, 4))
        return np.array([b.as_tuple() for b in self.boxes], dtype=float)

    def contains(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = np.zeros(np.broadcast(x, y).shape, dtype=bool)
        for b in self.boxes:
            inside |= (b.X.lo <= x) & (x <= b.X.hi) & (b.Y.lo <= y) & (y <= b.Y.hi)
        return inside

    def scaled(self, sx: float, sy: float) -> "BoxUnion":
        return BoxUnion([b.scaled(sx, sy) for b in self.boxes],
                        self.bounding.scaled(sx, sy), self.inexact)

    def translated(self, dx: float, dy: float) -> "BoxUnion":
        def sh(b):
            return Box.from_bounds(b.X.lo + dx, b.X.hi + dx, b.Y.lo + dy, b.Y.hi + dy)
        return BoxUnion([sh(b) for b in self.boxes], sh(self.bounding), self.inexact)

    @property
    def bounds(self):
        return self.bounding.as_tuple()


def bounding_box(boxes: Sequence[Box]) -> Box:
    if not boxes:
        return Box.from_bounds(0, 0, 0, 0)
    a = np.array([b.as_tuple() for b in boxes])
    return Box.from_bounds(a[:, 0].min(), a[:, 1].max(), a[:, 2].min(), a[:, 3].max())


@dataclass
class AvoidanceReport:
    avoids: bool
    witness: Optional[tuple] = None
    triples_checked: int = 0
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.avoids


def _corner_first_witness(arr, signed_t=False, first_index=None):
    """Scan triples (i, j, k) in lexicographic order; return the first feasible one.

    ``first_index`` restricts the r0 index to a given iterable.
    """
    k = len(arr)
    x_lo, x_hi, y_lo, y_hi = arr.T
    checked = 0
    order = range(k) if first_index is None else first_index
    for i in order:
        # spatial filter: r1 shares a horizontal line with r0, r2 a vertical one
        j_idx = np.nonzero((y_lo <= y_hi[i]) & (y_hi >= y_lo[i]) &
                           ((x_hi > x_lo[i]) | signed_t))[0]
        k_idx = np.nonzero((x_lo <= x_hi[i]) & (x_hi >= x_lo[i]))[0]
        if len(j_idx) == 0 or len(k_idx) == 0:
            continue
        J, K = np.meshgrid(j_idx, k_idx, indexing="ij")
        J, K = J.ravel(), K.ravel()
        checked += len(J)
        f = _corner_feasible_arrays(x_lo[i], x_hi[i], y_lo[i], y_hi[i],
                                    x_lo[J], x_hi[J], y_lo[J], y_hi[J],
                                    x_lo[K], x_hi[K], y_lo[K], y_hi[K], signed_t)
        if f.any():
            m = int(np.argmax(f))
            return (i, int(J[m]), int(K[m])), checked
    return None, checked


def _triangle_first_witness(arr, area, chunk=64):
    k = len(arr)
    checked = 0
    J, K = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
    J, K = J.ravel(), K.ravel()
    for i in range(k):
        b0 = arr[i][None, :]
        lo, hi = _area_range_arrays(b0, arr[J], arr[K])
        checked += len(J)
        hit = _area_hits(lo, hi, area)
        if hit.any():
            m = int(np.argmax(hit))
            return (i, int(J[m]), int(K[m])), checked
    return None, checked


def boxunion_avoids(A: BoxUnion, cfg: ConfigKind) -> AvoidanceReport:
    """Check that no triple of boxes (with repetition) can host the configuration."""
    arr = A.as_array()
    if len(arr) == 0:
        return AvoidanceReport(True)
    if cfg.tag == HYPERBOLIC_CORNER:
        w, n = _corner_first_witness(arr, cfg.signed_t)
    else:
        w, n = _triangle_first_witness(arr, cfg.area)
    if w is None:
        return AvoidanceReport(True, None, n)
    return AvoidanceReport(False, tuple(A.boxes[i] for i in w), n)


def corner_witness_point(r0: Box, r1: Box, r2: Box):
    """Return an explicit (x, y, t) realizing a corner among feasible boxes, else None."""
    ax = r0.X.intersect(r2.X)
    ay = r0.Y.intersect(r1.Y)
    if ax is None or ay is None:
        return None
    T = Interval(r1.X.lo - ax.hi, r1.X.hi - ax.lo)
    S = Interval(r2.Y.lo - ay.hi, r2.Y.hi - ay.lo)
    if T.hi <= 0 or S.hi <= 0:
        return None
    lo = max(T.lo, 1.0 / S.hi)
    hi = min(T.hi, 1.0 / S.lo if S.lo > 0 else math.inf)
    if lo > hi:
        return None
    t = lo if not math.isfinite(hi) else 0.5 * (lo + hi)
    t = max(t, 1e-300)
    # x with x in ax and x+t in r1.X; y with y in ay and y+1/t in r2.Y
    x = min(max(ax.lo, r1.X.lo - t), ax.hi)
    y = min(max(ay.lo, r2.Y.lo - 1.0 / t), ay.hi)
    return x, y, t
