"""Uniform-grid sampled fields and rasterization of planar sets.

A :class:`RasterField` stores values at cell centers; ``values[i, j]`` is the
value at ``(x0 + (i + 1/2) h, y0 + (j + 1/2) h)``.  Outside the grid fields are
zero, and shifted samples use linear interpolation toward that zero padding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage, signal

from .constructions import BandSet
from .geometry import BoxUnion
from .mollifiers import phi_t


@dataclass
class RasterField:
    x0: float
    y0: float
    h: float
    values: np.ndarray

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("cell size must be positive")
        self.values = np.asarray(self.values)
        if self.values.ndim != 2:
            raise ValueError("values must be a 2-D array")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")

    @property
    def nx(self) -> int:
        return self.values.shape[0]

    @property
    def ny(self) -> int:
        return self.values.shape[1]

    @property
    def origin(self):
        return (self.x0, self.y0)

    @property
    def bounds(self):
        return (self.x0, self.x0 + self.nx * self.h, self.y0, self.y0 + self.ny * self.h)

    def xc(self) -> np.ndarray:
        return self.x0 + (np.arange(self.nx) + 0.5) * self.h

    def yc(self) -> np.ndarray:
        return self.y0 + (np.arange(self.ny) + 0.5) * self.h

    def integral(self):
        return self.h * self.h * self.values.sum()

    def measure(self) -> float:
        return float(np.real(self.integral()))

    def same_grid(self, other: "RasterField") -> bool:
        return (self.values.shape == other.values.shape and math.isclose(self.h, other.h)
                and math.isclose(self.x0, other.x0, abs_tol=1e-12 * self.h)
                and math.isclose(self.y0, other.y0, abs_tol=1e-12 * self.h))

    def with_values(self, values) -> "RasterField":
        return RasterField(self.x0, self.y0, self.h, values)

    def translated_cells(self, di: int, dj: int) -> "RasterField":
        return RasterField(self.x0 + di * self.h, self.y0 + dj * self.h, self.h, self.values)

    def sample(self, x, y):
        """Bilinear interpolation at arbitrary points (zero outside)."""
        fi = (np.asarray(x, dtype=float) - self.x0) / self.h - 0.5
        fj = (np.asarray(y, dtype=float) - self.y0) / self.h - 0.5
        shape = np.broadcast(fi, fj).shape
        coords = np.array([np.broadcast_to(fi, shape).ravel(), np.broadcast_to(fj, shape).ravel()])
        if np.iscomplexobj(self.values):
            re = ndimage.map_coordinates(self.values.real, coords, order=1, mode="grid-constant", cval=0.0)
            im = ndimage.map_coordinates(self.values.imag, coords, order=1, mode="grid-constant", cval=0.0)
            return (re + 1j * im).reshape(shape)
        out = ndimage.map_coordinates(self.values, coords, order=1, mode="grid-constant", cval=0.0)
        return out.reshape(shape)


def _interp_rows(values, fi, j):
    """Linear interpolation along axis 0 at fractional index ``fi`` in column ``j``."""
    n = values.shape[0]
    i0 = np.floor(fi).astype(np.int64)
    w = fi - i0
    a = np.zeros(fi.shape, dtype=values.dtype)
    b = np.zeros(fi.shape, dtype=values.dtype)
    m0 = (i0 >= 0) & (i0 < n)
    m1 = (i0 + 1 >= 0) & (i0 + 1 < n)
    a[m0] = values[i0[m0], j[m0]]
    b[m1] = values[i0[m1] + 1, j[m1]]
    return (1 - w) * a + w * b


def sample_along_x(field: RasterField, x, j):
    """Values of ``field`` at ``(x, y_j)`` where ``y_j`` is the j-th row center of ``field``."""
    fi = (np.asarray(x, dtype=float) - field.x0) / field.h - 0.5
    return _interp_rows(field.values, fi, np.broadcast_to(np.asarray(j), fi.shape))


def sample_along_y(field: RasterField, i, y):
    fj = (np.asarray(y, dtype=float) - field.y0) / field.h - 0.5
    return _interp_rows(field.values.T, fj, np.broadcast_to(np.asarray(i), fj.shape))


# --------------------------------------------------------------------------
# rasterization

def grid_for_bounds(bounds, h, pad=0.0):
    x0, x1, y0, y1 = bounds
    x0 -= pad
    y0 -= pad
    nx = max(1, int(math.ceil((x1 + pad - x0) / h - 1e-9)))
    ny = max(1, int(math.ceil((y1 + pad - y0) / h - 1e-9)))
    return x0, y0, nx, ny


def _coverage_1d(lo, hi, edges):
    """Length of [lo, hi] inside each cell [edges[k], edges[k+1]]."""
    return np.clip(np.minimum(hi, edges[1:]) - np.maximum(lo, edges[:-1]), 0.0, None)


def _diag_cdf(u):
    """Area fraction of the unit cell below x + y = u (u measured from the lower-left corner)."""
    u = np.clip(u, 0.0, 2.0)
    return np.where(u <= 1, 0.5 * u * u, 1 - 0.5 * (2 - u) ** 2)


def rasterize(A, h: float, bounds=None, pad: float = 0.0, supersample: int = 4) -> RasterField:
    """Cell-coverage raster of a set.

    Box unions and band sets are rasterized with exact area fractions; any
    other object exposing ``contains(x, y)`` is supersampled.
    """
    if bounds is None:
        bounds = A.bounds
    x0, y0, nx, ny = grid_for_bounds(bounds, h, pad)
    xe = x0 + np.arange(nx + 1) * h
    ye = y0 + np.arange(ny + 1) * h
    vals = np.zeros((nx, ny))
    if isinstance(A, BoxUnion):
        for b in A.boxes:
            cx = _coverage_1d(b.X.lo, b.X.hi, xe)
            cy = _coverage_1d(b.Y.lo, b.Y.hi, ye)
            ix = np.nonzero(cx)[0]
            iy = np.nonzero(cy)[0]
            if len(ix) and len(iy):
                vals[np.ix_(ix, iy)] += np.outer(cx[ix], cy[iy]) / (h * h)
        np.clip(vals, 0.0, 1.0, out=vals)
    elif isinstance(A, BandSet):
        _rasterize_bands(A, x0, y0, h, vals)
    else:
        s = supersample
        off = (np.arange(s) + 0.5) / s * h
        acc = np.zeros((nx, ny))
        for ox in off:
            xs = xe[:-1] + ox
            for oy in off:
                ys = ye[:-1] + oy
                acc += A.contains(xs[:, None], ys[None, :])
        vals = acc / (s * s)
    return RasterField(x0, y0, h, vals)


def _rasterize_bands(B: BandSet, x0, y0, h, vals):
    nx, ny = vals.shape
    R = B.R
    # restrict to cells inside [0, R]^2 (fractions of the clipped square)
    xe = x0 + np.arange(nx + 1) * h
    ye = y0 + np.arange(ny + 1) * h
    fx = _coverage_1d(0.0, R, xe) / h
    fy = _coverage_1d(0.0, R, ye) / h
    i_all = np.arange(nx)
    for a, b in B.bands:
        # diagonals d = i + j whose cell c-range [x0+y0+d h, x0+y0+(d+2) h] meets [a, b]
        d_lo = int(math.floor((a - x0 - y0) / h)) - 2
        d_hi = int(math.ceil((b - x0 - y0) / h)) + 1
        for d in range(max(d_lo, 0), min(d_hi, nx + ny - 2) + 1):
            j = d - i_all
            ok = (j >= 0) & (j < ny)
            i = i_all[ok]
            j = j[ok]
            base = x0 + y0 + d * h
            frac = _diag_cdf((b - base) / h) - _diag_cdf((a - base) / h)
            if frac > 0:
                vals[i, j] += frac
    full = np.outer(fx, fy)
    np.minimum(vals, 1.0, out=vals)
    # clipped cells on the square boundary: approximate by the product fraction
    vals *= np.where(full < 1, full, 1.0)


def rotate_field(f: RasterField, theta: float, center=None) -> RasterField:
    """Raster of the rotated function (R_theta f)(z) = f(R_{-theta} z), bilinear resampling."""
    if center is None:
        bx = f.bounds
        center = (0.5 * (bx[0] + bx[1]), 0.5 * (bx[2] + bx[3]))
    cx, cy = center
    half = 0.5 * math.hypot(f.nx, f.ny) * f.h + f.h
    n = int(math.ceil(2 * half / f.h))
    gx0 = cx - 0.5 * n * f.h
    gy0 = cy - 0.5 * n * f.h
    xs = gx0 + (np.arange(n) + 0.5) * f.h
    ys = gy0 + (np.arange(n) + 0.5) * f.h
    X, Y = np.meshgrid(xs - cx, ys - cy, indexing="ij")
    c, s = math.cos(theta), math.sin(theta)
    xr = cx + c * X + s * Y
    yr = cy - s * X + c * Y
    vals = f.sample(xr, yr)
    return RasterField(gx0, gy0, f.h, vals)


def trim(f: RasterField, tol: float = 0.0) -> RasterField:
    """Crop to the smallest sub-grid holding all entries with |value| > tol."""
    nz = np.abs(f.values) > tol
    if not nz.any():
        return RasterField(f.x0, f.y0, f.h, np.zeros((1, 1), dtype=f.values.dtype))
    ii = np.nonzero(nz.any(axis=1))[0]
    jj = np.nonzero(nz.any(axis=0))[0]
    return RasterField(f.x0 + ii[0] * f.h, f.y0 + jj[0] * f.h, f.h,
                       f.values[ii[0]:ii[-1] + 1, jj[0]:jj[-1] + 1])


# --------------------------------------------------------------------------
# mollification

def mollifier_weights(width: float, h: float, offsets: np.ndarray) -> np.ndarray:
    """Discrete phi_width at integer cell offsets, normalized to unit discrete mass."""
    k_max = int(math.floor(20.0 * width / h))
    norm = phi_t(np.arange(-k_max, k_max + 1) * h, width).sum() * h
    if norm <= 0:
        return (offsets == 0).astype(float)
    w = phi_t(offsets * h, width) * h / norm
    return np.where(np.abs(offsets) <= k_max, w, 0.0)


def convolve_axis(f: RasterField, width: float, axis: int, out_lo: float, out_hi: float) -> RasterField:
    """(f *_axis phi_width) on a grid aligned with ``f`` covering [out_lo, out_hi] along ``axis``.

    The other axis keeps the grid of ``f``.  Kernel samples are normalized to
    unit discrete mass, so an under-resolved mollifier degrades to the identity.
    """
    h = f.h
    n = f.values.shape[axis]
    start = f.x0 if axis == 0 else f.y0
    k_lo = int(math.floor((out_lo - start) / h - 0.5))
    k_hi = int(math.ceil((out_hi - start) / h - 0.5))
    d_min = k_lo - (n - 1)
    offsets = np.arange(d_min, k_hi + 1)
    w = mollifier_weights(width, h, offsets)
    kern = w[:, None] if axis == 0 else w[None, :]
    full = signal.fftconvolve(f.values, kern, mode="full", axes=axis)
    sl = slice(k_lo - d_min, k_hi - d_min + 1)
    vals = full[sl, :] if axis == 0 else full[:, sl]
    if axis == 0:
        return RasterField(start + k_lo * h, f.y0, h, vals)
    return RasterField(f.x0, start + k_lo * h, h, vals)
