"""Concrete bump functions and quadrature rules.

``zeta`` is a smooth bump supported in [1/2, 2]; ``phi`` is an even bump with
unit mass supported in [-20, 20] and bounded below on [-10, 10].
"""
from __future__ import annotations

import functools

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline


def _bump(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


def zeta(u):
    """exp(-1/(1 - s^2)) with s = (4u - 5)/3; support [1/2, 2]."""
    return _bump((4.0 * np.asarray(u, dtype=float) - 5.0) / 3.0)


@functools.lru_cache(maxsize=None)
def _bump_mass() -> float:
    val, _ = integrate.quad(lambda s: float(_bump(np.array(s))), -1, 1, epsabs=1e-14, epsrel=1e-14)
    return val


@functools.lru_cache(maxsize=None)
def zeta_integral() -> float:
    # du = (3/4) ds
    return 0.75 * _bump_mass()


@functools.lru_cache(maxsize=None)
def phi_norm() -> float:
    return 1.0 / (20.0 * _bump_mass())


def phi(x):
    return phi_norm() * _bump(np.asarray(x, dtype=float) / 20.0)


def phi_t(x, t):
    """phi(x/t)/t."""
    return phi(np.asarray(x, dtype=float) / t) / t


def gauss_legendre(n: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def composite_gauss_legendre(a: float, b: float, panels: int, order: int = 16):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def u_rule(n: int = 64):
    """Gauss-Legendre rule on [1/2, 2] with the zeta weight folded in."""
    u, w = gauss_legendre(n, 0.5, 2.0)
    return u, w * zeta(u)


class PhiHat:
    """Tabulated Fourier transform of ``phi`` (real and even).

    Values come from composite Gauss-Legendre on [0, 20]; a cubic spline
    interpolates between table points.  Beyond the point where the transform
    stays below ``floor`` it is treated as zero.
    """

    def __init__(self, s_table: float = 6.0, ds: float = 2.5e-4, floor: float = 1e-12):
        x, w = composite_gauss_legendre(0.0, 20.0, panels=100, order=16)
        fx = 2.0 * phi(x) * w
        s = np.arange(0.0, s_table + ds, ds)
        vals = np.empty_like(s)
        for k in range(0, len(s), 512):
            blk = s[k:k + 512]
            vals[k:k + 512] = np.cos(2 * np.pi * np.outer(blk, x)) @ fx
        big = np.nonzero(np.abs(vals) >= floor)[0]
        self.s_max = float(s[min(big[-1] + 1, len(s) - 1)])
        self.floor = floor
        self._spline = CubicSpline(s, vals)
        self._x = x
        self._fx = fx

    def __call__(self, s):
        s = np.abs(np.asarray(s, dtype=float))
        out = np.zeros_like(s)
        m = s <= self.s_max
        out[m] = self._spline(s[m])
        return out

    def direct(self, s):
        """Unsplined evaluation, for checking the table."""
        s = np.atleast_1d(np.abs(np.asarray(s, dtype=float)))
        return np.cos(2 * np.pi * np.outer(s, self._x)) @ self._fx


@functools.lru_cache(maxsize=None)
def phi_hat_table() -> PhiHat:
    return PhiHat()


def phi_hat(s):
    return phi_hat_table()(s)
