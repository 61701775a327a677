"""Fourier-side tools: raster transforms, anisotropic Sobolev norms, the
hyperbolic multiplier and its dyadic localization.

Transforms use the normalization f^(xi, eta) = int f(x, y) exp(-2 pi i (x xi + y eta)),
approximated on a raster by h^2 times a DFT with frequency spacing 1/(n h).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .forms import eval_N0
from .mollifiers import composite_gauss_legendre, phi_hat, phi_hat_table, zeta, zeta_integral
from .raster import RasterField


@dataclass
class SpectralField:
    """Samples of the continuous transform on the DFT frequency grid."""
    xi: np.ndarray
    eta: np.ndarray
    values: np.ndarray  # values[k, l] at (xi[k], eta[l])

    @property
    def dxi(self) -> float:
        return float(self.xi[1] - self.xi[0]) if len(self.xi) > 1 else 1.0

    @property
    def deta(self) -> float:
        return float(self.eta[1] - self.eta[0]) if len(self.eta) > 1 else 1.0

    def l2_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.dxi * self.deta)

    def weighted_norm(self, weight) -> float:
        return math.sqrt(float(np.sum(np.abs(self.values) ** 2 * weight) * self.dxi * self.deta))


def transform(f: RasterField, pad: int = 1) -> SpectralField:
    """Continuous-normalized DFT of a raster, zero-padded by ``pad`` times its size."""
    if pad < 1:
        raise ValueError("pad must be at least 1")
    nx, ny = pad * f.nx, pad * f.ny
    F = np.fft.fft2(f.values, s=(nx, ny)) * f.h * f.h
    xi = np.fft.fftfreq(nx, f.h)
    eta = np.fft.fftfreq(ny, f.h)
    # phase for the position of the first cell center
    x0 = f.x0 + 0.5 * f.h
    y0 = f.y0 + 0.5 * f.h
    F *= np.exp(-2j * np.pi * x0 * xi)[:, None] * np.exp(-2j * np.pi * y0 * eta)[None, :]
    order_x = np.argsort(xi)
    order_y = np.argsort(eta)
    return SpectralField(xi[order_x], eta[order_y], F[np.ix_(order_x, order_y)])


def l2_norm(f: RasterField) -> float:
    return math.sqrt(float(np.sum(np.abs(f.values) ** 2)) * f.h * f.h)


def plancherel_defect(f: RasterField, pad: int = 1) -> float:
    """Relative difference between the spatial and spectral L2 norms squared."""
    a = l2_norm(f) ** 2
    b = transform(f, pad).l2_norm_sq()
    return abs(a - b) / max(a, 1e-300)


def sobolev_weight(sf: SpectralField, s1: float, s2: float):
    return ((1 + sf.xi ** 2) ** s1)[:, None] * ((1 + sf.eta ** 2) ** s2)[None, :]


def sobolev_norm(f: RasterField, s1: float, s2: float, pad: int = 2) -> float:
    """||f||_{H^{s1,s2}} with weight (1 + xi^2)^s1 (1 + eta^2)^s2."""
    if not (math.isfinite(s1) and math.isfinite(s2)):
        raise ValueError("orders must be finite")
    sf = transform(f, pad)
    return sf.weighted_norm(sobolev_weight(sf, s1, s2))


def mollified_difference_norm(f: RasterField, eps: float, sigma: float, pad: int = 2) -> float:
    """||f - f *_1 phi_eps||_{H^{-sigma, 0}}, the x-mollification applied as phi^(eps xi)."""
    sf = transform(f, pad)
    m = (1 - phi_hat(eps * sf.xi)) ** 2 * (1 + sf.xi ** 2) ** (-sigma)
    return sf.weighted_norm(m[:, None] * np.ones(len(sf.eta))[None, :])


def mollifier_constant(sigma: float) -> float:
    """sup_v |1 - phi^(v)| / |v|^sigma, so |1 - phi^(eps xi)| (1 + xi^2)^(-sigma/2) <= C eps^sigma."""
    if not 0 < sigma <= 1:
        raise ValueError("sigma must lie in (0, 1]")
    table = phi_hat_table()
    v = np.geomspace(1e-4, 50.0, 20001)
    r = np.abs(1 - table(v)) / v ** sigma
    k = int(np.argmax(r))
    lo, hi = v[max(k - 1, 0)], v[min(k + 1, len(v) - 1)]
    res = optimize.minimize_scalar(lambda t: -abs(1 - table(np.array(t))) / t ** sigma,
                                   bounds=(lo, hi), method="bounded")
    return float(max(r[k], -res.fun))


def phitrick_integral(eps: float, s_min: float = 1e-6, n_per_unit: int = 400) -> float:
    """int_0^inf |phi^(eps s) - phi^(s)|^2 ds/s by Simpson's rule in log s.

    Below ``s_min`` the integrand is O(s^3); above s_max/eps both transforms
    are below the tabulation floor.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if eps == 1:
        return 0.0
    s_top = phi_hat_table().s_max / eps
    a, b = math.log(s_min), math.log(s_top)
    n = int(math.ceil((b - a) * n_per_unit))
    n += n % 2
    tau = np.linspace(a, b, n + 1)
    s = np.exp(tau)
    g = (phi_hat(eps * s) - phi_hat(s)) ** 2
    w = np.full(n + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return float(np.dot(w, g) * (b - a) / (3 * n))


# --------------------------------------------------------------------------
# the multiplier

def multiplier_m(xi: float, eta: float, nodes_per_period: int = 16) -> complex:
    """m(xi, eta) = int exp(2 pi i (t xi + eta/t)) zeta(t) dt over [1/2, 2].

    Composite 16-point Gauss-Legendre with one panel per oscillation of the
    phase (at least 16 nodes per period) and at least 32 panels, which the
    flat ends of the bump need at low frequency.
    """
    periods = 1.5 * abs(xi) + 1.0 * abs(eta) * 1.5 + 1.0
    panels = max(32, int(math.ceil(periods * 16 / nodes_per_period)))
    t, w = composite_gauss_legendre(0.5, 2.0, panels, order=16)
    return complex(np.sum(w * zeta(t) * np.exp(2j * np.pi * (t * xi + eta / t))))


def multiplier_bruteforce(xi: float, eta: float, n: int = 1_000_000) -> complex:
    """Midpoint rule with n uniform nodes (spectrally accurate for the flat-ended bump)."""
    dt = 1.5 / n
    total = 0j
    for k in range(0, n, 250_000):
        t = 0.5 + (np.arange(k, min(n, k + 250_000)) + 0.5) * dt
        total += np.sum(zeta(t) * np.exp(2j * np.pi * (t * xi + eta / t)))
    return complex(total * dt)


@dataclass
class DecayFit:
    diagonal: bool
    xis: np.ndarray
    values: np.ndarray
    slope: float
    best_N: Optional[float] = None
    bound_N3_holds: Optional[bool] = None


def multiplier_decay_fit(diagonal: bool, xi_range: Sequence[float],
                         noise_floor: float = 1e-14) -> DecayFit:
    """Log-log decay of |m(xi, xi)| (diagonal) or |m(xi, -xi)| (anti-diagonal)."""
    xis = np.asarray(xi_range, dtype=float)
    if xis.min() < 2 ** 4 or xis.max() > 2 ** 12:
        raise ValueError("xi_range must lie within [2^4, 2^12]")
    sign = 1.0 if diagonal else -1.0
    vals = np.array([abs(multiplier_m(x, sign * x)) for x in xis])
    above = vals > noise_floor * zeta_integral()
    if above.sum() >= 2:
        slope = float(np.polyfit(np.log(xis[above]), np.log(vals[above]), 1)[0])
    else:
        slope = float("-inf")
    if diagonal:
        return DecayFit(True, xis, vals, slope)
    # |m| <= C_3 xi^-3 with C_3 fixed at the first point (noise-floor values count as decayed)
    c3 = vals[0] * xis[0] ** 3
    holds = bool(np.all((vals <= c3 * xis ** -3 * (1 + 1e-6)) | ~above))
    return DecayFit(False, xis, vals, slope, best_N=-slope, bound_N3_holds=holds)


# --------------------------------------------------------------------------
# Littlewood-Paley pieces

def _g(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = t > 0
    out[m] = np.exp(-1.0 / t[m])
    return out


def lp_step(u):
    """Smooth even cutoff: 1 on [-1, 1], 0 outside [-2, 2]."""
    a = np.abs(np.asarray(u, dtype=float))
    p = _g(2.0 - a)
    q = _g(a - 1.0)
    return p / (p + q)


def _phi_tilde(j: int, u):
    if j == 0:
        return lp_step(u)
    return lp_step(2.0 ** -j * u) - lp_step(2.0 ** (1 - j) * u)


def _active_range(u):
    """Indices j whose piece can be nonzero at |u| (at most two)."""
    a = float(np.max(np.abs(u))) if np.size(u) else 0.0
    return int(math.ceil(math.log2(4 * max(a, 1.0)))) + 1


def lp_S(u):
    u = np.asarray(u, dtype=float)
    J = _active_range(u)
    return sum(_phi_tilde(j, u) ** 2 for j in range(J + 1))


def lp_piece(j: int, u):
    """psi_j(u) = phi~_j(u) / S(u)^(1/2)."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    u = np.asarray(u, dtype=float)
    return _phi_tilde(j, u) / np.sqrt(lp_S(u))


def lp_partition_check(u_samples) -> float:
    """max |sum_j psi_j(u)^2 - 1| over the samples, all j with 2^j <= 4 max|u|."""
    u = np.atleast_1d(np.asarray(u_samples, dtype=float))
    a = max(float(np.max(np.abs(u))), 1.0)
    J = int(math.floor(math.log2(4 * a)))
    total = sum(lp_piece(j, u) ** 2 for j in range(J + 1))
    return float(np.max(np.abs(total - 1.0)))


# --------------------------------------------------------------------------
# trilinear smoothing probe

def modulated_bump_fields(N: float, h: float, half: float = 2.0):
    """(f0, f1, f2) on [-half-1, half+1]^2: f0 the indicator of the half box x + y <= 0,
    f1 = exp(2 pi i N x) b, f2 = exp(2 pi i N y) b with b a smooth bump on [-half, half]^2.
    """
    L = half + 1.0
    n = int(round(2 * L / h))
    c = -L + (np.arange(n) + 0.5) * h
    X, Y = np.meshgrid(c, c, indexing="ij")

    def bump1(t):
        s = np.clip(np.abs(t) / half, 0, 1)
        out = np.zeros_like(t)
        m = s < 1
        out[m] = np.exp(1 - 1 / (1 - s[m] ** 2))
        return out

    b = bump1(X) * bump1(Y)
    f0 = ((X + Y <= 0) & (np.abs(X) <= half) & (np.abs(Y) <= half)).astype(float)
    f1 = np.exp(2j * np.pi * N * X) * b
    f2 = np.exp(2j * np.pi * N * Y) * b
    return tuple(RasterField(-L, -L, h, v) for v in (f0, f1, f2))


def smoothing_ratio_probe(f0: RasterField, f1: RasterField, f2: RasterField, sigma: float,
                          n_nodes: int = 64) -> float:
    """|N(f0, f1, f2)| / (||f0||_inf ||f1||_{H^{-sigma,0}} ||f2||_{H^{0,-sigma}}) at lambda = 1."""
    for f in (f0, f1, f2):
        x0, x1, y0, y1 = f.bounds
        if min(x0, y0) < -10 - 1e-9 or max(x1, y1) > 10 + 1e-9:
            raise ValueError("fields must be supported in [-10, 10]^2")
    num = abs(eval_N0(f0, f1, f2, 1.0, n_nodes).value)
    den = float(np.max(np.abs(f0.values))) * sobolev_norm(f1, -sigma, 0) * sobolev_norm(f2, 0, -sigma)
    if den == 0:
        raise ValueError("zero denominator")
    return num / den
