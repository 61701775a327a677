"""Quadrature for the trilinear counting forms and their decomposition scans.

The exact form at eccentricity ``lam`` is

    N0(f0, f1, f2) = int zeta(u) int f0(x, y) f1(x + lam u, y) f2(x, y + 1/(lam u)) dx dy du,

evaluated with Gauss-Legendre in ``u`` and a cell-center sum in ``(x, y)``
restricted to the support of ``f0``.  The smoothed form mollifies ``f1`` in x
at width ``lam * eps`` and ``f2`` in y at width ``eps / lam``; ``eps = 1`` is
the structured part.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .mollifiers import composite_gauss_legendre, phi, u_rule, zeta
from .raster import (RasterField, _interp_rows, convolve_axis, rasterize, rotate_field, sample_along_x,
                     sample_along_y, trim)

DEFAULT_NODES = 64


@dataclass
class FormEvaluation:
    kind: str
    lam: float
    eps: float
    value: float
    quad_error: float
    flags: list = field(default_factory=list)

    def __post_init__(self):
        if self.quad_error < 0:
            raise ValueError("quad_error must be nonnegative")

    def as_row(self):
        return {"kind": self.kind, "lambda": self.lam, "eps": self.eps,
                "value": self.value, "quad_error": self.quad_error}


def _row_offset(a: RasterField, b: RasterField) -> int:
    return int(round((a.y0 - b.y0) / a.h))


def _col_offset(a: RasterField, b: RasterField) -> int:
    return int(round((a.x0 - b.x0) / a.h))


def _trilinear(f0: RasterField, g1: RasterField, g2: RasterField, lam: float, n_nodes: int,
               u_tol: Optional[float] = None, max_nodes: int = 2048):
    """Returns (value, |value - value at half the nodes|).

    With ``u_tol`` the rule is doubled until the two levels agree to
    ``u_tol`` relative (raster integrands are only piecewise smooth in u).
    """
    I, J = np.nonzero(f0.values)
    if len(I) == 0:
        return 0.0, 0.0
    v0 = f0.values[I, J]
    x = f0.xc()[I]
    y = f0.yc()[J]
    J1 = J + _row_offset(f0, g1)
    I2 = I + _col_offset(f0, g2)
    keep = (J1 >= 0) & (J1 < g1.ny) & (I2 >= 0) & (I2 < g2.nx)
    v0, x, y, J1, I2 = v0[keep], x[keep], y[keep], J1[keep], I2[keep]

    def level(n):
        u, w = u_rule(n)
        total = 0.0
        for uk, wk in zip(u, w):
            if wk == 0:
                continue
            s = lam * uk
            a = sample_along_x(g1, x + s, J1)
            b = sample_along_y(g2, I2, y + 1.0 / s)
            total += wk * np.sum(v0 * a * b)
        return total * f0.h * f0.h

    n = n_nodes
    prev, cur = level(max(n // 2, 2)), level(n)
    while u_tol is not None and abs(cur - prev) > u_tol * abs(cur) and 2 * n <= max_nodes:
        n *= 2
        prev, cur = cur, level(n)
    return cur, abs(cur - prev)


def _check_grid(*fields):
    f0 = fields[0]
    for f in fields[1:]:
        if not f0.same_grid(f):
            raise ValueError("fields must share grid geometry")


def _scalar(v):
    return complex(v) if np.iscomplexobj(v) else float(v)


def eval_N0(f0: RasterField, f1: RasterField, f2: RasterField, lam: float,
            n_nodes: int = DEFAULT_NODES, u_tol: Optional[float] = None) -> FormEvaluation:
    if lam <= 0:
        raise ValueError("lambda must be positive")
    _check_grid(f0, f1, f2)
    v, err = _trilinear(f0, f1, f2, lam, n_nodes, u_tol)
    return FormEvaluation("N0", lam, 0.0, _scalar(v), float(err))


def smooth_slots(f0: RasterField, f1: RasterField, f2: RasterField, lam: float, eps: float):
    """Mollify f1 in x (width lam*eps) and f2 in y (width eps/lam) on the queried ranges."""
    bx = f0.bounds
    h = f0.h
    g1 = convolve_axis(f1, lam * eps, 0, bx[0] + 0.5 * lam - h, bx[1] + 2 * lam + h)
    g2 = convolve_axis(f2, eps / lam, 1, bx[2] + 0.5 / lam - h, bx[3] + 2 / lam + h)
    flags = []
    if lam * eps < 2 * h or eps / lam < 2 * h:
        flags.append("under-resolved mollifier")
    return g1, g2, flags


def eval_Neps_fields(f0, f1, f2, lam: float, eps: float, n_nodes: int = DEFAULT_NODES,
                     u_tol: Optional[float] = None) -> FormEvaluation:
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    _check_grid(f0, f1, f2)
    g1, g2, flags = smooth_slots(f0, f1, f2, lam, eps)
    v, err = _trilinear(f0, g1, g2, lam, n_nodes, u_tol)
    kind = "N1" if eps == 1 else "Neps"
    return FormEvaluation(kind, lam, eps, _scalar(v), float(err), flags)


def eval_Neps(A: RasterField, lam: float, eps: float, n_nodes: int = DEFAULT_NODES) -> FormEvaluation:
    return eval_Neps_fields(A, A, A, lam, eps, n_nodes)


def eval_N1(A: RasterField, lam: float, n_nodes: int = DEFAULT_NODES) -> FormEvaluation:
    return eval_Neps_fields(A, A, A, lam, 1.0, n_nodes)


def eval_form(A: RasterField, lam: float, eps: float, n_nodes: int = DEFAULT_NODES) -> FormEvaluation:
    """N0 when eps == 0, otherwise the smoothed form."""
    if eps == 0:
        return eval_N0(A, A, A, lam, n_nodes)
    return eval_Neps(A, lam, eps, n_nodes)


# --------------------------------------------------------------------------
# the positive kernel of the structured part

def eval_kernel_Kplus(lam: float, x, y, n_nodes: int = 96):
    """K+(x, y) = int phi(x/lam + u) phi(lam y + 1/u) zeta(u) du."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u, w = composite_gauss_legendre(0.5, 2.0, panels=max(n_nodes // 16, 1), order=16)
    w = w * zeta(u)
    out = np.zeros(np.broadcast(x, y).shape)
    for uk, wk in zip(u, w):
        out += wk * phi(x / lam + uk) * phi(lam * y + 1.0 / uk)
    return out


def kplus_floor(lam: float, n_grid: int = 41) -> float:
    """Minimum of K+ over [-lam, lam] x [-1/lam, 1/lam] on a grid."""
    xs = np.linspace(-lam, lam, n_grid)
    ys = np.linspace(-1 / lam, 1 / lam, n_grid)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return float(eval_kernel_Kplus(lam, X, Y).min())


def eval_N1_kernel(f0: RasterField, f1: RasterField, f2: RasterField, lam: float) -> float:
    """Structured form through its kernel representation.

    Sums f0(x, y) f1(x', y) f2(x, y') K+(x - x', y - y') over cell centers;
    cost is O(n^4), so keep grids small.
    """
    _check_grid(f0, f1, f2)
    h = f0.h
    nx, ny = f0.nx, f0.ny
    dx = np.arange(-(nx - 1), nx) * h
    dy = np.arange(-(ny - 1), ny) * h
    K = eval_kernel_Kplus(lam, dx[:, None], dy[None, :])  # K[di + nx-1, dj + ny-1]
    ii = np.arange(nx)
    gather = ii[:, None] - ii[None, :] + (nx - 1)  # [i, i'] -> di index
    total = 0.0
    F2 = f2.values
    for j in range(ny):
        if not np.any(f0.values[:, j]) or not np.any(f1.values[:, j]):
            continue
        # P[i, di] = sum_j' f2[i, j'] K[di, j - j']
        Kcol = K[:, (j - np.arange(ny)) + (ny - 1)]  # [di, j']
        P = F2 @ Kcol.T  # [i, di]
        S = np.take_along_axis(P, gather, axis=1) @ f1.values[:, j]
        total += np.dot(f0.values[:, j], S)
    return float(total * h ** 4)


# --------------------------------------------------------------------------
# horizontal and rotated forms

def _section_average_field(A: RasterField, smooth_width: Optional[float], lam: float):
    """g = 1_square(x) * G(y) / L on the raster grid, L the raster's x-extent."""
    L = A.nx * A.h
    G = A.values.sum(axis=0) * A.h
    vals = np.broadcast_to(G / L, A.values.shape).copy()
    return RasterField(A.x0, A.y0, A.h, vals), L


def eval_Mvec(A: RasterField, lam: float, eps: float, mode: str = "identity",
              n_nodes: int = DEFAULT_NODES, u_tol: Optional[float] = None) -> FormEvaluation:
    """Horizontal form: the third point only needs to share the height y + 1/(lam u).

    ``mode='identity'`` evaluates L * N(1_A, 1_A, g) with g the normalized
    horizontal-section average; ``mode='direct'`` sums over the free abscissa
    explicitly with a composite Simpson rule in u.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if not 0 <= eps <= 1:
        raise ValueError("eps must lie in [0, 1]")
    kind = "Mvec0" if eps == 0 else "MvecEps"
    if not np.any(A.values):
        return FormEvaluation(kind, lam, eps, 0.0, 0.0)
    if mode == "identity":
        g, L = _section_average_field(A, None, lam)
        if eps == 0:
            ev = eval_N0(A, A, g, lam, n_nodes, u_tol)
        else:
            ev = eval_Neps_fields(A, A, g, lam, eps, n_nodes, u_tol)
        return FormEvaluation(kind, lam, eps, L * ev.value, L * ev.quad_error, ev.flags)
    if mode != "direct":
        raise ValueError(f"unknown mode {mode!r}")
    return _Mvec_direct(A, lam, eps, kind)


def _Mvec_direct(A: RasterField, lam, eps, kind, n_simpson: int = 401):
    h = A.h
    flags = []
    if eps > 0:
        g1, g2, flags = smooth_slots(A, A, A, lam, eps)
    else:
        g1, g2 = A, A
    u = np.linspace(0.5, 2.0, n_simpson)
    w = np.full(n_simpson, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    w *= (u[1] - u[0]) / 3.0 * zeta(u)
    I, J = np.nonzero(A.values)
    v0 = A.values[I, J]
    x = A.xc()[I]
    J1 = J + _row_offset(A, g1)
    # the free abscissa of the third point is summed out once: S(y) = sum_x' g2(x', y) h
    S = g2.values.sum(axis=0) * h
    ys = A.yc()
    total = 0.0
    for uk, wk in zip(u, w):
        if wk == 0:
            continue
        s = lam * uk
        a = sample_along_x(g1, x + s, J1)
        H = np.bincount(J, weights=v0 * a, minlength=A.ny) * h
        fj = (ys + 1.0 / s - g2.y0) / h - 0.5
        Gs = _interp_rows(S[:, None], fj, np.zeros(len(fj), dtype=int))
        total += wk * np.sum(H * Gs) * h
    return FormEvaluation(kind, lam, eps, float(total), 0.0, flags)


def eval_M(A: RasterField, lam: float, eps: float, n_angles: int = 16,
           n_nodes: int = DEFAULT_NODES) -> FormEvaluation:
    """Average of the horizontal form over a uniform grid of rotations."""
    if n_angles < 4:
        raise ValueError("need at least 4 angles")
    kind = "M0" if eps == 0 else "Meps"
    if not np.any(A.values):
        return FormEvaluation(kind, lam, eps, 0.0, 0.0)
    vals, errs, flags = [], [], set()
    for theta in 2 * np.pi * np.arange(n_angles) / n_angles:
        Ar = A if theta == 0 else trim(rotate_field(A, theta), 1e-12)
        ev = eval_Mvec(Ar, lam, eps, "identity", n_nodes)
        vals.append(ev.value)
        errs.append(ev.quad_error)
        flags.update(ev.flags)
    vals = np.array(vals)
    # spread across angles is reported separately from the u-quadrature error
    return FormEvaluation(kind, lam, eps, float(vals.mean()), float(np.mean(errs)), sorted(flags))


# --------------------------------------------------------------------------
# scans over lambda and eps

def lambda_grid(R: float, n_lambda: int) -> np.ndarray:
    return np.geomspace(1.0 / R, R, n_lambda)


def _log_trapezoid(lams, vals):
    return float(np.trapezoid(vals, np.log(lams)))


@dataclass
class ErrorScan:
    eps: float
    value: float
    lambdas: np.ndarray
    differences: np.ndarray


def error_part_scan(A: RasterField, eps: float, R: float, n_lambda: int = 64,
                    form: str = "N", n_angles: int = 8, n_nodes: int = DEFAULT_NODES,
                    _structured_cache: Optional[dict] = None) -> ErrorScan:
    """int_{1/R}^{R} |N^eps - N^1|^2 dlam/lam by trapezoid in log(lam)."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if n_lambda < 16:
        raise ValueError("n_lambda must be at least 16")
    lams = lambda_grid(R, n_lambda)
    if eps == 1 or not np.any(A.values):
        return ErrorScan(eps, 0.0, lams, np.zeros_like(lams))
    cache = _structured_cache if _structured_cache is not None else {}
    diffs = np.empty_like(lams)
    for k, lam in enumerate(lams):
        if form == "N":
            one = cache.get(("N", lam))
            if one is None:
                one = cache[("N", lam)] = eval_Neps(A, lam, 1.0, n_nodes).value
            e = eval_Neps(A, lam, eps, n_nodes).value
        elif form == "M":
            one = cache.get(("M", lam))
            if one is None:
                one = cache[("M", lam)] = eval_M(A, lam, 1.0, n_angles, n_nodes).value
            e = eval_M(A, lam, eps, n_angles, n_nodes).value
        else:
            raise ValueError(f"unknown form {form!r}")
        diffs[k] = e - one
    return ErrorScan(eps, _log_trapezoid(lams, diffs ** 2), lams, diffs)


@dataclass
class StructuredScan:
    min_ratio: float
    lambdas: np.ndarray
    ratios: np.ndarray
    form: str


def structured_lower_scan(A: RasterField, R: float, n_lambda: int = 64, form: str = "N",
                          n_angles: int = 8, n_nodes: int = DEFAULT_NODES) -> StructuredScan:
    """min over lam in [1/R, R] of N1 R^4/|A|^3 (form 'N') or M1 R^3/|A|^3 (form 'M')."""
    mass = A.measure()
    if mass <= 0:
        raise ValueError("|A| = 0")
    lams = lambda_grid(R, n_lambda)
    ratios = np.empty_like(lams)
    for k, lam in enumerate(lams):
        if form == "N":
            ratios[k] = eval_N1(A, lam, n_nodes).value * R ** 4 / mass ** 3
        elif form == "M":
            ratios[k] = eval_M(A, lam, 1.0, n_angles, n_nodes).value * R ** 3 / mass ** 3
        else:
            raise ValueError(f"unknown form {form!r}")
    return StructuredScan(float(ratios.min()), lams, ratios, form)


def single_rectangle_bound(lam: float, width: float, height: float) -> float:
    """Lower bound on N1 for a rectangle of size width x height with width <= lam, height <= 1/lam.

    On such a rectangle K+ is at least its floor over [-lam, lam] x [-1/lam, 1/lam],
    and the four-fold integral of the indicators equals (width * height)^2.
    """
    if width > lam * (1 + 1e-12) or height > (1 / lam) * (1 + 1e-12):
        raise ValueError("rectangle must fit in lam x 1/lam")
    return kplus_floor(lam) * (width * height) ** 2


@dataclass
class UniformFit:
    sigma_hat: float
    eps_used: np.ndarray
    differences: np.ndarray
    errors: np.ndarray
    noise_limited: bool
    n0: float


def uniform_part_scan(A: RasterField, lam: float, eps_list: Sequence[float],
                      n_nodes: int = DEFAULT_NODES, min_cells: float = 4.0) -> UniformFit:
    """Slope of log|N0 - N^eps| against log(eps) over resolvable eps (lam eps, eps/lam >= 4h)."""
    eps_list = np.asarray(eps_list, dtype=float)
    if np.any(np.diff(eps_list) >= 0) or eps_list.max() > 1 or eps_list.min() <= 0:
        raise ValueError("eps_list must be decreasing in (0, 1]")
    if A.measure() <= 0:
        raise ValueError("|A| = 0")
    h = A.h
    res = eps_list[(lam * eps_list >= min_cells * h) & (eps_list / lam >= min_cells * h)]
    if len(res) < 3:
        raise ValueError("insufficient scale range")
    n0 = eval_N0(A, A, A, lam, n_nodes)
    diffs, errs = [], []
    for e in res:
        ev = eval_Neps(A, lam, e, n_nodes)
        diffs.append(abs(n0.value - ev.value))
        errs.append(n0.quad_error + ev.quad_error)
    diffs = np.array(diffs)
    errs = np.array(errs)
    floor = 1e-10 * max(abs(n0.value), 1e-300) + 1e-14
    noise = bool(np.all(diffs <= np.maximum(errs, floor)))
    if noise:
        return UniformFit(float("nan"), res, diffs, errs, True, n0.value)
    m = diffs > 0
    slope = np.polyfit(np.log(res[m]), np.log(diffs[m]), 1)[0]
    return UniformFit(float(slope), res, diffs, errs, False, n0.value)


# --------------------------------------------------------------------------
# anisotropic rescaling

def rescale_identity_check(A, lam: float, h: float, floor: float = 1e-12,
                           n_nodes: int = DEFAULT_NODES, extrapolate: bool = False) -> float:
    """|N0_lam(A) - N(f, f, f)| / max(|lhs|, floor) with f(x, y) = 1_A(lam x, y/lam).

    ``A`` is a set with ``scaled`` (box union) or a RasterField, which is then
    resampled bilinearly for the rescaled side.  With ``extrapolate`` both
    sides are Richardson-extrapolated from h and h/2.
    """
    def sides(hh):
        if isinstance(A, RasterField):
            lhs_field = A
            bx = A.bounds
            rb = (bx[0] / lam, bx[1] / lam, bx[2] * lam, bx[3] * lam)
            from .raster import grid_for_bounds
            x0, y0, nx, ny = grid_for_bounds(rb, hh)
            xs = x0 + (np.arange(nx) + 0.5) * hh
            ys = y0 + (np.arange(ny) + 0.5) * hh
            vals = A.sample(lam * xs[:, None], ys[None, :] / lam)
            rhs_field = RasterField(x0, y0, hh, vals)
        else:
            lhs_field = rasterize(A, hh)
            rhs_field = rasterize(A.scaled(1.0 / lam, lam), hh)
        lhs = eval_N0(lhs_field, lhs_field, lhs_field, lam, n_nodes).value
        rhs = eval_N0(rhs_field, rhs_field, rhs_field, 1.0, n_nodes).value
        return lhs, rhs

    lhs, rhs = sides(h)
    if extrapolate and not isinstance(A, RasterField):
        lhs2, rhs2 = sides(h / 2)
        lhs, rhs = 2 * lhs2 - lhs, 2 * rhs2 - rhs
    return abs(lhs - rhs) / max(abs(lhs), floor)


# --------------------------------------------------------------------------
# set-level evaluation with a refinement study

def rasterization_error_bound(A: RasterField) -> float:
    """First-order bound on |N(raster) - N(1_A)|, with coverage-fraction values.

    The form is trilinear with every slot bounded by 1, so the error is at most
    int(zeta) times the sum of the L1 distances in each slot.  For slot 0 the
    piecewise-constant raster of coverage fractions v sits at L1 distance
    sum 2 v (1 - v) h^2 from the indicator (the best the cell can do, given
    its coverage); slots 1 and 2 are read through linear interpolation, which
    adds at most h^2/4 per unit jump between neighboring cells.
    """
    from .mollifiers import zeta_integral
    v = np.clip(np.real(A.values), 0.0, 1.0)
    h2 = A.h * A.h
    pc = float(np.sum(2 * v * (1 - v))) * h2
    jumps = float(np.abs(np.diff(v, axis=0)).sum() + np.abs(np.diff(v, axis=1)).sum())
    jumps += float(v[0].sum() + v[-1].sum() + v[:, 0].sum() + v[:, -1].sum())
    interp = 0.25 * jumps * h2
    return zeta_integral() * (pc + 2 * (pc + interp))


def form_on_set(A, kind: str, lam: float, eps: float, h: float, n_angles: int = 16,
                n_nodes: int = DEFAULT_NODES) -> FormEvaluation:
    """Evaluate a form on a set at cell sizes h and h/2.

    The reported value is the h/2 evaluation; quad_error adds the
    u-quadrature estimate and the h vs h/2 discrepancy.
    """
    def run(hh):
        F = rasterize(A, hh)
        if kind == "n0":
            return eval_N0(F, F, F, lam, n_nodes)
        if kind == "neps":
            return eval_Neps(F, lam, eps, n_nodes)
        if kind == "n1":
            return eval_N1(F, lam, n_nodes)
        if kind == "mvec":
            return eval_Mvec(F, lam, eps, "identity", n_nodes)
        if kind == "m":
            return eval_M(F, lam, eps, n_angles, n_nodes)
        raise ValueError(f"unknown kind {kind!r}")

    coarse = run(h)
    fine = run(h / 2)
    err = fine.quad_error + abs(fine.value - coarse.value)
    return FormEvaluation(fine.kind, lam, eps, fine.value, float(err), fine.flags)
