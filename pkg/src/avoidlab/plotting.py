"""Self-contained SVG 1.1 line plots and set drawings (no renderer dependency)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    style: str = "line"  # line | markers | both
    dashed: bool = False


@dataclass
class Plot:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    logx: bool = False
    logy: bool = False
    width: int = 640
    height: int = 420
    series: list = field(default_factory=list)

    def add(self, *args, **kw) -> "Plot":
        self.series.append(Series(*args, **kw))
        return self


def _ticks(lo, hi, log):
    if log:
        a, b = math.floor(lo), math.ceil(hi)
        step = max(1, (b - a) // 6)
        return [float(k) for k in range(a, b + 1, step)]
    span = hi - lo
    raw = span / 5 if span > 0 else 1.0
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=mag)
    start = math.ceil(lo / step) * step
    return list(np.arange(start, hi + step * 1e-9, step))


def _fmt(v, log):
    if log:
        return f"1e{int(round(v))}" if abs(v) >= 3 else f"{10 ** v:g}"
    return f"{v:.4g}"


def render(plot: Plot) -> str:
    """SVG text for a plot; points with non-finite (or non-positive on log axes) values are dropped."""
    W, H, ml, mr, mt, mb = plot.width, plot.height, 70, 150, 30, 50
    tx = (lambda v: np.log10(v)) if plot.logx else (lambda v: v)
    ty = (lambda v: np.log10(v)) if plot.logy else (lambda v: v)
    data = []
    for s in plot.series:
        x = np.asarray(s.x, dtype=float)
        y = np.asarray(s.y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y)
        if plot.logx:
            ok &= x > 0
        if plot.logy:
            ok &= y > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            data.append((s, tx(x[ok]), ty(y[ok])))
    allx = np.concatenate([d[1] for d in data]) if data else np.array([])
    ally = np.concatenate([d[2] for d in data]) if data else np.array([])
    if allx.size == 0:
        allx, ally = np.array([0.0, 1.0]), np.array([0.0, 1.0])
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw, ph = W - ml - mr, H - mt - mb

    def px(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def py(v):
        return mt + ph - (v - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for v in _ticks(x0, x1, plot.logx):
        if x0 - 1e-12 <= v <= x1 + 1e-12:
            X = px(v)
            out.append(f'<line x1="{X:.2f}" y1="{mt + ph}" x2="{X:.2f}" y2="{mt + ph + 4}" stroke="black"/>')
            out.append(f'<text x="{X:.2f}" y="{mt + ph + 16}" text-anchor="middle">{_fmt(v, plot.logx)}</text>')
    for v in _ticks(y0, y1, plot.logy):
        if y0 - 1e-12 <= v <= y1 + 1e-12:
            Y = py(v)
            out.append(f'<line x1="{ml - 4}" y1="{Y:.2f}" x2="{ml}" y2="{Y:.2f}" stroke="black"/>')
            out.append(f'<text x="{ml - 6}" y="{Y + 4:.2f}" text-anchor="end">{_fmt(v, plot.logy)}</text>')
    if plot.title:
        out.append(f'<text x="{ml + pw / 2}" y="18" text-anchor="middle" font-size="13">{escape(plot.title)}</text>')
    if plot.xlabel:
        out.append(f'<text x="{ml + pw / 2}" y="{H - 10}" text-anchor="middle">{escape(plot.xlabel)}</text>')
    if plot.ylabel:
        out.append(f'<text x="14" y="{mt + ph / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 14 {mt + ph / 2})">{escape(plot.ylabel)}</text>')
    for k, (s, x, y) in enumerate(data):
        col = PALETTE[k % len(PALETTE)]
        dash = ' stroke-dasharray="5,3"' if s.dashed else ""
        if s.style in ("line", "both") and len(x) > 1:
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{col}" stroke-width="1.5"{dash}/>')
        if s.style in ("markers", "both") or len(x) == 1:
            out += [f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3" fill="{col}"/>' for a, b in zip(x, y)]
        ly = mt + 12 + 16 * k
        out.append(f'<line x1="{ml + pw + 10}" y1="{ly - 4}" x2="{ml + pw + 28}" y2="{ly - 4}" '
                   f'stroke="{col}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{ml + pw + 32}" y="{ly}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_set(S, size: int = 400) -> str:
    """Draw a BoxUnion (rectangles) or BandSet (clipped antidiagonal bands) in its bounding square."""
    from .constructions import BandSet
    if isinstance(S, BandSet):
        L = float(S.R)
        x0 = y0 = 0.0
    else:
        bb = S.bounding
        x0, y0 = bb.X.lo, bb.Y.lo
        L = max(bb.X.hi - x0, bb.Y.hi - y0)
    k = size / L

    def P(x, y):
        return f"{(x - x0) * k:.3f},{size - (y - y0) * k:.3f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}">',
           f'<rect width="{size}" height="{size}" fill="white" stroke="black"/>']
    if isinstance(S, BandSet):
        for lo, hi in S.bands:
            poly = _band_polygon(lo, hi, L)
            out.append(f'<polygon points="{" ".join(P(x, y) for x, y in poly)}" fill="#1f77b4"/>')
    else:
        for b in S.boxes:
            out.append(f'<rect x="{(b.X.lo - x0) * k:.3f}" y="{size - (b.Y.hi - y0) * k:.3f}" '
                       f'width="{b.X.length * k:.3f}" height="{b.Y.length * k:.3f}" fill="#1f77b4"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _clip(poly, sign, c):
    """Keep the part of a convex polygon with sign*(x + y - c) <= 0."""
    out = []
    for k in range(len(poly)):
        p, q = poly[k], poly[(k + 1) % len(poly)]
        fp, fq = sign * (p[0] + p[1] - c), sign * (q[0] + q[1] - c)
        if fp <= 0:
            out.append(p)
        if fp * fq < 0:
            s = fp / (fp - fq)
            out.append((p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])))
    return out


def _band_polygon(lo, hi, R):
    """Vertices of {lo <= x + y <= hi} within [0, R]^2."""
    square = [(0.0, 0.0), (R, 0.0), (R, R), (0.0, R)]
    return _clip(_clip(square, -1, lo), 1, hi)
