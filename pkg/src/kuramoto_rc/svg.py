"""Minimal deterministic SVG line charts for the CSV outputs."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=70, right=150, top=30, bottom=50)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return out


def _fmt(v):
    return f"{v:.2f}"


def _tick_label(v):
    return f"{v:.6g}"


def line_chart(x, series, bands=(), title="", xlabel="", ylabel=""):
    """SVG text for polylines ``series`` (name -> y list) over ``x``.

    ``bands`` holds ``(name, lower, upper)`` triples drawn as shaded
    polygons under the polyline of the same name.  Non-finite points are
    dropped.
    """
    finite = [v for ys in series.values() for v in ys if math.isfinite(v)]
    finite += [v for _, lo, hi in bands for v in list(lo) + list(hi) if math.isfinite(v)]
    xs = [v for v in x if math.isfinite(v)]
    if not finite or not xs:
        raise ValueError("nothing finite to plot")
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(finite), max(finite)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN["top"] + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>')
    # axes and ticks
    bx, by = MARGIN["left"], MARGIN["top"] + ph
    out.append(f'<line x1="{bx}" y1="{by}" x2="{bx + pw}" y2="{by}" stroke="black"/>')
    out.append(f'<line x1="{bx}" y1="{MARGIN["top"]}" x2="{bx}" y2="{by}" stroke="black"/>')
    for t in _ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{_fmt(X)}" y1="{by}" x2="{_fmt(X)}" y2="{by + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(X)}" y="{by + 18}" text-anchor="middle" font-size="11">{_tick_label(t)}</text>')
    for t in _ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{bx - 5}" y1="{_fmt(Y)}" x2="{bx}" y2="{_fmt(Y)}" stroke="black"/>')
        out.append(f'<text x="{bx - 8}" y="{_fmt(Y + 4)}" text-anchor="end" font-size="11">{_tick_label(t)}</text>')
    if xlabel:
        out.append(f'<text x="{bx + pw / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>')
    if ylabel:
        cy = MARGIN["top"] + ph / 2
        out.append(
            f'<text x="16" y="{cy:.1f}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {cy:.1f})">{escape(ylabel)}</text>'
        )
    names = list(series)
    color = {name: COLORS[i % len(COLORS)] for i, name in enumerate(names)}
    for name, lo, hi in bands:
        pts = [(a, b, c) for a, b, c in zip(x, lo, hi) if math.isfinite(a) and math.isfinite(b) and math.isfinite(c)]
        if len(pts) < 2:
            continue
        poly = [f"{_fmt(px(a))},{_fmt(py(c))}" for a, _, c in pts]
        poly += [f"{_fmt(px(a))},{_fmt(py(b))}" for a, b, _ in reversed(pts)]
        fill = color.get(name, "#999999")
        out.append(f'<polygon class="band" points="{" ".join(poly)}" fill="{fill}" fill-opacity="0.2" stroke="none"/>')
    for i, name in enumerate(names):
        pts = [f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x, series[name]) if math.isfinite(a) and math.isfinite(b)]
        out.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color[name]}" stroke-width="1.5"/>')
        ly = MARGIN["top"] + 14 * i + 6
        lx = WIDTH - MARGIN["right"] + 10
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color[name]}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 25}" y="{ly + 4}" font-size="11">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
