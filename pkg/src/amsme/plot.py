"""Standalone SVG rendering for embeddings and experiment curves."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .errors import DimensionError

# tab20
PALETTE = (
    "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c", "#98df8a", "#d62728", "#ff9896",
    "#9467bd", "#c5b0d5", "#8c564b", "#c49c94", "#e377c2", "#f7b6d2", "#7f7f7f", "#c7c7c7",
    "#bcbd22", "#dbdb8d", "#17becf", "#9edae5",
)
DEFAULT_COLOR = "#4c72b0"
WIDTH, HEIGHT = 640, 640
LEGEND_W = 90


def _bounds(v):
    lo, hi = float(np.min(v)), float(np.max(v))
    span = hi - lo
    if span == 0:
        span = 1.0 if lo == 0 else abs(lo)
        lo, hi = lo - span / 2, hi + span / 2
    pad = 0.05 * span
    return lo - pad, hi + pad


def point_radius(n):
    return float(np.clip(60.0 / np.sqrt(n), 0.6, 5.0))


def emit_scatter(Y, labels=None, path=None, title=None) -> str:
    """Write a 2-D embedding as an SVG scatter plot and return the markup.

    ``Y`` is ``2 x n`` (or an ``Embedding``). Points are coloured by label with
    the 20-colour palette, cycling for more labels.
    """
    Yv = np.asarray(getattr(Y, "Y", Y), dtype=np.float64)
    if Yv.ndim != 2 or Yv.shape[0] != 2:
        raise DimensionError(f"scatter needs a 2 x n embedding, got shape {Yv.shape}")
    n = Yv.shape[1]
    lab = None if labels is None else np.asarray(getattr(labels, "labels", labels))
    if lab is not None and lab.size != n:
        raise DimensionError(f"{lab.size} labels for {n} points")

    x0, x1 = _bounds(Yv[0])
    y0, y1 = _bounds(Yv[1])
    sx = (WIDTH - 1) / (x1 - x0)
    sy = (HEIGHT - 1) / (y1 - y0)
    px = (Yv[0] - x0) * sx
    py = (HEIGHT - 1) - (Yv[1] - y0) * sy
    r = point_radius(n)

    total_w = WIDTH + (LEGEND_W if lab is not None else 0)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{HEIGHT}" '
        f'viewBox="0 0 {total_w} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white" stroke="#cccccc"/>',
    ]
    if title:
        out.append(f'<title>{escape(str(title))}</title>')
    out.append(f'<g fill-opacity="0.8" stroke="none">')
    if lab is None:
        for cx, cy in zip(px, py):
            out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="{DEFAULT_COLOR}"/>')
    else:
        for cx, cy, c in zip(px, py, lab):
            out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" '
                       f'fill="{PALETTE[int(c) % len(PALETTE)]}"/>')
    out.append("</g>")
    if lab is not None:
        out.append('<g class="legend" font-family="sans-serif" font-size="11">')
        for row, c in enumerate(np.unique(lab)):
            y = 16 + 16 * row
            out.append(f'<circle cx="{WIDTH + 12}" cy="{y - 4}" r="5" fill="{PALETTE[int(c) % len(PALETTE)]}"/>')
            out.append(f'<text x="{WIDTH + 22}" y="{y}">{int(c)}</text>')
        out.append("</g>")
    out.append("</svg>")
    svg = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(svg)
    return svg


def emit_lines(x, series, path=None, xlabel="", ylabel="", logx=False) -> str:
    """Minimal line chart: ``series`` maps a name to y-values aligned with ``x``."""
    x = np.asarray(x, dtype=np.float64)
    xs = np.log10(x) if logx else x
    ys_all = np.concatenate([np.asarray(v, dtype=np.float64) for v in series.values()])
    x0, x1 = _bounds(xs)
    y0, y1 = _bounds(ys_all)
    left, bottom, w, h = 60, 40, WIDTH - 80, HEIGHT - 100

    def tx(v):
        return left + (v - x0) / (x1 - x0) * w

    def ty(v):
        return HEIGHT - bottom - (v - y0) / (y1 - y0) * h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<g font-family="sans-serif" font-size="12">',
        f'<line x1="{left}" y1="{HEIGHT - bottom}" x2="{left + w}" y2="{HEIGHT - bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{HEIGHT - bottom}" x2="{left}" y2="{HEIGHT - bottom - h}" stroke="black"/>',
        f'<text x="{left + w / 2}" y="{HEIGHT - 8}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{HEIGHT / 2}" transform="rotate(-90 14 {HEIGHT / 2})" '
        f'text-anchor="middle">{escape(ylabel)}</text>',
    ]
    for xv, raw in zip(xs, x):
        out.append(f'<text x="{tx(xv):.1f}" y="{HEIGHT - bottom + 16}" text-anchor="middle">{raw:g}</text>')
    for yv in np.linspace(y0, y1, 5):
        out.append(f'<text x="{left - 6}" y="{ty(yv) + 4:.1f}" text-anchor="end">{yv:.3g}</text>')
    for s, (name, ys) in enumerate(series.items()):
        color = PALETTE[(2 * s) % len(PALETTE)]
        pts = " ".join(f"{tx(a):.1f},{ty(b):.1f}" for a, b in zip(xs, ys))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + w - 4}" y="{20 + 16 * s}" text-anchor="end" fill="{color}">'
                   f'{escape(name)}</text>')
    out.append("</g></svg>")
    svg = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(svg)
    return svg
