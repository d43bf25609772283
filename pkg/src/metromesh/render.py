"""Deterministic SVG output for meshes and nodal fields."""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .mesh import Mesh

WIDTH = 800
MARGIN = 20
LEGEND_W = 90
# blue -> white -> red ramp
_RAMP = np.array([[59, 76, 192], [221, 221, 221], [180, 4, 38]], dtype=float)


def _colour(t: float) -> str:
    t = min(max(t, 0.0), 1.0) * (len(_RAMP) - 1)
    k = min(int(t), len(_RAMP) - 2)
    c = _RAMP[k] + (t - k) * (_RAMP[k + 1] - _RAMP[k])
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


def _f(v: float) -> str:
    return f"{v:.3f}"


def render_svg(mesh: Mesh, values: Sequence[float] | None = None, title: str = "") -> str:
    """Wireframe of ``mesh``; with ``values`` each triangle is filled by its mean nodal value."""
    xmin, xmax, ymin, ymax = mesh.superdomain
    span = max(xmax - xmin, ymax - ymin) or 1.0
    scale = (WIDTH - 2 * MARGIN) / span
    height = int(round((ymax - ymin) * scale)) + 2 * MARGIN
    total_w = WIDTH + (LEGEND_W if values is not None else 0)

    def sx(x):
        return MARGIN + (x - xmin) * scale

    def sy(y):
        return MARGIN + (ymax - y) * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{height}" '
        f'viewBox="0 0 {total_w} {height}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    vals = None
    if values is not None:
        vals = np.asarray(values, dtype=float)
        if vals.shape != (mesh.n_points,):
            raise ValueError("one value per node is required")
        lo, hi = float(vals.min()), float(vals.max())
        rng = hi - lo if hi > lo else 1.0
    out.append('<g id="mesh" stroke="#222222" stroke-width="0.6" stroke-linejoin="round">')
    for tri in mesh.triangles.tolist():
        pts = " ".join(f"{_f(sx(x))},{_f(sy(y))}" for x, y in mesh.points[tri].tolist())
        fill = "none" if vals is None else _colour((float(vals[tri].mean()) - lo) / rng)
        out.append(f'<polygon points="{pts}" fill="{fill}"/>')
    out.append("</g>")
    if vals is not None:
        x0 = WIDTH + 10
        bar_h = height - 2 * MARGIN
        out.append('<g id="legend" font-family="sans-serif" font-size="11">')
        steps = 20
        for k in range(steps):
            t = 1.0 - (k + 0.5) / steps
            y = MARGIN + k * bar_h / steps
            out.append(f'<rect x="{x0}" y="{_f(y)}" width="16" height="{_f(bar_h / steps + 0.5)}" '
                       f'fill="{_colour(t)}"/>')
        out.append(f'<text x="{x0 + 20}" y="{MARGIN + 10}">{hi:.4g}</text>')
        out.append(f'<text x="{x0 + 20}" y="{MARGIN + bar_h}">{lo:.4g}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
