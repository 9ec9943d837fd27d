"""Minimal SVG 1.1 writer for overlaying source curves and fitted splines."""

from __future__ import annotations

from xml.sax.saxutils import quoteattr

import numpy as np

STYLES = {
    "source": {"stroke": "#d62728", "stroke-width": "1", "fill": "none"},
    "fitted": {"stroke": "#f2b705", "stroke-width": "2.5", "fill": "none",
               "stroke-opacity": "0.85"},
    "offset": {"stroke": "#1f77b4", "stroke-width": "1", "fill": "none",
               "stroke-dasharray": "4 3"},
}


def _planar(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.shape[1] == 1:
        raise ValueError("pass (t, f(t)) pairs for scalar curves")
    return pts[:, :2]


def render_svg(layers: list[tuple[str, list[np.ndarray]]], width: int = 800,
               margin: float = 0.05) -> str:
    """SVG text with one <g> per layer; each layer is (css class, list of polylines).

    The y axis points up, as in the curve coordinates.
    """
    polys = [(cls, _planar(p)) for cls, group in layers for p in group if len(p)]
    if not polys:
        raise ValueError("nothing to draw")
    allpts = np.vstack([p for _, p in polys])
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    pad = margin * float(span.max())
    lo, span = lo - pad, span + 2 * pad
    scale = width / float(span[0]) if span[0] >= span[1] else width / float(span[1])
    w, h = span * scale

    def xy(p):
        x = (p[:, 0] - lo[0]) * scale
        y = h - (p[:, 1] - lo[1]) * scale
        return " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(x, y))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.1f}" '
        f'height="{h:.1f}" viewBox="0 0 {w:.3f} {h:.3f}">',
    ]
    for cls, group in layers:
        style = STYLES.get(cls, STYLES["source"])
        attrs = " ".join(f"{k}={quoteattr(v)}" for k, v in style.items())
        out.append(f'  <g class={quoteattr(cls)} {attrs}>')
        for p in group:
            if len(p):
                out.append(f'    <polyline class={quoteattr(cls)} points="{xy(_planar(p))}"/>')
        out.append("  </g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
