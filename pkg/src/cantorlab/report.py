"""Self-describing CSV tables and minimal SVG line plots."""

from __future__ import annotations

import io
import math
import platform
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np
import scipy

from . import __version__

NUMBER_FORMAT = "{:.12g}"


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return NUMBER_FORMAT.format(float(value))
    return str(value).replace(",", ";")


def version_lines() -> dict:
    return {
        "cantorlab": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"{self.name}: expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(values)

    def to_csv(self, header: dict) -> str:
        out = io.StringIO()
        for key, value in {**header, **self.meta}.items():
            out.write(f"# {key}: {fmt(value)}\n")
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(fmt(v) for v in row) + "\n")
        return out.getvalue()


# -- SVG ---------------------------------------------------------------------------


@dataclass
class Series:
    label: str
    x: list
    y: list


def svg_plot(title, xlabel, ylabel, series, width=640, height=420) -> str:
    """One line plot with labeled axes; non-finite points are dropped."""
    pts = [(float(a), float(b)) for s in series for a, b in zip(s.x, s.y) if math.isfinite(a) and math.isfinite(b)]
    if not pts:
        pts = [(0.0, 0.0), (1.0, 1.0)]
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (1 - (y - y0) / (y1 - y0)) * ph

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
        f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="15" y="{top + ph / 2:.1f}" text-anchor="middle" transform="rotate(-90 15 {top + ph / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for k in range(5):
        tx = x0 + (x1 - x0) * k / 4
        ty = y0 + (y1 - y0) * k / 4
        parts.append(f'<text x="{px(tx):.1f}" y="{top + ph + 16}" text-anchor="middle">{tx:.4g}</text>')
        parts.append(f'<text x="{left - 6}" y="{py(ty) + 4:.1f}" text-anchor="end">{ty:.4g}</text>')
    for i, s in enumerate(series):
        color = colors[i % len(colors)]
        coords = " ".join(f"{px(float(a)):.2f},{py(float(b)):.2f}" for a, b in zip(s.x, s.y) if math.isfinite(a) and math.isfinite(b))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        parts.append(f'<text x="{left + pw - 4}" y="{top + 14 + 14 * i}" text-anchor="end" fill="{color}">{escape(s.label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
