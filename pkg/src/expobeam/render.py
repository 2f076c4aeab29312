"""Dependency-free SVG rendering of result CSVs: heatmaps and CDF charts."""

from __future__ import annotations

import csv
import math
from typing import Sequence


class RenderError(ValueError):
    pass


def _color(frac: float) -> str:
    """Linear blue->red scale for a value fraction in [0, 1]."""
    frac = min(max(frac, 0.0), 1.0)
    r = int(255 * frac)
    b = int(255 * (1.0 - frac))
    g = int(64 * (1.0 - abs(2.0 * frac - 1.0)))
    return f"rgb({r},{g},{b})"


def heatmap_svg(
    xs: Sequence[float],
    ys: Sequence[float],
    values: Sequence[float],
    threshold: float | None = None,
    title: str = "",
    cell_px: int = 9,
) -> str:
    """Heatmap of (x, y, value) rows on a regular grid.

    Cells above ``threshold`` are outlined, tracing the compliance
    contour; the outline is absent when no value exceeds it.
    """
    if not values:
        raise RenderError("no data to render")
    ux = sorted(set(xs))
    uy = sorted(set(ys))
    vmax = max(values) or 1.0
    xi = {v: i for i, v in enumerate(ux)}
    yi = {v: i for i, v in enumerate(uy)}
    w = len(ux) * cell_px
    h = len(uy) * cell_px
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w + 140}" height="{h + 40}">',
        f'<text x="4" y="16" font-family="sans-serif" font-size="12">{title}</text>',
        f'<g transform="translate(4,24)">',
    ]
    for x, y, v in zip(xs, ys, values):
        px = xi[x] * cell_px
        py = (len(uy) - 1 - yi[y]) * cell_px
        over = threshold is not None and v > threshold
        stroke = ' stroke="black" stroke-width="1"' if over else ""
        parts.append(
            f'<rect x="{px}" y="{py}" width="{cell_px}" height="{cell_px}" '
            f'fill="{_color(v / vmax)}"{stroke}/>'
        )
    parts.append("</g>")
    # legend
    lx = len(ux) * cell_px + 16
    parts.append(f'<g transform="translate({lx},24)">')
    for i in range(10):
        parts.append(
            f'<rect x="0" y="{(9 - i) * 12}" width="14" height="12" '
            f'fill="{_color((i + 0.5) / 10)}"/>'
        )
        parts.append(
            f'<text x="18" y="{(9 - i) * 12 + 10}" font-family="sans-serif" '
            f'font-size="9">{vmax * (i + 1) / 10:.3g}</text>'
        )
    if threshold is not None and max(values) > threshold:
        parts.append(
            f'<text x="0" y="136" font-family="sans-serif" font-size="9">'
            f"contour: {threshold:g}</text>"
        )
    parts.append("</g></svg>")
    return "\n".join(parts)


def cdf_svg(series: dict[str, Sequence[float]], title: str = "",
            width: int = 480, height: int = 320) -> str:
    """Empirical CDF line chart, one polyline per labelled series."""
    finite = [v for vals in series.values() for v in vals if math.isfinite(v)]
    if not finite:
        raise RenderError("no data to render")
    vmin, vmax = min(finite), max(finite)
    if vmax == vmin:
        vmax = vmin + 1.0
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]
    pw, ph, m = width - 60, height - 60, 40
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{m}" y="16" font-family="sans-serif" font-size="12">{title}</text>',
        f'<rect x="{m}" y="{m - 16}" width="{pw}" height="{ph}" fill="none" stroke="#999"/>',
    ]
    for i, (label, vals) in enumerate(series.items()):
        vals = sorted(v for v in vals if math.isfinite(v))
        if not vals:
            continue
        n = len(vals)
        pts = []
        for k, v in enumerate(vals):
            px = m + pw * (v - vmin) / (vmax - vmin)
            py = m - 16 + ph * (1.0 - (k + 1) / n)
            pts.append(f"{px:.1f},{py:.1f}")
        color = colors[i % len(colors)]
        parts.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}"/>')
        parts.append(
            f'<text x="{m + 6}" y="{m + 2 + 14 * i}" font-family="sans-serif" '
            f'font-size="10" fill="{color}">{label}</text>'
        )
    parts.append(
        f'<text x="{m}" y="{height - 8}" font-family="sans-serif" font-size="10">'
        f"{vmin:.3g} .. {vmax:.3g}</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts)


def read_csv_columns(path: str) -> dict[str, list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise RenderError(f"{path}: empty CSV")
        cols: dict[str, list[str]] = {name: [] for name in reader.fieldnames}
        for row in reader:
            for name in reader.fieldnames:
                cols[name].append(row[name])
    if not next(iter(cols.values()), []):
        raise RenderError(f"{path}: no data rows")
    return cols
