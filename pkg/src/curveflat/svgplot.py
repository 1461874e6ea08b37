"""Minimal deterministic SVG line-plot emitter.

Output is a self-contained SVG document built by plain string assembly:
identical inputs yield byte-identical documents (no timestamps, ids, or
randomness). Data series are rendered as one ``<polyline>`` each; axes,
ticks, and legend use ``<path>``, ``<line>``, and ``<text>`` elements so
polyline count always equals series count.

Coordinate transform (also the contract for tests that invert it): with
plot area width W = width - margin_left - margin_right and height
H = height - margin_top - margin_bottom,

    px(x) = margin_left + (x - x_min) * W / (x_max - x_min)
    py(y) = margin_top + H - (y - y_min) * H / (y_max - y_min)

where the min/max run over all series (padded by 0.5 when degenerate).
Pixel coordinates are written with 2 decimal places.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class PlotSeries:
    label: str
    x: tuple[float, ...]
    y: tuple[float, ...]


@dataclass(frozen=True)
class PlotStyle:
    width: int = 800
    height: int = 480
    margin_left: int = 64
    margin_right: int = 16
    margin_top: int = 28
    margin_bottom: int = 44
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    colors: tuple[str, ...] = ("#1f6fb4", "#c23b22", "#2e8b57", "#e08214")
    n_ticks: int = 5


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def _span(lo: float, hi: float) -> tuple[float, float]:
    if hi == lo:
        return lo - 0.5, hi + 0.5
    return lo, hi


def emit_plot(series: Sequence[PlotSeries], style: PlotStyle = PlotStyle()) -> str:
    """Render one or more numeric series as an SVG line plot."""
    if not series:
        raise ValueError("need at least one series")
    for s in series:
        if len(s.x) != len(s.y):
            raise ValueError(f"series {s.label!r}: x and y lengths differ")
        if len(s.x) < 2:
            raise ValueError(f"series {s.label!r}: need at least 2 points")
        if not all(math.isfinite(v) for v in (*s.x, *s.y)):
            raise ValueError(f"series {s.label!r}: values must be finite")

    x_min, x_max = _span(
        min(min(s.x) for s in series), max(max(s.x) for s in series)
    )
    y_min, y_max = _span(
        min(min(s.y) for s in series), max(max(s.y) for s in series)
    )
    st = style
    inner_w = st.width - st.margin_left - st.margin_right
    inner_h = st.height - st.margin_top - st.margin_bottom

    def px(x: float) -> float:
        return st.margin_left + (x - x_min) * inner_w / (x_max - x_min)

    def py(y: float) -> float:
        return st.margin_top + inner_h - (y - y_min) * inner_h / (y_max - y_min)

    out: list[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{st.width}" '
        f'height="{st.height}" viewBox="0 0 {st.width} {st.height}">'
    )
    out.append(f'<rect width="{st.width}" height="{st.height}" fill="#ffffff"/>')
    if st.title:
        out.append(
            f'<text x="{st.width / 2:.2f}" y="18" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{_esc(st.title)}</text>'
        )

    # axes
    x0, y0 = st.margin_left, st.margin_top + inner_h
    out.append(
        f'<path d="M {x0} {st.margin_top} L {x0} {y0} L {x0 + inner_w} {y0}" '
        f'fill="none" stroke="#222222" stroke-width="1"/>'
    )
    for i in range(st.n_ticks):
        frac = i / (st.n_ticks - 1) if st.n_ticks > 1 else 0.0
        xv = x_min + frac * (x_max - x_min)
        yv = y_min + frac * (y_max - y_min)
        xp, yp = px(xv), py(yv)
        out.append(
            f'<line x1="{xp:.2f}" y1="{y0}" x2="{xp:.2f}" y2="{y0 + 4}" '
            f'stroke="#222222" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{xp:.2f}" y="{y0 + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{xv:.6g}</text>'
        )
        out.append(
            f'<line x1="{x0 - 4}" y1="{py(yv):.2f}" x2="{x0}" y2="{py(yv):.2f}" '
            f'stroke="#222222" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{x0 - 6}" y="{py(yv) + 3:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{yv:.6g}</text>'
        )
    if st.x_label:
        out.append(
            f'<text x="{st.margin_left + inner_w / 2:.2f}" y="{st.height - 8}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="11">'
            f"{_esc(st.x_label)}</text>"
        )
    if st.y_label:
        yl_x, yl_y = 14, st.margin_top + inner_h / 2
        out.append(
            f'<text x="{yl_x}" y="{yl_y:.2f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11" '
            f'transform="rotate(-90 {yl_x} {yl_y:.2f})">{_esc(st.y_label)}</text>'
        )

    # data series
    for idx, s in enumerate(series):
        color = st.colors[idx % len(st.colors)]
        points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(s.x, s.y))
        out.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )

    # legend
    for idx, s in enumerate(series):
        color = st.colors[idx % len(st.colors)]
        lx = st.margin_left + 8
        ly = st.margin_top + 10 + 14 * idx
        out.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 18}" y2="{ly}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{lx + 24}" y="{ly + 3}" font-family="sans-serif" '
            f'font-size="10">{_esc(s.label)}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
