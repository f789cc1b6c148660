"""Minimal self-contained SVG line charts (no plotting dependency).

One fixed-size chart style: linear axes, per-series polyline with
markers and symmetric error whiskers, inline legend. Output references
nothing external, so the files render anywhere as-is.
"""

from __future__ import annotations

import math

__all__ = ["line_plot_svg"]

_WIDTH, _HEIGHT = 640, 440
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 72, 24, 44, 58
_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _finite(values):
    return [v for v in values if v is not None and math.isfinite(v)]


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def _fmt(v: float) -> str:
    return f"{v:.3g}"


def line_plot_svg(path, x_values, series, title: str, x_label: str, y_label: str) -> None:
    """Write a line chart.

    Parameters
    ----------
    x_values : sequence of float
        Shared x coordinates.
    series : list of (label, means, stderrs)
        One curve per entry; non-finite means are skipped pointwise and
        stderrs draw symmetric whiskers.
    """
    xs = [float(v) for v in x_values]
    all_y = []
    for _, means, stderrs in series:
        for m, s in zip(means, stderrs):
            if m is not None and math.isfinite(m):
                all_y.append(m - (s or 0.0))
                all_y.append(m + (s or 0.0))
    x_fin = _finite(xs)
    x_lo, x_hi = (min(x_fin), max(x_fin)) if x_fin else (0.0, 1.0)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo, y_hi = (min(all_y), max(all_y)) if all_y else (0.0, 1.0)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def sx(v: float) -> float:
        return _MARGIN_L + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v: float) -> float:
        return _MARGIN_T + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15" font-weight="bold">{title}</text>',
    ]

    axis_color = "#333333"
    parts.append(
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T + plot_h}" x2="{_MARGIN_L + plot_w}" '
        f'y2="{_MARGIN_T + plot_h}" stroke="{axis_color}" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
        f'y2="{_MARGIN_T + plot_h}" stroke="{axis_color}" stroke-width="1"/>'
    )
    for tick in _ticks(x_lo, x_hi):
        px = sx(tick)
        parts.append(
            f'<line x1="{px:.1f}" y1="{_MARGIN_T + plot_h}" x2="{px:.1f}" '
            f'y2="{_MARGIN_T + plot_h + 5}" stroke="{axis_color}"/>'
        )
        parts.append(
            f'<text x="{px:.1f}" y="{_MARGIN_T + plot_h + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(tick)}</text>'
        )
    for tick in _ticks(y_lo, y_hi):
        py = sy(tick)
        parts.append(
            f'<line x1="{_MARGIN_L - 5}" y1="{py:.1f}" x2="{_MARGIN_L}" y2="{py:.1f}" '
            f'stroke="{axis_color}"/>'
        )
        parts.append(
            f'<line x1="{_MARGIN_L}" y1="{py:.1f}" x2="{_MARGIN_L + plot_w}" y2="{py:.1f}" '
            f'stroke="#dddddd" stroke-width="0.5"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L - 9}" y="{py + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(tick)}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{_HEIGHT - 14}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{x_label}</text>'
    )
    parts.append(
        f'<text x="20" y="{_MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 20 {_MARGIN_T + plot_h / 2:.1f})">{y_label}</text>'
    )

    for s_idx, (label, means, stderrs) in enumerate(series):
        color = _PALETTE[s_idx % len(_PALETTE)]
        points = [
            (sx(x), sy(m), s or 0.0, m)
            for x, m, s in zip(xs, means, stderrs)
            if m is not None and math.isfinite(m)
        ]
        if points:
            poly = " ".join(f"{px:.1f},{py:.1f}" for px, py, _, _ in points)
            parts.append(
                f'<polyline points="{poly}" fill="none" stroke="{color}" stroke-width="2"/>'
            )
            for px, py, err, m in points:
                if err > 0:
                    top, bot = sy(m + err), sy(m - err)
                    parts.append(
                        f'<line x1="{px:.1f}" y1="{top:.1f}" x2="{px:.1f}" y2="{bot:.1f}" '
                        f'stroke="{color}" stroke-width="1"/>'
                    )
                    for wy in (top, bot):
                        parts.append(
                            f'<line x1="{px - 4:.1f}" y1="{wy:.1f}" x2="{px + 4:.1f}" '
                            f'y2="{wy:.1f}" stroke="{color}" stroke-width="1"/>'
                        )
                parts.append(f'<circle cx="{px:.1f}" cy="{py:.1f}" r="3" fill="{color}"/>')
        legend_y = _MARGIN_T + 14 + 18 * s_idx
        legend_x = _MARGIN_L + plot_w - 130
        parts.append(
            f'<line x1="{legend_x}" y1="{legend_y - 4}" x2="{legend_x + 22}" '
            f'y2="{legend_y - 4}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{legend_x + 28}" y="{legend_y}" font-family="sans-serif" '
            f'font-size="12">{label}</text>'
        )

    if not any(_finite(means) for _, means, _ in series):
        parts.append(
            f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{_MARGIN_T + plot_h / 2:.1f}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="13" '
            f'fill="#888888">no data</text>'
        )

    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts))
        fh.write("\n")
