"""Minimal deterministic SVG line plots: one polyline per series, fixed
viewport, no timestamps or generator metadata, so emitted bytes depend only
on the data."""

from __future__ import annotations

import math

WIDTH, HEIGHT, PAD = 640, 420, 56


def _transform(xs, ys):
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def to_px(x, y):
        px = PAD + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * PAD)
        py = HEIGHT - PAD - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * PAD)
        return px, py

    return to_px, (x_lo, x_hi, y_lo, y_hi)


def line_plot(series: list[tuple[str, list[float], list[float]]],
              x_label: str, y_label: str, title: str) -> str:
    """Render named series as one polyline each."""
    palette = ["#1f6fb2", "#c23b22", "#2e8b57", "#8a2be2", "#b8860b"]
    all_x = [x for _, xs, _ in series for x in xs]
    all_y = [y for _, _, ys in series for y in ys if math.isfinite(y)]
    if not all_x or not all_y:
        all_x, all_y = [0.0, 1.0], [0.0, 1.0]
    to_px, (x_lo, x_hi, y_lo, y_hi) = _transform(all_x, all_y)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
    ]
    # axes
    x0, y0 = to_px(x_lo, y_lo)
    x1, y1 = to_px(x_hi, y_hi)
    parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y0:.2f}" '
                 'stroke="#333333" stroke-width="1"/>')
    parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x0:.2f}" y2="{y1:.2f}" '
                 'stroke="#333333" stroke-width="1"/>')
    parts.append(f'<text x="{WIDTH // 2}" y="{HEIGHT - 12}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12">{x_label}</text>')
    parts.append(f'<text x="16" y="{HEIGHT // 2}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12" '
                 f'transform="rotate(-90 16 {HEIGHT // 2})">{y_label}</text>')
    for k, (name, xs, ys) in enumerate(series):
        color = palette[k % len(palette)]
        pts = " ".join("{:.2f},{:.2f}".format(*to_px(x, y))
                       for x, y in zip(xs, ys) if math.isfinite(y))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     'stroke-width="1.5"/>')
        parts.append(f'<text x="{WIDTH - PAD}" y="{PAD + 16 * k}" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'font-size="11" fill="{color}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
