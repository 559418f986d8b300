"""Minimal deterministic SVG emission for scatter maps and line series.

All coordinates are formatted with fixed precision and elements are written
in input order, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import warnings
from pathlib import Path
from typing import Mapping, Sequence

WIDTH = 800
HEIGHT = 600
MARGIN = 60

PALETTE = (
    "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377",
    "#bbbbbb", "#332288", "#ddcc77", "#117733", "#882255", "#44aa99",
)

LOW_COLOR = (33, 102, 172)   # cool end of the probability ramp
HIGH_COLOR = (178, 24, 43)   # warm end


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def probability_color(p: float) -> str:
    p = min(max(p, 0.0), 1.0)
    rgb = tuple(
        round(lo + p * (hi - lo)) for lo, hi in zip(LOW_COLOR, HIGH_COLOR)
    )
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def category_color(index: int) -> str:
    return PALETTE[index % len(PALETTE)]


def _scale(values: Sequence[float], out_lo: float, out_hi: float):
    lo, hi = min(values), max(values)
    span = hi - lo if hi > lo else 1.0

    def to_px(v: float) -> float:
        return out_lo + (v - lo) / span * (out_hi - out_lo)

    return to_px, lo, hi


def _document(body: list[str], title: str) -> str:
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="sans-serif">{title}</text>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def _axes() -> list[str]:
    return [
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black" stroke-width="1"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black" stroke-width="1"/>',
    ]


def _legend(entries: Sequence[tuple[str, str]]) -> list[str]:
    body = []
    x = WIDTH - MARGIN - 170
    y = MARGIN + 6
    for i, (label, color) in enumerate(entries):
        cy = y + 18 * i
        body.append(f'<circle cx="{x}" cy="{cy}" r="5" fill="{color}"/>')
        body.append(
            f'<text x="{x + 12}" y="{cy + 4}" font-size="11" '
            f'font-family="sans-serif">{label}</text>'
        )
    return body


def scatter_svg(
    points: Sequence[tuple[float, float]],
    colors: Sequence[str],
    title: str,
    legend: Sequence[tuple[str, str]] = (),
) -> str:
    if not points:
        warnings.warn("scatter with no points")
        body = _axes() + [
            f'<text x="{WIDTH // 2}" y="{HEIGHT // 2}" text-anchor="middle" '
            f'font-size="14" font-family="sans-serif">warning: no data</text>'
        ]
        return _document(body, title)
    sx, *_ = _scale([p[0] for p in points], MARGIN, WIDTH - MARGIN)
    sy, *_ = _scale([p[1] for p in points], HEIGHT - MARGIN, MARGIN)
    body = _axes()
    for (x, y), color in zip(points, colors):
        body.append(
            f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="2" '
            f'fill="{color}" fill-opacity="0.7"/>'
        )
    body += _legend(legend)
    return _document(body, title)


def line_series_svg(
    series: Mapping[str, Sequence[tuple[float, float]]],
    title: str,
    y_label: str = "",
) -> str:
    named = [(name, pts) for name, pts in series.items() if pts]
    if not named:
        warnings.warn("line chart with no series")
        body = _axes() + [
            f'<text x="{WIDTH // 2}" y="{HEIGHT // 2}" text-anchor="middle" '
            f'font-size="14" font-family="sans-serif">warning: no data</text>'
        ]
        return _document(body, title)
    xs = [x for _, pts in named for x, _ in pts]
    ys = [y for _, pts in named for _, y in pts]
    sx, x_lo, x_hi = _scale(xs, MARGIN, WIDTH - MARGIN)
    sy, y_lo, y_hi = _scale(ys, HEIGHT - MARGIN, MARGIN)
    body = _axes()
    for tick, value in (("x", x_lo), ("x", x_hi), ("y", y_lo), ("y", y_hi)):
        if tick == "x":
            body.append(
                f'<text x="{_fmt(sx(value))}" y="{HEIGHT - MARGIN + 16}" '
                f'text-anchor="middle" font-size="10" font-family="sans-serif">{value:g}</text>'
            )
        else:
            body.append(
                f'<text x="{MARGIN - 8}" y="{_fmt(sy(value))}" text-anchor="end" '
                f'font-size="10" font-family="sans-serif">{value:.3g}</text>'
            )
    if y_label:
        body.append(
            f'<text x="16" y="{HEIGHT // 2}" font-size="11" font-family="sans-serif" '
            f'transform="rotate(-90 16 {HEIGHT // 2})" text-anchor="middle">{y_label}</text>'
        )
    legend = []
    for i, (name, pts) in enumerate(named):
        color = category_color(i)
        legend.append((name, color))
        path = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in sorted(pts))
        body.append(
            f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
    body += _legend(legend)
    return _document(body, title)


def write_svg(content: str, path: str | Path) -> None:
    Path(path).write_bytes(content.encode("utf-8"))
