"""Standalone SVG line charts for learning curves.

Output bytes are a pure function of the input series: coordinates are
formatted with a fixed precision, colors come from a fixed palette, and
nothing (timestamps, library versions, float reprs of intermediate
state) leaks into the file.  Matplotlib is deliberately avoided for this
one job -- its SVG output embeds ids and version strings that break
byte-identity across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 20, 30, 46
PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)
BASELINE_COLOR = "#444444"


@dataclass
class Series:
    label: str
    xs: list
    ys: list

    def __post_init__(self):
        self.xs = [float(v) for v in self.xs]
        self.ys = [float(v) for v in self.ys]
        if len(self.xs) != len(self.ys):
            raise ValueError("length mismatch")
        if not self.xs:
            raise ValueError("empty series")


def _fmt(v: float) -> str:
    out = format(float(v), ".6g")
    return "0" if out in ("-0", "-0.0") else out


def _ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi] at a 1/2/2.5/5 step."""
    span = hi - lo
    if span <= 0:
        return [lo]
    step = 10.0 ** math.floor(math.log10(span / target))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if span / (step * mult) <= target:
            step *= mult
            break
    i0 = math.ceil(lo / step - 1e-9)
    i1 = math.floor(hi / step + 1e-9)
    return [i * step for i in range(i0, i1 + 1)]


def emit_plot(
    series: list[Series],
    out_path,
    baseline: float | None = None,
    title: str = "",
    x_label: str = "generation",
    y_label: str = "best cost",
) -> Path:
    """Write a line chart of the series (plus an optional dashed
    horizontal baseline) and return the output path."""
    if not series:
        raise ValueError("no series to plot")
    x_lo = min(min(s.xs) for s in series)
    x_hi = max(max(s.xs) for s in series)
    y_vals = [v for s in series for v in s.ys]
    if baseline is not None:
        y_vals.append(float(baseline))
    y_lo, y_hi = min(y_vals), max(y_vals)
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    pad = 0.05 * (y_hi - y_lo) or 1.0
    y_lo, y_hi = y_lo - pad, y_hi + pad

    px_w = WIDTH - MARGIN_L - MARGIN_R
    px_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * px_w

    def sy(y: float) -> float:
        return HEIGHT - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * px_h

    out: list[str] = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    if title:
        out.append(
            f'<text x="{WIDTH // 2}" y="18" text-anchor="middle" '
            f'font-family="monospace" font-size="13">{escape(title)}</text>'
        )

    axis_y = HEIGHT - MARGIN_B
    out.append(
        f'<path d="M{MARGIN_L} {MARGIN_T} L{MARGIN_L} {axis_y} L{WIDTH - MARGIN_R} {axis_y}" '
        'fill="none" stroke="#000000" stroke-width="1"/>'
    )
    for t in _ticks(x_lo, x_hi):
        px = _fmt(sx(t))
        out.append(
            f'<line x1="{px}" y1="{axis_y}" x2="{px}" y2="{axis_y + 4}" stroke="#000000"/>'
        )
        out.append(
            f'<text x="{px}" y="{axis_y + 16}" text-anchor="middle" '
            f'font-family="monospace" font-size="11">{_fmt(t)}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        py = _fmt(sy(t))
        out.append(
            f'<line x1="{MARGIN_L - 4}" y1="{py}" x2="{MARGIN_L}" y2="{py}" stroke="#000000"/>'
        )
        out.append(
            f'<text x="{MARGIN_L - 7}" y="{py}" text-anchor="end" dominant-baseline="middle" '
            f'font-family="monospace" font-size="11">{_fmt(t)}</text>'
        )
    out.append(
        f'<text x="{MARGIN_L + px_w // 2}" y="{HEIGHT - 10}" text-anchor="middle" '
        f'font-family="monospace" font-size="12">{escape(x_label)}</text>'
    )
    out.append(
        f'<text x="14" y="{MARGIN_T + px_h // 2}" text-anchor="middle" '
        f'font-family="monospace" font-size="12" '
        f'transform="rotate(-90 14 {MARGIN_T + px_h // 2})">{escape(y_label)}</text>'
    )

    if baseline is not None:
        py = _fmt(sy(float(baseline)))
        out.append(
            f'<line x1="{MARGIN_L}" y1="{py}" x2="{WIDTH - MARGIN_R}" y2="{py}" '
            f'stroke="{BASELINE_COLOR}" stroke-width="1" stroke-dasharray="6 4"/>'
        )

    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(s.xs, s.ys))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )

    legend_x = WIDTH - MARGIN_R - 140
    legend_y = MARGIN_T + 10
    entries = [(s.label, PALETTE[i % len(PALETTE)], None) for i, s in enumerate(series)]
    if baseline is not None:
        entries.append(("baseline", BASELINE_COLOR, "6 4"))
    for i, (label, color, dash) in enumerate(entries):
        y = legend_y + 16 * i
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<line x1="{legend_x}" y1="{y}" x2="{legend_x + 22}" y2="{y}" '
            f'stroke="{color}" stroke-width="2"{dash_attr}/>'
        )
        out.append(
            f'<text x="{legend_x + 28}" y="{y + 4}" font-family="monospace" '
            f'font-size="11">{escape(label)}</text>'
        )

    out.append("</svg>")
    path = Path(out_path)
    path.write_bytes("\n".join(out).encode("utf-8") + b"\n")
    return path
