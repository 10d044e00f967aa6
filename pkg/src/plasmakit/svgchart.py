"""Minimal self-contained SVG charts (no plotting dependencies).

Supports scatter series and polylines on linear or log axes, with tick
labels and axis titles.  Output is deterministic for identical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = ["Series", "render_chart"]

WIDTH, HEIGHT = 720, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 55
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


@dataclass(frozen=True)
class Series:
    x: tuple[float, ...]
    y: tuple[float, ...]
    label: str = ""
    style: str = "line"  # "line" or "dots"

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ValueError("series x and y lengths differ")
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))


class _Axis:
    def __init__(self, values: Sequence[float], log: bool, lo_px: float, hi_px: float):
        self.log = log
        vals = [v for v in values if not log or v > 0.0]
        if not vals:
            vals = [1.0, 10.0]
        lo, hi = min(vals), max(vals)
        if log:
            lo, hi = math.log10(lo), math.log10(hi)
        if hi - lo < 1e-12:
            lo, hi = lo - 0.5, hi + 0.5
        self.lo, self.hi = lo, hi
        self.lo_px, self.hi_px = lo_px, hi_px

    def to_px(self, v: float) -> float:
        t = math.log10(v) if self.log else v
        frac = (t - self.lo) / (self.hi - self.lo)
        return self.lo_px + frac * (self.hi_px - self.lo_px)

    def ticks(self, count: int = 6) -> list[float]:
        if self.log:
            first, last = math.ceil(self.lo), math.floor(self.hi)
            decades = [10.0 ** d for d in range(first, last + 1)]
            if decades:
                return decades
        step = (self.hi - self.lo) / (count - 1)
        raw = [self.lo + i * step for i in range(count)]
        return [10.0 ** t for t in raw] if self.log else raw


def _fmt(v: float) -> str:
    if v == 0.0:
        return "0"
    a = abs(v)
    if 1e-3 <= a < 1e5:
        s = f"{v:.6g}"
    else:
        s = f"{v:.3e}"
    return s


def render_chart(series: Sequence[Series], *, title: str = "",
                 x_label: str = "", y_label: str = "",
                 x_log: bool = False, y_log: bool = False) -> str:
    """Render series into a standalone SVG document string."""
    xs = [v for s in series for v in s.x]
    ys = [v for s in series for v in s.y]
    ax = _Axis(xs, x_log, MARGIN_L, WIDTH - MARGIN_R)
    ay = _Axis(ys, y_log, HEIGHT - MARGIN_B, MARGIN_T)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" '
                     f'font-size="15">{_esc(title)}</text>')

    # frame and grid
    x0, x1 = MARGIN_L, WIDTH - MARGIN_R
    y0, y1 = HEIGHT - MARGIN_B, MARGIN_T
    for tv in ax.ticks():
        px = ax.to_px(tv)
        parts.append(f'<line x1="{px:.1f}" y1="{y0}" x2="{px:.1f}" y2="{y1}" '
                     f'stroke="#dddddd" stroke-width="1"/>')
        parts.append(f'<text x="{px:.1f}" y="{y0 + 18}" text-anchor="middle">{_fmt(tv)}</text>')
    for tv in ay.ticks():
        py = ay.to_px(tv)
        parts.append(f'<line x1="{x0}" y1="{py:.1f}" x2="{x1}" y2="{py:.1f}" '
                     f'stroke="#dddddd" stroke-width="1"/>')
        parts.append(f'<text x="{x0 - 6}" y="{py + 4:.1f}" text-anchor="end">{_fmt(tv)}</text>')
    parts.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
                 f'fill="none" stroke="#333333"/>')
    if x_label:
        parts.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 12}" '
                     f'text-anchor="middle">{_esc(x_label)}</text>')
    if y_label:
        parts.append(f'<text x="16" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
                     f'transform="rotate(-90 16 {(y0 + y1) / 2:.1f})">{_esc(y_label)}</text>')

    for k, s in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        pts = [(ax.to_px(px), ay.to_px(py)) for px, py in zip(s.x, s.y)
               if (not x_log or px > 0) and (not y_log or py > 0)]
        if s.style == "dots":
            for px, py in pts:
                parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="2.5" fill="{color}"/>')
        else:
            path = " ".join(f"{px:.2f},{py:.2f}" for px, py in pts)
            parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                         f'stroke-width="1.5"/>')
        if s.label:
            ly = MARGIN_T + 16 + 16 * k
            parts.append(f'<rect x="{x1 - 150}" y="{ly - 9}" width="10" height="10" fill="{color}"/>')
            parts.append(f'<text x="{x1 - 135}" y="{ly}">{_esc(s.label)}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))
