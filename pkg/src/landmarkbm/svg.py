"""Deterministic SVG rendering for experiment figures.

Hand-rolled rather than delegated to a plotting library so the byte
output is a pure function of the input series: no timestamps, no
library-version drift, fixed decimal formatting.  Two plot kinds are
supported: log-distance against time, and landmark positions against
time (one panel per ambient coordinate).
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = ["PlotKind", "PlotSpec", "Series", "emit_svg"]

_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

_PANEL_W = 360
_PANEL_H = 300
_MARGIN_L = 54
_MARGIN_R = 14
_MARGIN_T = 34
_MARGIN_B = 40


class PlotKind(Enum):
    LOG_DISTANCE_VS_TIME = "LogDistanceVsTime"
    POSITION_VS_TIME = "PositionVsTime"


@dataclass(frozen=True)
class PlotSpec:
    """Figure-level options.

    ``log_floor`` clips log-distance values at the absorption floor so
    absorbed paths render at the floor instead of diverging.
    """

    kind: PlotKind
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    log_floor: float = 1e-12


@dataclass(frozen=True)
class Series:
    """One polyline: x against y, optionally ending in a stop marker."""

    x: np.ndarray
    y: np.ndarray
    stopped: bool = False
    color_index: int = 0
    label: str = field(default="")


def _nice_ticks(lo, hi, target=5):
    """1-2-5 tick positions covering [lo, hi]; deterministic."""
    if not np.isfinite(lo) or not np.isfinite(hi):
        raise ValueError("cannot place ticks on a non-finite range")
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** np.floor(np.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = np.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _fmt(v):
    return f"{v:.3f}"


def _fmt_tick(v):
    return f"{v:.6g}"


def _render_panel(out, origin_x, subtitle, series_list):
    xs = np.concatenate([np.asarray(s.x, float) for s in series_list])
    ys = np.concatenate([np.asarray(s.y, float) for s in series_list])
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    px0 = origin_x + _MARGIN_L
    px1 = origin_x + _PANEL_W - _MARGIN_R
    py0 = _MARGIN_T
    py1 = _PANEL_H - _MARGIN_B

    def sx(x):
        return px0 + (x - x_lo) / (x_hi - x_lo) * (px1 - px0)

    def sy(y):
        return py1 - (y - y_lo) / (y_hi - y_lo) * (py1 - py0)

    out.append(
        f'<rect x="{_fmt(px0)}" y="{_fmt(py0)}" width="{_fmt(px1 - px0)}" '
        f'height="{_fmt(py1 - py0)}" fill="none" stroke="#333333" stroke-width="1"/>'
    )
    if subtitle:
        out.append(
            f'<text x="{_fmt((px0 + px1) / 2)}" y="{_fmt(py0 - 10)}" '
            f'font-size="13" text-anchor="middle">{subtitle}</text>'
        )
    for t in _nice_ticks(x_lo, x_hi):
        out.append(
            f'<line x1="{_fmt(sx(t))}" y1="{_fmt(py1)}" x2="{_fmt(sx(t))}" '
            f'y2="{_fmt(py1 + 4)}" stroke="#333333" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(sx(t))}" y="{_fmt(py1 + 16)}" font-size="10" '
            f'text-anchor="middle">{_fmt_tick(t)}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        out.append(
            f'<line x1="{_fmt(px0 - 4)}" y1="{_fmt(sy(t))}" x2="{_fmt(px0)}" '
            f'y2="{_fmt(sy(t))}" stroke="#333333" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(px0 - 7)}" y="{_fmt(sy(t) + 3)}" font-size="10" '
            f'text-anchor="end">{_fmt_tick(t)}</text>'
        )
    for s in series_list:
        color = _PALETTE[s.color_index % len(_PALETTE)]
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(s.x, s.y))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1"/>'
        )
        if s.stopped:
            mx, my = sx(float(s.x[-1])), sy(float(s.y[-1]))
            out.append(
                f'<circle cx="{_fmt(mx)}" cy="{_fmt(my)}" r="3" fill="none" '
                f'stroke="#d62728" stroke-width="1.5"/>'
            )


def emit_svg(plot, panels):
    """Render panels of series into a standalone SVG document string.

    ``panels`` is a sequence of ``(subtitle, series_list)`` pairs laid
    out side by side.  Output bytes depend only on the inputs.
    """
    panels = list(panels)
    if not panels or any(len(series) == 0 for _, series in panels):
        raise ValueError("emit_svg requires at least one panel with nonempty series")
    for _, series in panels:
        for s in series:
            if len(s.x) == 0 or len(s.x) != len(s.y):
                raise ValueError("series must be nonempty with matching x/y lengths")
    width = _PANEL_W * len(panels)
    height = _PANEL_H + 18
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="Helvetica,Arial,sans-serif">',
        '<rect width="100%" height="100%" fill="#ffffff"/>',
    ]
    if plot.title:
        out.append(
            f'<text x="{_fmt(width / 2)}" y="{_fmt(height - 6)}" font-size="13" '
            f'text-anchor="middle">{plot.title}</text>'
        )
    for i, (subtitle, series_list) in enumerate(panels):
        _render_panel(out, i * _PANEL_W, subtitle, series_list)
    if plot.x_label:
        out.append(
            f'<text x="{_fmt(width / 2)}" y="{_fmt(_PANEL_H - 6)}" font-size="11" '
            f'text-anchor="middle">{plot.x_label}</text>'
        )
    if plot.y_label:
        out.append(
            f'<text x="12" y="{_fmt(_PANEL_H / 2)}" font-size="11" text-anchor="middle" '
            f'transform="rotate(-90 12 {_fmt(_PANEL_H / 2)})">{plot.y_label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
