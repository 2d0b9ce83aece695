"""
Self-contained SVG line charts.

Charts are rendered from a jinja2 template with a fixed 800x600 viewBox and
coordinates rounded to two decimals, so the same data always produces the
same bytes.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np
from jinja2 import Environment, PackageLoader, StrictUndefined

from ..constants import SVG_HEIGHT, SVG_WIDTH
from ..errors import ConfigurationError

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")
_MARGIN = {"left": 80, "right": 30, "top": 50, "bottom": 60}

_env = Environment(
    loader=PackageLoader("grbm", "reports/templates"),
    undefined=StrictUndefined,
    autoescape=True,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


@dataclass
class Series:
    """One polyline of a chart."""
    label: str
    x: Sequence[float]
    y: Sequence[float]


def _transform(values: np.ndarray, log: bool) -> np.ndarray:
    if log:
        if np.any(values <= 0):
            raise ConfigurationError("Log-scale axes need positive values")
        return np.log10(values)
    return values


def _ticks(lo: float, hi: float, log: bool, count: int = 5) -> List[float]:
    if log:
        first, last = math.floor(lo), math.ceil(hi)
        if last - first <= 1:
            return [lo, hi]
        step = max(1, (last - first) // count)
        return [float(k) for k in range(first, last + 1, step) if lo <= k <= hi] or [lo, hi]
    return list(np.linspace(lo, hi, count))


def _label(value: float, log: bool) -> str:
    return f"{10 ** value:.3g}" if log else f"{value:.3g}"


def line_chart(
    series: Sequence[Series],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    log_x: bool = False,
    log_y: bool = False,
) -> str:
    """
    Render line series as an SVG document.

    Non-finite points are dropped; log axes require positive data.
    """
    cleaned = []
    for s in series:
        x = np.asarray(s.x, dtype=float)
        y = np.asarray(s.y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        if log_x:
            keep &= x > 0
        if log_y:
            keep &= y > 0
        cleaned.append((s.label, _transform(x[keep], log_x), _transform(y[keep], log_y)))
    all_x = np.concatenate([c[1] for c in cleaned]) if cleaned else np.empty(0)
    all_y = np.concatenate([c[2] for c in cleaned]) if cleaned else np.empty(0)
    if all_x.size == 0:
        all_x, all_y = np.array([0.0, 1.0]), np.array([0.0, 1.0])

    x_lo, x_hi = float(all_x.min()), float(all_x.max())
    y_lo, y_hi = float(all_y.min()), float(all_y.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    plot: Dict[str, float] = {
        "left": _MARGIN["left"],
        "top": _MARGIN["top"],
        "right": SVG_WIDTH - _MARGIN["right"],
        "bottom": SVG_HEIGHT - _MARGIN["bottom"],
    }
    plot["width"] = plot["right"] - plot["left"]
    plot["height"] = plot["bottom"] - plot["top"]

    def px(v: float) -> float:
        return round(plot["left"] + (v - x_lo) / (x_hi - x_lo) * plot["width"], 2)

    def py(v: float) -> float:
        return round(plot["bottom"] - (v - y_lo) / (y_hi - y_lo) * plot["height"], 2)

    rendered = []
    for k, (label, x, y) in enumerate(cleaned):
        points = [(px(a), py(b)) for a, b in zip(x, y)]
        rendered.append({
            "label": label,
            "color": _PALETTE[k % len(_PALETTE)],
            "points": " ".join(f"{a},{b}" for a, b in points),
            "markers": points if len(points) <= 64 else [],
        })

    template = _env.get_template("line_chart.svg.j2")
    return template.render(
        width=SVG_WIDTH,
        height=SVG_HEIGHT,
        title=title,
        x_label=x_label,
        y_label=y_label,
        plot=plot,
        x_ticks=[{"pos": px(t), "label": _label(t, log_x)} for t in _ticks(x_lo, x_hi, log_x)],
        y_ticks=[{"pos": py(t), "label": _label(t, log_y)} for t in _ticks(y_lo, y_hi, log_y)],
        series=rendered,
    )
