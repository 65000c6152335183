"""Self-contained SVG rendering of output bounds against a threshold band.

The chart mirrors the verifier's observables: a red filled region between
the reachable output bounds, a blue filled region for the permissible
band, the reference signal as a black polyline, and a marker on every
violating time instance. Output is deterministic byte-for-byte: fixed
canvas, fixed 6-decimal coordinates, no timestamps.
"""

from __future__ import annotations

from ._exceptions import DimensionError
from ._metrics import ThresholdBand, _band_exceedances
from ._star import Bounds

_WIDTH = 960
_HEIGHT = 480
_MARGIN_LEFT = 70
_MARGIN_RIGHT = 24
_MARGIN_TOP = 42
_MARGIN_BOTTOM = 52

_BAND_COLOR = "#1f77b4"
_BOUNDS_COLOR = "#d62728"
_REFERENCE_COLOR = "#000000"


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def render_bounds_svg(bounds: Bounds, band: ThresholdBand, reference=None,
                      title: str = "output bounds vs permissible band") -> str:
    if bounds.dim != band.dim:
        raise DimensionError("bounds", f"bounds have {bounds.dim} instances, band has {band.dim}")
    reference = band.reference if reference is None else reference
    n = band.dim

    series = [bounds.lower, bounds.upper, band.band_lower, band.band_upper, reference]
    y_min = min(float(s.min()) for s in series)
    y_max = max(float(s.max()) for s in series)
    pad = 0.05 * (y_max - y_min or 1.0)
    y_min -= pad
    y_max += pad

    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def x_px(i: int) -> float:
        if n == 1:
            return _MARGIN_LEFT + plot_w / 2
        return _MARGIN_LEFT + plot_w * i / (n - 1)

    def y_px(v: float) -> float:
        return _MARGIN_TOP + plot_h * (y_max - v) / (y_max - y_min)

    def polyline(values) -> str:
        return " ".join(f"{_fmt(x_px(i))},{_fmt(y_px(v))}" for i, v in enumerate(values))

    def region(lower, upper) -> str:
        top = [f"{_fmt(x_px(i))},{_fmt(y_px(v))}" for i, v in enumerate(upper)]
        bottom = [
            f"{_fmt(x_px(i))},{_fmt(y_px(v))}"
            for i, v in zip(range(n - 1, -1, -1), lower[::-1])
        ]
        return " ".join(top + bottom)

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">'
    )
    out.append('<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>')
    out.append(
        f'<text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="monospace">{_escape(title)}</text>'
    )

    # Axes and ticks.
    x0, x1 = _MARGIN_LEFT, _WIDTH - _MARGIN_RIGHT
    y0, y1 = _MARGIN_TOP, _HEIGHT - _MARGIN_BOTTOM
    out.append(f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="#000" stroke-width="1"/>')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#000" stroke-width="1"/>')
    for t in range(5):
        v = y_min + (y_max - y_min) * t / 4
        yy = y_px(v)
        out.append(
            f'<line x1="{x0 - 4}" y1="{_fmt(yy)}" x2="{x0}" y2="{_fmt(yy)}" stroke="#000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{x0 - 8}" y="{_fmt(yy + 4)}" text-anchor="end" font-size="11" '
            f'font-family="monospace">{v:.4f}</text>'
        )
    x_tick_step = max(1, (n - 1) // 10 or 1)
    for i in range(0, n, x_tick_step):
        xx = x_px(i)
        out.append(
            f'<line x1="{_fmt(xx)}" y1="{y1}" x2="{_fmt(xx)}" y2="{y1 + 4}" stroke="#000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(xx)}" y="{y1 + 18}" text-anchor="middle" font-size="11" '
            f'font-family="monospace">{i}</text>'
        )

    # Permissible band (blue) under the reachable bounds (red).
    out.append(
        f'<polygon points="{region(band.band_lower, band.band_upper)}" '
        f'fill="{_BAND_COLOR}" fill-opacity="0.25" stroke="none"/>'
    )
    out.append(
        f'<polyline points="{polyline(band.band_lower)}" fill="none" '
        f'stroke="{_BAND_COLOR}" stroke-width="1.2"/>'
    )
    out.append(
        f'<polyline points="{polyline(band.band_upper)}" fill="none" '
        f'stroke="{_BAND_COLOR}" stroke-width="1.2"/>'
    )
    out.append(
        f'<polygon points="{region(bounds.lower, bounds.upper)}" '
        f'fill="{_BOUNDS_COLOR}" fill-opacity="0.30" stroke="none"/>'
    )
    out.append(
        f'<polyline points="{polyline(bounds.lower)}" fill="none" '
        f'stroke="{_BOUNDS_COLOR}" stroke-width="1.2"/>'
    )
    out.append(
        f'<polyline points="{polyline(bounds.upper)}" fill="none" '
        f'stroke="{_BOUNDS_COLOR}" stroke-width="1.2"/>'
    )
    out.append(
        f'<polyline points="{polyline(reference)}" fill="none" '
        f'stroke="{_REFERENCE_COLOR}" stroke-width="1.0" stroke-dasharray="4,3"/>'
    )

    # Violation markers on the offending bound.
    exceedances = _band_exceedances(bounds, band)
    for i in range(n):
        if exceedances[i] == 0.0:
            continue
        below = band.band_lower[i] - bounds.lower[i]
        above = bounds.upper[i] - band.band_upper[i]
        value = bounds.lower[i] if below >= above else bounds.upper[i]
        cx, cy = x_px(i), y_px(float(value))
        out.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="4" fill="none" '
            f'stroke="{_BOUNDS_COLOR}" stroke-width="1.5" class="violation" '
            f'data-index="{i}"/>'
        )

    # Legend.
    lx = x0 + 10
    for label, color, offset in (
        ("output bounds", _BOUNDS_COLOR, 0),
        ("permissible band", _BAND_COLOR, 18),
        ("reference", _REFERENCE_COLOR, 36),
    ):
        out.append(
            f'<rect x="{lx}" y="{y0 + offset}" width="14" height="10" fill="{color}" '
            f'fill-opacity="0.5"/>'
        )
        out.append(
            f'<text x="{lx + 20}" y="{y0 + offset + 9}" font-size="11" '
            f'font-family="monospace">{label}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_plot(bounds: Bounds, band: ThresholdBand, reference, path,
               title: str = "output bounds vs permissible band") -> None:
    from .io import _atomic_write_text

    _atomic_write_text(path, render_bounds_svg(bounds, band, reference, title))
