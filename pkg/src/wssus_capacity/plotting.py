"""Self-contained SVG rendering of a bound sweep (log-x, linear-y)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH = 720
HEIGHT = 460
MARGIN = dict(left=80, right=150, top=30, bottom=60)

SERIES = (
    ("ub1", "UB1", "#1f77b4"),
    ("ub2", "UB2", "#2ca02c"),
    ("lb", "LB", "#d62728"),
    ("lb_approx", "LB approx", "#ff7f0e"),
)


def _fmt(v):
    return f"{v:.2f}"


def render_svg(bandwidths, series: dict, unit="nat", critical_index=None) -> str:
    """SVG document for ``series`` (name -> values) against ``bandwidths``.

    Values are clipped to ``[0, ymax]`` for display; NaNs are skipped.
    ``critical_index`` marks the bandwidth sample drawn as the critical line.
    """
    W = np.asarray(bandwidths, dtype=float)
    if W.size == 0:
        raise ValueError("cannot plot an empty curve")
    x_lo, x_hi = math.log10(W.min()), math.log10(W.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    finite = [np.asarray(series[name], dtype=float) for name, _, _ in SERIES]
    finite = np.concatenate([v[np.isfinite(v)] for v in finite])
    y_hi = float(finite.max()) * 1.05 if finite.size and finite.max() > 0 else 1.0

    plot_w = WIDTH - MARGIN["left"] - MARGIN["right"]
    plot_h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(w):
        return MARGIN["left"] + (math.log10(w) - x_lo) / (x_hi - x_lo) * plot_w

    def py(v):
        v = min(max(v, 0.0), y_hi)
        return MARGIN["top"] + (1 - v / y_hi) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black"/>',
    ]
    for decade in range(math.ceil(x_lo), math.floor(x_hi) + 1):
        x = _fmt(px(10.0**decade))
        out.append(f'<line class="xtick" x1="{x}" y1="{MARGIN["top"] + plot_h}" x2="{x}" '
                   f'y2="{MARGIN["top"] + plot_h + 5}" stroke="black"/>')
        out.append(f'<text x="{x}" y="{MARGIN["top"] + plot_h + 20}" text-anchor="middle">'
                   f'1e{decade}</text>')
    for k in range(6):
        v = y_hi * k / 5
        y = _fmt(py(v))
        out.append(f'<line class="ytick" x1="{MARGIN["left"] - 5}" y1="{y}" x2="{MARGIN["left"]}" '
                   f'y2="{y}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{y}" text-anchor="end" '
                   f'dominant-baseline="middle">{v:.3g}</text>')
    out.append(f'<text x="{MARGIN["left"] + plot_w / 2:.1f}" y="{HEIGHT - 15}" '
               'text-anchor="middle">bandwidth (Hz)</text>')
    out.append(f'<text x="20" y="{MARGIN["top"] + plot_h / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {MARGIN["top"] + plot_h / 2:.1f})">'
               f'rate ({escape(unit)}/s)</text>')

    if critical_index is not None:
        x = _fmt(px(W[critical_index]))
        out.append(f'<line class="critical" x1="{x}" y1="{MARGIN["top"]}" x2="{x}" '
                   f'y2="{MARGIN["top"] + plot_h}" stroke="gray" stroke-dasharray="4 3"/>')
        out.append(f'<text x="{x}" y="{MARGIN["top"] - 8}" text-anchor="middle">'
                   f'W* = {W[critical_index]:.3g} Hz</text>')

    for name, label, color in SERIES:
        values = np.asarray(series[name], dtype=float)
        pts = " ".join(f"{_fmt(px(w))},{_fmt(py(v))}" for w, v in zip(W, values) if math.isfinite(v))
        out.append(f'<polyline class="{name}" points="{pts}" fill="none" stroke="{color}" '
                   'stroke-width="1.5"/>')

    lx = WIDTH - MARGIN["right"] + 15
    for k, (name, label, color) in enumerate(SERIES):
        y = MARGIN["top"] + 10 + 20 * k
        out.append(f'<rect x="{lx}" y="{y - 5}" width="14" height="3" fill="{color}"/>')
        out.append(f'<text x="{lx + 20}" y="{y}" dominant-baseline="middle">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(curve, path, unit="nat", scale=1.0):
    """Write ``curve`` (a :class:`~wssus_capacity.bounds.BoundCurve`) as SVG to ``path``.

    ``scale`` multiplies every rate, e.g. ``1/log(2)`` for bit/s.
    """
    if len(curve) == 0:
        raise ValueError("cannot plot an empty curve")
    series = {name: curve.column(name) * scale for name, _, _ in SERIES}
    lb = series["lb"]
    critical = int(np.nanargmax(lb)) if np.any(np.isfinite(lb)) else None
    svg = render_svg(curve.column("W"), series, unit, critical)
    with open(path, "w", newline="\n") as fh:
        fh.write(svg)
    return path
