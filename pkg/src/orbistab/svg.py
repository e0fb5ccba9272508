"""Minimal SVG line charts for the command-line pipeline.

Hand-rolled polyline plots: one axes box, linear scales, a few ticks, an
optional legend.  Output is deterministic (fixed float formatting, no
timestamps) so rerunning a command reproduces the file byte for byte.
"""

import numpy as np

WIDTH = 640
HEIGHT = 420
MARGIN_L = 62
MARGIN_R = 18
MARGIN_T = 34
MARGIN_B = 46

PALETTE = [
    ("#1f77b4", ""),  # solid blue
    ("#000000", "8 3 2 3"),  # dash-dot black
    ("#d62728", "6 4"),  # dashed red
    ("#2ca02c", "2 3"),  # dotted green
]


def _f(x):
    return "%.6g" % x


def _span(values):
    lo = min(float(np.min(v)) for v in values)
    hi = max(float(np.max(v)) for v in values)
    if not np.isfinite([lo, hi]).all():
        raise ValueError("chart data must be finite")
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


class _Scale:
    def __init__(self, lo, hi, px0, px1):
        self.lo = lo
        self.hi = hi
        self.px0 = px0
        self.px1 = px1

    def __call__(self, v):
        t = (v - self.lo) / (self.hi - self.lo)
        return self.px0 + t * (self.px1 - self.px0)


def line_chart(series, title="", xlabel="", ylabel=""):
    """Render series [(label, x, y), ...] to an SVG document string."""
    if not series:
        raise ValueError("need at least one series")
    xs = [np.asarray(x, dtype=float) for _, x, _ in series]
    ys = [np.asarray(y, dtype=float) for _, _, y in series]
    x_lo, x_hi = _span(xs)
    y_lo, y_hi = _span(ys)
    sx = _Scale(x_lo, x_hi, MARGIN_L, WIDTH - MARGIN_R)
    sy = _Scale(y_lo, y_hi, HEIGHT - MARGIN_B, MARGIN_T)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" '
        f'width="{WIDTH - MARGIN_L - MARGIN_R}" '
        f'height="{HEIGHT - MARGIN_T - MARGIN_B}" fill="none" '
        f'stroke="#333333" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{WIDTH / 2}" y="{MARGIN_T - 12}" '
            f'text-anchor="middle" font-family="sans-serif" '
            f'font-size="14">{title}</text>'
        )

    for tick in np.linspace(x_lo, x_hi, 5):
        px = sx(tick)
        parts.append(
            f'<line x1="{_f(px)}" y1="{HEIGHT - MARGIN_B}" '
            f'x2="{_f(px)}" y2="{HEIGHT - MARGIN_B + 5}" '
            f'stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_f(px)}" y="{HEIGHT - MARGIN_B + 18}" '
            f'text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{"%.3g" % tick}</text>'
        )
    for tick in np.linspace(y_lo, y_hi, 5):
        py = sy(tick)
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{_f(py)}" '
            f'x2="{MARGIN_L}" y2="{_f(py)}" '
            f'stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{_f(py + 4)}" '
            f'text-anchor="end" font-family="sans-serif" '
            f'font-size="11">{"%.3g" % tick}</text>'
        )
    if xlabel:
        parts.append(
            f'<text x="{(MARGIN_L + WIDTH - MARGIN_R) / 2}" '
            f'y="{HEIGHT - 10}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{xlabel}</text>'
        )
    if ylabel:
        cx, cy = 16, (MARGIN_T + HEIGHT - MARGIN_B) / 2
        parts.append(
            f'<text x="{cx}" y="{cy}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 {cx} {cy})">{ylabel}</text>'
        )

    for k, (label, x, y) in enumerate(series):
        color, dash = PALETTE[k % len(PALETTE)]
        pts = " ".join(
            f"{_f(sx(xv))},{_f(sy(yv))}" for xv, yv in zip(xs[k], ys[k])
        )
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"{dash_attr}/>'
        )

    labeled = [(k, lab) for k, (lab, _, _) in enumerate(series) if lab]
    if labeled:
        ly = MARGIN_T + 14
        for k, label in labeled:
            color, dash = PALETTE[k % len(PALETTE)]
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            lx = WIDTH - MARGIN_R - 150
            parts.append(
                f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 28}" '
                f'y2="{ly - 4}" stroke="{color}" '
                f'stroke-width="1.5"{dash_attr}/>'
            )
            parts.append(
                f'<text x="{lx + 34}" y="{ly}" font-family="sans-serif" '
                f'font-size="11">{label}</text>'
            )
            ly += 16

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_chart(path, series, title="", xlabel="", ylabel=""):
    with open(path, "w") as fh:
        fh.write(line_chart(series, title=title, xlabel=xlabel, ylabel=ylabel))
