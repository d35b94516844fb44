"""Deterministic SVG 1.1 rendering of portrait and region documents.

Colours follow the usual convention for these plots: blue streamlines,
green dotted infinity-isocline, red dotted 0-isocline, red centers and
green saddles. Coordinates are printed with a fixed number of decimals so
the same document always yields the same bytes.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .document import PortraitDocument

__all__ = ["render_svg", "render_region_svg"]

WIDTH, HEIGHT = 900, 450
MARGIN = 40
_COLORS = {"center": "#d62728", "saddle": "#2ca02c", "degenerate": "#000000"}
# a short perceptual ramp for the speed underlay (dark blue -> yellow)
_RAMP = ((0.0, (68, 1, 84)), (0.25, (59, 82, 139)), (0.5, (33, 145, 140)), (0.75, (94, 201, 98)), (1.0, (253, 231, 37)))


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


class _Frame:
    def __init__(self, window, width=WIDTH, height=HEIGHT):
        self.x0, self.x1, self.y0, self.y1 = window
        self.w, self.h = width, height

    def px(self, x):
        return MARGIN + (x - self.x0) / (self.x1 - self.x0) * self.w

    def py(self, y):
        return MARGIN + (self.y1 - y) / (self.y1 - self.y0) * self.h

    def path(self, pts) -> str:
        return " ".join(f"{_fmt(self.px(x))},{_fmt(self.py(y))}" for x, y in pts)


def _ramp(t: float) -> str:
    t = min(1.0, max(0.0, t))
    for (t0, c0), (t1, c1) in zip(_RAMP, _RAMP[1:]):
        if t <= t1:
            s = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
            r, g, b = (round(a + s * (b_ - a)) for a, b_ in zip(c0, c1))
            return f"#{r:02x}{g:02x}{b:02x}"
    r, g, b = _RAMP[-1][1]
    return f"#{r:02x}{g:02x}{b:02x}"


def _display_x(x: float) -> list[float]:
    """Map a period coordinate in [0, 2 pi) into [-pi, pi]; x = pi shows at both ends."""
    if abs(x - math.pi) < 1e-12:
        return [-math.pi, math.pi]
    return [x - 2.0 * math.pi if x > math.pi else x]


def _header(width, height, title):
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]


def render_svg(doc: PortraitDocument) -> str:
    fr = _Frame(doc.window)
    w = doc.wave
    title = f"{w['class']} alpha0={w['alpha0']!r} lambda={w['lambda']!r} epsilon={w['epsilon']!r}"
    out = _header(WIDTH + 2 * MARGIN, HEIGHT + 2 * MARGIN, title)

    if doc.heatmap:
        vals = doc.heatmap["values"]
        ny, nx = doc.heatmap["ny"], doc.heatmap["nx"]
        vmax = max(max(row) for row in vals) or 1.0
        cw, ch = fr.w / nx, fr.h / ny
        out.append('<g id="speed" stroke="none">')
        for j in range(ny):
            for i in range(nx):
                # row j sits at y index j, drawn from the top of the frame down
                top = MARGIN + (ny - 1 - j) * ch
                out.append(
                    f'<rect x="{_fmt(MARGIN + i * cw)}" y="{_fmt(top)}" width="{_fmt(cw)}" '
                    f'height="{_fmt(ch)}" fill="{_ramp(vals[j][i] / vmax)}"/>'
                )
        out.append("</g>")

    out.append('<g id="streamlines" fill="none" stroke="#1f77b4" stroke-width="0.8">')
    for s in doc.streamlines:
        out.append(f'<polyline points="{fr.path(s["points"])}"/>')
    for s in doc.integrated:
        out.append(f'<polyline points="{fr.path(s["points"])}" stroke-width="1.2"/>')
    out.append("</g>")

    out.append('<g id="isoclines" fill="none" stroke-width="1.2" stroke-dasharray="2,3">')
    for iso in doc.isoclines:
        color = "#2ca02c" if iso["kind"] == "infinity_isocline" else "#d62728"
        out.append(f'<polyline class="{iso["kind"]}" stroke="{color}" points="{fr.path(iso["points"])}"/>')
    out.append("</g>")

    # bed and linearized free surface
    eta = w.get("surface_coefficient")
    xs = [fr.x0 + (fr.x1 - fr.x0) * k / 128 for k in range(129)]
    surf = [(x, 1.0 + (w["epsilon"] * eta * math.cos(x) if eta is not None else 0.0)) for x in xs]
    out.append('<g id="boundary" fill="none" stroke="#000000" stroke-width="1.5">')
    out.append(f'<polyline points="{fr.path([(fr.x0, 0.0), (fr.x1, 0.0)])}"/>')
    out.append(f'<polyline points="{fr.path(surf)}"/>')
    out.append("</g>")

    out.append('<g id="critical_points" stroke="none">')
    for c in doc.critical_points:
        for x in _display_x(c["x"]):
            out.append(
                f'<circle class="{c["kind"]}" cx="{_fmt(fr.px(x))}" cy="{_fmt(fr.py(c["y"]))}" r="4" '
                f'fill="{_COLORS.get(c["kind"], "#000000")}"/>'
            )
    out.append("</g>")

    out.append(
        f'<text x="{MARGIN}" y="{MARGIN - 12}" font-family="sans-serif" font-size="13">{escape(title)}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_region_svg(bands, alpha_range=None) -> str:
    """Shaded (alpha0, Y0) region; multi-zero columns are drawn lighter."""
    if alpha_range is None:
        al = [b.alpha0 for b in bands] or [0.0, 1.0]
        alpha_range = (min(al), max(al))
    a0, a1 = alpha_range
    if a0 == a1:
        a0, a1 = a0 - 0.5, a1 + 0.5
    fr = _Frame((a0, a1, 0.0, 1.0), WIDTH, HEIGHT)
    alphas = sorted({b.alpha0 for b in bands})
    half = 0.5 * (a1 - a0) / max(1, len(alphas) - 1)
    out = _header(WIDTH + 2 * MARGIN, HEIGHT + 2 * MARGIN, "stagnation levels Y0 versus alpha0")
    out.append('<g id="region" stroke="none">')
    for b in bands:
        left = max(a0, b.alpha0 - half)
        right = min(a1, b.alpha0 + half)
        x, y = fr.px(left), fr.py(b.y0_max)
        fill = "#9ecae1" if b.multi_zero else "#3182bd"
        out.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(fr.px(right) - x)}" '
            f'height="{_fmt(fr.py(b.y0_min) - y)}" fill="{fill}"/>'
        )
    out.append("</g>")
    out.append(
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH}" height="{HEIGHT}" fill="none" stroke="#000000"/>'
    )
    out.append(
        f'<text x="{MARGIN}" y="{MARGIN + HEIGHT + 28}" font-family="sans-serif" font-size="13">'
        f"alpha0 from {_fmt(a0)} to {_fmt(a1)}; vertical axis Y0 in [0, 1]</text>"
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
