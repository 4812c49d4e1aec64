"""Deterministic SVG drawings of circle systems and orbit data.

Every number is printed with fixed decimals and elements are emitted in a
fixed order, so equal inputs give byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .config import CircleSystem
from .document import write_atomic
from .moebius import INF

SIZE = 800
PAD = 0.05
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


@dataclass(frozen=True)
class Viewport:
    x0: float
    y0: float
    x1: float
    y1: float
    size: int = SIZE

    @property
    def scale(self) -> float:
        return self.size / max(self.x1 - self.x0, self.y1 - self.y0)

    def px(self, z: complex) -> tuple[float, float]:
        s = self.scale
        return ((z.real - self.x0) * s, (self.y1 - z.imag) * s)

    def header(self) -> str:
        return (
            f"viewport: x in [{self.x0:.6f}, {self.x1:.6f}], y in [{self.y0:.6f}, {self.y1:.6f}]; "
            f"pixel = ((x - {self.x0:.6f}) * {self.scale:.6f}, ({self.y1:.6f} - y) * {self.scale:.6f})"
        )


def fit_viewport(sys: CircleSystem, points: Sequence = (), size: int = SIZE) -> Viewport:
    """Square box around the base circles and the extra points, padded by 5%."""
    xs, ys = [], []
    for c in sys.circles():
        xs += [c.center.real - c.radius, c.center.real + c.radius]
        ys += [c.center.imag - c.radius, c.center.imag + c.radius]
    for z in points:
        if z is not INF:
            xs.append(z.real)
            ys.append(z.imag)
    if not xs:
        xs, ys = [-1.0, 1.0], [-1.0, 1.0]
    w = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    cx, cy = (max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2
    half = w * (0.5 + PAD)
    return Viewport(cx - half, cy - half, cx + half, cy + half, size)


def render_svg(
    sys: CircleSystem,
    translated: Sequence = (),
    limit: Sequence = (),
    accumulation: Sequence = (),
    path=None,
    size: int = SIZE,
) -> str:
    """Draw base circles with labels, translated circles by depth, limit dots and crosses.

    ``translated`` holds :class:`~schottky.orbit.TranslatedCircle` values.
    Limit samples are drawn as filled paths, not ``circle`` elements, so the
    circle count equals base plus translated circles.
    """
    vp = fit_viewport(sys, accumulation, size)
    s = vp.scale
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- {vp.header()} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        '<g id="base" fill="none" stroke="black" stroke-width="1.5">',
    ]
    labels = []
    for i, p in enumerate(sys.pairs):
        for circ, name in ((p.c, f"C{i + 1}"), (p.c_prime, f"C{i + 1}′")):
            x, y = vp.px(circ.center)
            out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{circ.radius * s:.3f}"/>')
            labels.append(f'<text x="{x:.3f}" y="{y:.3f}" font-size="12" text-anchor="middle">{name}</text>')
    out.append("</g>")
    if translated:
        out.append('<g id="translated" fill="none" stroke-width="0.6">')
        for t in translated:
            x, y = vp.px(t.circle.center)
            color = PALETTE[(t.depth - 1) % len(PALETTE)]
            out.append(
                f'<circle class="depth-{t.depth}" stroke="{color}" cx="{x:.3f}" cy="{y:.3f}" r="{t.circle.radius * s:.3f}"/>'
            )
        out.append("</g>")
    if limit:
        out.append('<g id="limit" fill="black" stroke="none">')
        for z in limit:
            if z is INF:
                continue
            x, y = vp.px(z)
            out.append(f'<path d="M {x - 1.2:.3f} {y:.3f} a 1.2 1.2 0 1 0 2.4 0 a 1.2 1.2 0 1 0 -2.4 0 z"/>')
        out.append("</g>")
    if accumulation:
        out.append('<g id="accumulation" fill="none" stroke="red" stroke-width="1.5">')
        for z in accumulation:
            if z is INF:
                continue
            x, y = vp.px(z)
            out.append(f'<path d="M {x - 5:.3f} {y - 5:.3f} L {x + 5:.3f} {y + 5:.3f} M {x - 5:.3f} {y + 5:.3f} L {x + 5:.3f} {y - 5:.3f}"/>')
        out.append("</g>")
    out.append('<g id="labels" fill="black">')
    out.extend(labels)
    out.append("</g>")
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        write_atomic(path, text)
    return text
