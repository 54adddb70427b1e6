"""SVG and CSV output of lattice footprints.

Coordinates are millimetres.  The SVG uses screen orientation (y grows
downward, so the top edge of the lattice is at the top of the picture); the
CSV keeps the footprint's own coordinates (y = 0 on the top edge, negative
below).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kinematics import Bias, compressed_cell, lattice_footprint
from .model import GeometryParams, LatticeEncoding
from .validity import has_crossbar

SVG = "svg"
CSV = "csv"


@dataclass(frozen=True)
class RenderSpec:
    theta: float = math.pi / 2
    stroke_mm: float = 0.8
    scale: float = 1.0
    kind: str = SVG

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if not 0 < self.theta < math.pi:
            raise ValueError(f"theta must lie in (0, pi), got {self.theta}")
        if self.kind not in (SVG, CSV):
            raise ValueError(f"unknown output kind {self.kind!r}")

    @classmethod
    def from_compression(cls, geom: GeometryParams, bias: Bias = Bias.BELOW, **kw) -> "RenderSpec":
        return cls(theta=compressed_cell(geom, bias).theta, **kw)


def _num(v: float, digits: int = 4) -> str:
    s = f"{v:.{digits}f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def render_csv(enc: LatticeEncoding, geom: GeometryParams, spec: RenderSpec) -> str:
    pts = lattice_footprint(enc, geom, spec.theta) * spec.scale
    lines = ["row,col,x_mm,y_mm"]
    for r in range(pts.shape[0]):
        for c in range(pts.shape[1]):
            lines.append(f"{r},{c},{_num(pts[r, c, 0], 9)},{_num(pts[r, c, 1], 9)}")
    return "\n".join(lines) + "\n"


def render_svg(enc: LatticeEncoding, geom: GeometryParams, spec: RenderSpec) -> str:
    """One <line> per vertical link and per crossbar, one <circle> per joint."""
    pts = lattice_footprint(enc, geom, spec.theta) * spec.scale
    xs = pts[..., 0]
    ys = -pts[..., 1]  # screen y grows downward
    rows, cols = xs.shape

    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    w, h = x1 - x0, y1 - y0
    pad = 0.05 * max(w, h, spec.stroke_mm)
    vb = (x0 - pad, y0 - pad, w + 2 * pad, h + 2 * pad)
    radius = 1.5 * spec.stroke_mm

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{_num(vb[2])}mm" height="{_num(vb[3])}mm" '
        f'viewBox="{" ".join(_num(v) for v in vb)}">',
        f'<g stroke="black" stroke-width="{_num(spec.stroke_mm)}" stroke-linecap="round">',
    ]
    for c in range(cols):
        for r in range(rows - 1):
            out.append(
                f'<line class="link" x1="{_num(xs[r, c])}" y1="{_num(ys[r, c])}" '
                f'x2="{_num(xs[r + 1, c])}" y2="{_num(ys[r + 1, c])}"/>'
            )
    for c in range(cols - 1):
        for r in range(rows):
            if has_crossbar(r, c):
                out.append(
                    f'<line class="crossbar" x1="{_num(xs[r, c])}" y1="{_num(ys[r, c])}" '
                    f'x2="{_num(xs[r, c + 1])}" y2="{_num(ys[r, c + 1])}"/>'
                )
    out.append("</g>")
    out.append('<g fill="white" stroke="black">')
    for r in range(rows):
        for c in range(cols):
            out.append(f'<circle class="joint" cx="{_num(xs[r, c])}" cy="{_num(ys[r, c])}" r="{_num(radius)}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(enc: LatticeEncoding, geom: GeometryParams, spec: RenderSpec) -> str:
    return render_svg(enc, geom, spec) if spec.kind == SVG else render_csv(enc, geom, spec)


def footprint_table(enc: LatticeEncoding, geom: GeometryParams, theta: float) -> np.ndarray:
    """Rows of (row, col, x, y), the numeric content of the CSV."""
    pts = lattice_footprint(enc, geom, theta)
    r, c = np.meshgrid(np.arange(pts.shape[0]), np.arange(pts.shape[1]), indexing="ij")
    return np.column_stack([r.ravel(), c.ravel(), pts[..., 0].ravel(), pts[..., 1].ravel()])
