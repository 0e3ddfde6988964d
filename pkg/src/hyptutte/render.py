"""SVG pictures in the Poincare disk.

Geodesics are drawn as exact circular arcs orthogonal to the unit circle;
a straight segment is used only when the geodesic passes through the center.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hyp2
from .fuchsian import SurfaceGroup, enumerate_elements
from .gmap import GeodesicMapping


@dataclass(frozen=True)
class RenderStyle:
    radius: float = 400.0
    stroke: float = 0.6
    polygon: bool = True
    # draw every translate g(mesh) with d(base, g base) <= translates; None draws only the lift
    translates: float | None = None

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.translates is not None and self.translates < 0:
            raise ValueError("translate distance must be non-negative")


def _num(x: float) -> str:
    return f"{x:.4f}".rstrip("0").rstrip(".")


def geodesic_path(a, b, radius: float = 1.0) -> str:
    """SVG path data for the geodesic between disk points ``a`` and ``b``.

    Output coordinates are scaled by ``radius`` with the y axis flipped, so
    the picture has the usual orientation.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    A = radius * np.array([a[0], -a[1]])
    B = radius * np.array([b[0], -b[1]])
    start = f"M {_num(A[0])} {_num(A[1])}"
    cross = a[0] * b[1] - a[1] * b[0]
    if abs(cross) <= 1e-12 * max(1.0, np.linalg.norm(a) * np.linalg.norm(b)):
        return f"{start} L {_num(B[0])} {_num(B[1])}"
    # center c of the orthogonal circle: a.c = (|a|^2 + 1) / 2, same for b
    rhs = 0.5 * np.array([a @ a + 1.0, b @ b + 1.0])
    c = np.linalg.solve(np.array([a, b]), rhs)
    r = np.sqrt(max(c @ c - 1.0, 0.0)) * radius
    C = radius * np.array([c[0], -c[1]])
    u, v = A - C, B - C
    sweep = 1 if u[0] * v[1] - u[1] * v[0] > 0 else 0
    return f"{start} A {_num(r)} {_num(r)} 0 0 {sweep} {_num(B[0])} {_num(B[1])}"


def _paths(segments, cls, radius, stroke, color):
    out = []
    for a, b in segments:
        d = geodesic_path(hyp2.to_poincare(a), hyp2.to_poincare(b), radius)
        out.append(f'<path class="{cls}" d="{d}" fill="none" stroke="{color}" '
                   f'stroke-width="{_num(stroke)}"/>')
    return out


def polygon_segments(group: SurfaceGroup):
    return [group.side(j) for j in range(len(group.polygon))]


def mapping_segments(m: GeodesicMapping, mats=None):
    """One segment ``(x_i, A_ij x_j)`` per undirected edge, optionally translated."""
    c = m.complex
    he = c.halfedges
    keep = he[:, 0] < he[:, 1]
    tails = m.lifts[he[keep, 0]]
    heads = m.heads()[keep]
    if mats is None:
        mats = [np.eye(3)]
    segs = []
    for g in mats:
        segs.extend(zip(tails @ g.T, heads @ g.T))
    return segs


def _translates(group: SurfaceGroup, dmax: float):
    out = []
    length = 0
    while True:
        length += 1
        words = enumerate_elements(group, length)
        near = [w for w in words
                if hyp2.dist_arr(group.base.coords, group.word_matrix(w) @ group.base.coords)
                <= dmax + 1e-12]
        if len(near) == len(out) or length > 6:
            return [group.word_matrix(w) for w in near]
        out = near


def render_svg(m: GeodesicMapping | None, group: SurfaceGroup | None = None,
               style: RenderStyle | None = None) -> str:
    """SVG 1.1 document for a mapping, the fundamental polygon, or both.

    Mesh edges get ``class="edge"``, polygon sides ``class="polygon"``.
    """
    style = style or RenderStyle()
    if group is None:
        if m is None:
            raise ValueError("nothing to draw")
        group = m.group
    R = style.radius
    size = 2.0 * R + 20.0
    body = [f'<circle cx="0" cy="0" r="{_num(R)}" fill="none" stroke="#888" '
            f'stroke-width="{_num(style.stroke)}"/>']
    if m is not None:
        mats = None if style.translates is None else _translates(group, style.translates)
        body += _paths(mapping_segments(m, mats), "edge", R, style.stroke, "#1f4e9a")
    if style.polygon:
        body += _paths(polygon_segments(group), "polygon", R, 2.0 * style.stroke, "#c0392b")
    half = _num(size / 2.0)
    head = ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_num(size)}" height="{_num(size)}" '
            f'viewBox="-{half} -{half} {_num(size)} {_num(size)}">')
    return "\n".join([head, *("  " + line for line in body), "</svg>"]) + "\n"


def write_svg(path, m: GeodesicMapping | None, group: SurfaceGroup | None = None,
              style: RenderStyle | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(render_svg(m, group, style))
