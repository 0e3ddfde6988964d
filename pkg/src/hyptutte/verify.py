"""Certificates that a mapping is an embedded geodesic triangulation.

Embeddedness is certified locally: every face positively oriented and
non-degenerate, corner angles closing up to ``2 pi`` around every vertex, and
the total area equal to ``2 pi |chi|`` (which rules out covering the surface
more than once).  ``paranoid=True`` adds a pairwise overlap test between
faces in the universal cover.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import hyp2
from .fuchsian import enumerate_elements, reduce
from .gmap import GeodesicMapping
from .hyp2 import HPoint
from .simplicial import euler_char
from .weights import DegenerateFace, face_corner_angles

VERTEX_TOL = 1e-9
AREA_TOL = 1e-8
FACE_TOL = 1e-10


def _face_data(m: GeodesicMapping):
    v = m.edge_vectors()
    c = m.complex
    lengths = hyp2.tnorm_at(m.lifts[c.halfedges[:, 0]], v)
    f = c.faces
    hl = np.stack([lengths[c.index_array(f[:, a], f[:, b])]
                   for a, b in ((0, 1), (1, 2), (2, 0))], axis=1)
    degenerate = np.flatnonzero(hl.min(axis=1) <= hyp2.ZERO_TOL)
    return v, degenerate


def orientation_signs(m: GeodesicMapping, v=None) -> np.ndarray:
    """Sign of ``det[v_ij, v_ik, x_i]`` at the first vertex of every face."""
    c = m.complex
    if v is None:
        v = m.edge_vectors()
    f = c.faces
    u = v[c.index_array(f[:, 0], f[:, 1])]
    w = v[c.index_array(f[:, 0], f[:, 2])]
    x = m.lifts[f[:, 0]]
    d = hyp2.tcross(x, u, w)
    scale = hyp2.tnorm_at(x, u) * hyp2.tnorm_at(x, w)
    return np.where(np.abs(d) <= 1e-14 * scale, 0, np.sign(d)).astype(int)


def orientation(m: GeodesicMapping, face) -> int:
    i, j, k = (int(t) for t in face)
    u = hyp2.log_arr(m.lifts[i], m.labels.act(m.complex.index[(i, j)], m.lifts[j]))
    w = hyp2.log_arr(m.lifts[i], m.labels.act(m.complex.index[(i, k)], m.lifts[k]))
    if min(hyp2.tnorm_at(m.lifts[i], u), hyp2.tnorm_at(m.lifts[i], w)) <= hyp2.ZERO_TOL:
        raise DegenerateFace(f"face {face} is degenerate")
    return hyp2.oriented_side(hyp2.TangentVec(m.point(i), u), hyp2.TangentVec(m.point(i), w))


def vertex_angle_sums(m: GeodesicMapping, angles=None) -> np.ndarray:
    """``|sum of corner angles at i - 2 pi|`` per vertex."""
    if angles is None:
        angles = face_corner_angles(m)
    if np.any(np.isnan(angles)):
        raise DegenerateFace("mapping has degenerate faces")
    total = np.bincount(m.complex.faces.reshape(-1), weights=angles.reshape(-1),
                        minlength=m.complex.n)
    return np.abs(total - 2.0 * math.pi)


def face_areas(m: GeodesicMapping) -> np.ndarray:
    p = m.face_points()
    return hyp2.triangle_area_arr(p[:, 0], p[:, 1], p[:, 2])


def gauss_bonnet(m: GeodesicMapping, angles=None):
    """Per-face ``|angle sum + area - pi|`` and ``|total area - 2 pi |chi||``.

    Areas come from two sides and the included angle at the first corner,
    so the angles at the other two corners are checked independently.
    """
    if angles is None:
        angles = face_corner_angles(m)
    if np.any(np.isnan(angles)):
        raise DegenerateFace("mapping has degenerate faces")
    areas = face_areas(m)
    per_face = np.abs(angles.sum(axis=1) + areas - math.pi)
    target = 2.0 * math.pi * abs(euler_char(m.complex))
    return per_face, abs(float(areas.sum()) - target)


@dataclass
class EmbeddingReport:
    orientation: np.ndarray
    face_residuals: np.ndarray
    vertex_residuals: np.ndarray
    area_residual: float
    degenerate: list = field(default_factory=list)
    overlaps: list | None = None

    @property
    def flipped(self) -> list[int]:
        return [int(t) for t in np.flatnonzero(self.orientation <= 0)]

    @property
    def passed(self) -> bool:
        return (not self.degenerate and not self.flipped
                and float(np.max(self.vertex_residuals, initial=0.0)) < VERTEX_TOL
                and float(np.max(self.face_residuals, initial=0.0)) < FACE_TOL
                and self.area_residual < AREA_TOL
                and not self.overlaps)

    def to_text(self) -> str:
        def fmt(x):
            return f"{float(x):.3e}"

        lines = [
            f"verdict: {'pass' if self.passed else 'fail'}",
            f"faces: {len(self.orientation)}",
            f"positive_faces: {int(np.sum(self.orientation > 0))}",
            f"flipped_faces: {' '.join(map(str, self.flipped)) or 'none'}",
            f"degenerate_faces: {' '.join(map(str, self.degenerate)) or 'none'}",
            f"max_vertex_angle_residual: {fmt(np.max(self.vertex_residuals, initial=0.0))}",
            f"max_face_gauss_bonnet_residual: {fmt(np.max(self.face_residuals, initial=0.0))}",
            f"total_area_residual: {fmt(self.area_residual)}",
        ]
        if self.overlaps is not None:
            lines.append(f"overlapping_pairs: {len(self.overlaps)}")
        return "\n".join(lines) + "\n"


def embedding_report(m: GeodesicMapping, paranoid: bool = False) -> EmbeddingReport:
    v, degenerate = _face_data(m)
    signs = orientation_signs(m, v)
    nf = len(m.complex.faces)
    if len(degenerate):
        signs = signs.copy()
        signs[degenerate] = 0
        nan = np.full(nf, np.nan)
        return EmbeddingReport(signs, nan, np.full(m.complex.n, np.nan), float("nan"),
                               [int(t) for t in degenerate])
    angles = face_corner_angles(m, v)
    face_res, area_res = gauss_bonnet(m, angles)
    report = EmbeddingReport(signs, face_res, vertex_angle_sums(m, angles), area_res, [])
    if paranoid:
        report.overlaps = overlapping_faces(m)
    return report


# ---------------------------------------------------------------------------
# pairwise overlap in the universal cover
# ---------------------------------------------------------------------------

def _sat_overlap(t0, tris, tol):
    """Whether triangle ``t0`` (3, 2) overlaps each of ``tris`` (N, 3, 2) in its interior.

    Separating-axis test over the six edge normals; intervals touching within
    ``tol`` count as separated, so triangles sharing an edge or vertex pass.
    """
    def normals(t):
        e = np.roll(t, -1, axis=-2) - t
        return np.stack([-e[..., 1], e[..., 0]], axis=-1)

    n0 = np.broadcast_to(normals(t0), tris.shape)
    axes = np.concatenate([n0, normals(tris)], axis=-2)       # (N, 6, 2)
    axes = axes / np.linalg.norm(axes, axis=-1, keepdims=True)
    p0 = np.einsum("nak,vk->nav", axes, t0)                  # (N, 6, 3)
    p1 = np.einsum("nak,nvk->nav", axes, tris)
    gap = np.minimum(p0.max(-1) - p1.min(-1), p1.max(-1) - p0.min(-1))
    return np.all(gap > tol, axis=-1)


def overlapping_faces(m: GeodesicMapping, word_len: int = 2, tol: float = 1e-9):
    """Pairs of faces whose lifts overlap in the universal cover (O(F^2)).

    Every face is moved so its centroid lies in the fundamental polygon;
    candidate overlaps are then its translates by words of length
    ``<= word_len``.  Triangles are compared in the Klein model centred on
    the first face, where geodesic triangles are straight.
    """
    group = m.group
    pts = m.face_points()                                     # (F, 3, 3)
    nf = len(pts)
    for f in range(nf):
        s = pts[f].sum(axis=0)
        _, g = reduce(group, HPoint(s / math.sqrt(-hyp2.mink(s, s))))
        pts[f] = pts[f] @ g.mat.T
    words = enumerate_elements(group, word_len)
    mats = np.array([group.word_matrix(w) for w in words])
    trans = np.einsum("gab,fvb->gfva", mats, pts).reshape(-1, 3, 3)
    ids = np.tile(np.arange(nf), len(words))
    ident = np.repeat(np.arange(len(words)) == 0, nf)
    cent = trans.sum(axis=1)
    cent /= np.sqrt(-hyp2.mink(cent, cent))[:, None]
    # circumradius bound: every vertex within ``rad`` of its centroid
    rad = hyp2.dist_arr(cent[:, None, :], trans).max()
    cut = math.cosh(2.0 * rad) * (1 + 1e-9)
    pairs = []
    for f in range(nf):
        near = -hyp2.mink(cent[f], cent) <= cut
        near &= ~(ident & (ids == f))
        if not near.any():
            continue
        to_o = hyp2._to_origin(hyp2.project_arr(cent[f]))
        q = trans[near] @ to_o.T
        klein = q[..., :2] / q[..., 2:3]
        k0 = pts[f] @ to_o.T
        k0 = k0[:, :2] / k0[:, 2:3]
        hit = _sat_overlap(k0, klein, tol)
        for other in np.unique(ids[near][hit]):
            pairs.append((f, int(other)))
    return sorted(set(tuple(sorted(p)) for p in pairs))


# ---------------------------------------------------------------------------
# comparison-geometry oracle
# ---------------------------------------------------------------------------

def random_points(rng, n: int, radius: float = 2.5) -> np.ndarray:
    """Points at distance ``<= radius`` from the origin, area-uniform direction."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    th = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.stack([np.sinh(r) * np.cos(th), np.sinh(r) * np.sin(th), np.cosh(r)], axis=-1)


@dataclass
class Cat0Report:
    samples: int
    max_violation_1: float
    max_violation_2: float
    collinear_gap_1: float
    collinear_gap_2: float
    near_degenerate_slack: float

    @property
    def passed(self) -> bool:
        return (self.max_violation_1 <= 1e-12 and self.max_violation_2 <= 1e-12
                and self.collinear_gap_1 <= 1e-11 and self.collinear_gap_2 <= 1e-11
                and self.near_degenerate_slack > 0)


def cat0_gaps(x, y, z):
    """Slack in the two comparison inequalities for triples (broadcast).

    Returns ``d(x,y) - |log(z,x) - log(z,y)|`` and
    ``log(x,y).log(x,z) + log(y,x).log(y,z) - d(x,y)^2``; both are >= 0.
    """
    dxy = hyp2.dist_arr(x, y)
    diff = hyp2.log_arr(z, x) - hyp2.log_arr(z, y)
    g1 = dxy - hyp2.tnorm_at(z, diff)
    g2 = (hyp2.tdot(x, hyp2.log_arr(x, y), hyp2.log_arr(x, z))
          + hyp2.tdot(y, hyp2.log_arr(y, x), hyp2.log_arr(y, z)) - dxy ** 2)
    return g1, g2


def cat0_oracle(samples: int = 10_000, seed: int = 0) -> Cat0Report:
    """Check both comparison inequalities on random and constructed triples.

    Random triples are drawn in a disk of radius 2.5, so pairwise distances
    stay within 5.  The violation is measured relative to ``max(1, d^2)``.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    x, y, z = (random_points(rng, samples) for _ in range(3))
    g1, g2 = cat0_gaps(x, y, z)
    d2 = np.maximum(1.0, hyp2.dist_arr(x, y) ** 2)
    v1 = float(np.max(np.maximum(-g1, 0.0)))
    v2 = float(np.max(np.maximum(-g2 / d2, 0.0)))

    # collinear triples: z on the geodesic through x and y, inside and outside
    t = rng.uniform(-0.5, 1.5, samples)
    lxy = hyp2.log_arr(x, y)
    zc = hyp2.exp_arr(x, t[:, None] * lxy)
    c1, c2 = cat0_gaps(x, y, zc)
    dc = np.maximum(1.0, hyp2.dist_arr(x, y) ** 2)
    gap1 = float(np.max(np.abs(c1)))
    gap2 = float(np.max(np.abs(c2) / dc))

    # z pushed 1e-3 off the geodesic must give strict inequality
    frame = np.cross(x * np.array([1, 1, -1]), lxy * np.array([1, 1, -1]))
    frame = hyp2.to_tangent_arr(x, frame)
    mid = hyp2.exp_arr(x, 0.5 * lxy)
    off = hyp2.transport_arr(x, mid, frame / hyp2.tnorm_at(x, frame)[:, None])
    zn = hyp2.exp_arr(mid, 1e-3 * off)
    n1, n2 = cat0_gaps(x, y, zn)
    slack = float(min(n1.min(), n2.min()))
    return Cat0Report(samples, v1, v2, gap1, gap2, slack)
