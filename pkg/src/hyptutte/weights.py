"""Mean value coordinates, weight interpolation, and morphing.

For an embedded mapping the mean value weight of directed edge ``ij`` is

    w_ij = (tan(alpha_ij / 2) + tan(beta_ij / 2)) / l_ij,

with ``alpha_ij``, ``beta_ij`` the two corner angles at ``i`` on either side of
the edge.  The mapping is balanced for these weights, so solving with them
returns the mapping itself; interpolating between the weights of two
triangulations and solving along the way gives a path of triangulations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import hyp2
from .balance import NoConvergence, SolverConfig, solve, solve_warm
from .gmap import GeodesicMapping, LabelMismatch, Weights

logger = logging.getLogger(__name__)


class DegenerateFace(ValueError):
    pass


class NotEmbedded(ValueError):
    pass


def _corner_edges(c):
    """For each directed edge ``h = (i, j)``, the edges ``(i, k)`` and ``(i, l)``
    to the third vertices of the faces left and right of ``h``."""
    he = c.halfedges
    left = c.index_array(he[:, 0], c.third)
    right = c.index_array(he[:, 0], c.third[c.twin])
    return left, right


def halfedge_angles(m: GeodesicMapping, v=None):
    """Corner angles ``(alpha, beta)`` on both sides of every directed edge.

    ``alpha[h]`` is the signed angle from ``v_ij`` to ``v_ik`` (face left of
    ``h``), ``beta[h]`` the signed angle from ``v_il`` to ``v_ij`` (face right
    of ``h``); both are positive on a positively oriented star.
    """
    c = m.complex
    if v is None:
        v = m.edge_vectors()
    left, right = _corner_edges(c)
    x = m.lifts[c.halfedges[:, 0]]
    alpha = hyp2.signed_angle_arr(x, v, v[left])
    beta = hyp2.signed_angle_arr(x, v[right], v)
    return alpha, beta


def face_corner_angles(m: GeodesicMapping, v=None) -> np.ndarray:
    """Unsigned corner angles, shape ``(F, 3)``, ordered like the face vertices.

    NaN marks a corner with a degenerate edge.
    """
    c = m.complex
    if v is None:
        v = m.edge_vectors()
    f = c.faces
    out = np.empty(f.shape)
    for col, (a, b, d) in enumerate(((0, 1, 2), (1, 2, 0), (2, 0, 1))):
        hb = c.index_array(f[:, a], f[:, b])
        hd = c.index_array(f[:, a], f[:, d])
        out[:, col] = hyp2.angle_arr(m.lifts[f[:, a]], v[hb], v[hd])
    return out


def corner_angles(m: GeodesicMapping, face) -> tuple[float, float, float]:
    i, j, k = (int(t) for t in face)
    c = m.complex
    v = m.edge_vectors()
    out = []
    for a, b, d in ((i, j, k), (j, k, i), (k, i, j)):
        u, w = v[c.index[(a, b)]], v[c.index[(a, d)]]
        x = m.lifts[a]
        if hyp2.tnorm_at(x, u) <= hyp2.ZERO_TOL or hyp2.tnorm_at(x, w) <= hyp2.ZERO_TOL:
            raise DegenerateFace(f"face {face} has a degenerate edge")
        out.append(float(hyp2.angle_arr(m.lifts[a], u, w)))
    return tuple(out)


def mvc(m: GeodesicMapping) -> Weights:
    """Mean value weights of an embedded mapping."""
    v = m.edge_vectors()
    lengths = hyp2.tnorm_at(m.lifts[m.complex.halfedges[:, 0]], v)
    if np.any(lengths <= hyp2.ZERO_TOL):
        raise NotEmbedded("mapping has a degenerate edge")
    alpha, beta = halfedge_angles(m, v)
    if np.any(alpha <= 0) or np.any(beta <= 0):
        raise NotEmbedded("mapping has a flipped or degenerate face")
    w = (np.tan(0.5 * alpha) + np.tan(0.5 * beta)) / lengths
    return Weights(m.complex, w)


def interpolate(w0: Weights, w1: Weights, t: float, log_space: bool = False) -> Weights:
    """Straight line (or, with ``log_space``, geometric) interpolation of weights."""
    if w0.complex != w1.complex:
        raise ValueError("weights live on different complexes")
    if t == 0:
        return w0
    if t == 1:
        return w1
    if log_space:
        vals = np.exp((1.0 - t) * np.log(w0.values) + t * np.log(w1.values))
    else:
        vals = (1.0 - t) * w0.values + t * w1.values
    return Weights(w0.complex, vals)


@dataclass
class MorphPlan:
    m0: GeodesicMapping
    m1: GeodesicMapping
    frames: int = 16
    cfg: SolverConfig = field(default_factory=SolverConfig)
    log_space: bool = False
    warm: bool = True

    def __post_init__(self):
        if self.frames < 2:
            raise ValueError("a morph needs at least two frames")
        if self.m0.labels != self.m1.labels:
            raise LabelMismatch("endpoints are in different homotopy classes")


def morph(plan: MorphPlan, traces: list | None = None) -> list[GeodesicMapping]:
    """Frames ``Phi(interpolate(mvc(m0), mvc(m1), k / (N - 1)))``.

    Each frame is solved from the previous one unless ``plan.warm`` is off,
    in which case every frame starts from ``m0``.  Solver traces are appended
    to ``traces`` when given.
    """
    from .verify import embedding_report

    for end in (plan.m0, plan.m1):
        if not embedding_report(end).passed:
            raise NotEmbedded("morph endpoints must be embedded triangulations")
    w0, w1 = mvc(plan.m0), mvc(plan.m1)
    n = plan.frames
    out = []
    prev = plan.m0
    for k in range(n):
        t = k / (n - 1)
        w = interpolate(w0, w1, t, log_space=plan.log_space)
        start = prev if plan.warm else plan.m0
        try:
            frame, trace = (solve_warm if plan.warm else solve)(start, w, plan.cfg)
        except NoConvergence as exc:
            raise NoConvergence(exc.trace, f"morph frame t={t:.6g}: {exc}") from exc
        logger.info("frame %d/%d t=%.4f %s", k + 1, n, t, trace.summary())
        if traces is not None:
            traces.append(trace)
        out.append(frame)
        prev = frame
    return out
