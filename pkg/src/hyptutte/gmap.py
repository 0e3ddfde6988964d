"""Geodesic mappings of a triangulated surface into its quotient.

A mapping is stored the way the universal cover parametrises it: a lift
``x_i`` of every vertex plus a deck transformation ``A_ij`` on every directed
edge, so that edge ``ij`` is the projection of the geodesic from ``x_i`` to
``A_ij x_j``.  All per-edge arrays are aligned with
``Complex.halfedges`` (directed edges sorted by tail, then head).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import hyp2
from .fuchsian import SurfaceGroup, reduce, word_inv, word_mul
from .hyp2 import HPoint, Isometry, TangentVec

if TYPE_CHECKING:
    from .simplicial import Complex


class LabelMismatch(ValueError):
    """Two mappings carry different deck labels (different homotopy data)."""


class DegenerateEdge(ValueError):
    pass


# ---------------------------------------------------------------------------
# labels
# ---------------------------------------------------------------------------

class DeckLabels:
    """Deck transformation per directed edge; words are authoritative, matrices derived."""

    def __init__(self, group: SurfaceGroup, complex: Complex, words):
        words = [word_mul(w) for w in words]
        if len(words) != len(complex.halfedges):
            raise ValueError("need one label word per directed edge")
        self.group = group
        self.complex = complex
        self.words = tuple(words)
        mats = np.array([group.word_matrix(w) for w in words]).reshape(-1, 3, 3)
        mats.flags.writeable = False
        self.mats = mats
        lo = np.array([group.word_matrix_lo(w) for w in words]).reshape(-1, 3, 3)
        lo.flags.writeable = False
        self.mats_lo = lo
        self.identity = np.array([w == "" for w in words], dtype=bool)

    def act(self, h, x) -> np.ndarray:
        """``A_h x`` for directed edge indices ``h``, back on the sheet.

        The point is taken as determined by its spatial part, with the time
        coordinate carried to double length; together with the double-length
        label matrices (:func:`hyp2.matvec_dd`) the image is then as accurate
        as its own coordinates allow, however far the lift.
        """
        ident = self.identity[h]
        if np.ndim(ident) == 0:
            return np.array(x, dtype=float) if ident else _act(self.mats[h], self.mats_lo[h], x)
        out = np.array(x, dtype=float)
        move = ~ident
        idx = np.arange(len(self.identity))[h][move]
        out[move] = _act(self.mats[idx], self.mats_lo[idx], out[move])
        return out

    def __getitem__(self, edge) -> Isometry:
        h = self.complex.index[tuple(edge)]
        return Isometry(self.mats[h], word=self.words[h])

    def word(self, i: int, j: int) -> str:
        return self.words[self.complex.index[(i, j)]]

    def __eq__(self, other):
        return isinstance(other, DeckLabels) and self.words == other.words

    def __hash__(self):
        return hash(self.words)

    def replace(self, updates: dict) -> DeckLabels:
        """Copy with some directed edges relabelled: ``{(i, j): word}``."""
        words = list(self.words)
        for (i, j), w in updates.items():
            words[self.complex.index[(i, j)]] = w
        return DeckLabels(self.group, self.complex, words)


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

class Weights:
    """A positive value per directed edge, aligned with ``complex.halfedges``."""

    def __init__(self, complex: Complex, values):
        values = np.array(values, dtype=float).reshape(-1)
        if values.shape != (len(complex.halfedges),):
            raise ValueError("need one weight per directed edge")
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise ValueError("weights must be positive")
        values.flags.writeable = False
        self.complex = complex
        self.values = values

    @classmethod
    def uniform(cls, complex: Complex, value: float = 1.0) -> Weights:
        return cls(complex, np.full(len(complex.halfedges), float(value)))

    @classmethod
    def random(cls, complex: Complex, lam: float, rng) -> Weights:
        """Log-uniform weights in ``[1, lam]``."""
        v = np.exp(rng.uniform(0.0, np.log(lam), len(complex.halfedges)))
        return cls(complex, v)

    def __getitem__(self, edge) -> float:
        return float(self.values[self.complex.index[tuple(edge)]])

    def __mul__(self, c: float) -> Weights:
        return Weights(self.complex, c * self.values)

    __rmul__ = __mul__

    def __add__(self, other: Weights) -> Weights:
        return Weights(self.complex, self.values + other.values)

    @property
    def condition(self) -> float:
        """``max w / min w``."""
        return float(self.values.max() / self.values.min())

    def vertex_totals(self) -> np.ndarray:
        """``W_i``, the sum of outgoing weights at each vertex."""
        return np.add.reduceat(self.values, self.complex.out_start)

    def symmetrized(self) -> np.ndarray:
        return 0.5 * (self.values + self.values[self.complex.twin])


# ---------------------------------------------------------------------------
# mappings
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GeodesicMapping:
    complex: Complex
    labels: DeckLabels
    lifts: np.ndarray

    def __post_init__(self):
        x = hyp2.project_arr(np.asarray(self.lifts, dtype=float).reshape(-1, 3))
        if x.shape[0] != self.complex.n:
            raise ValueError("need one lift per vertex")
        x.flags.writeable = False
        object.__setattr__(self, "lifts", x)

    @property
    def group(self) -> SurfaceGroup:
        return self.labels.group

    def with_lifts(self, lifts) -> GeodesicMapping:
        return GeodesicMapping(self.complex, self.labels, lifts)

    def point(self, i: int) -> HPoint:
        return HPoint(self.lifts[i])

    def heads(self) -> np.ndarray:
        """``A_ij x_j`` for every directed edge, re-projected onto the sheet."""
        he = self.complex.halfedges
        return self.labels.act(slice(None), self.lifts[he[:, 1]])

    def edge_vectors(self) -> np.ndarray:
        """``log(x_i, A_ij x_j)`` per directed edge, shape ``(H, 3)``."""
        tails = self.lifts[self.complex.halfedges[:, 0]]
        return hyp2.log_arr(tails, self.heads())

    def lengths(self) -> np.ndarray:
        tails = self.lifts[self.complex.halfedges[:, 0]]
        return hyp2.dist_arr(tails, self.heads())

    def residues(self, w: Weights) -> np.ndarray:
        """Residue vector at every vertex, shape ``(n, 3)``."""
        v = self.edge_vectors()
        return np.add.reduceat(w.values[:, None] * v, self.complex.out_start, axis=0)

    def face_points(self) -> np.ndarray:
        """Each face lifted in the frame of its first vertex, shape ``(F, 3, 3)``."""
        c = self.complex
        f = c.faces
        ij = c.index_array(f[:, 0], f[:, 1])
        ik = c.index_array(f[:, 0], f[:, 2])
        a = self.lifts[f[:, 0]]
        b = self.labels.act(ij, self.lifts[f[:, 1]])
        d = self.labels.act(ik, self.lifts[f[:, 2]])
        return np.stack([a, b, d], axis=1)


def edge_vector(m: GeodesicMapping, edge) -> TangentVec:
    i, j = edge
    h = m.complex.index[(i, j)]
    y = m.labels.act(h, m.lifts[j])
    return TangentVec(m.point(i), hyp2.log_arr(m.lifts[i], y))


def residue(m: GeodesicMapping, w: Weights, i: int) -> TangentVec:
    c = m.complex
    lo, hi = c.out_start[i], c.out_end[i]
    he = c.halfedges[lo:hi]
    y = m.labels.act(slice(lo, hi), m.lifts[he[:, 1]])
    v = hyp2.log_arr(m.lifts[i], y)
    return TangentVec(m.point(i), (w.values[lo:hi, None] * v).sum(axis=0))


def normalized_residual(m: GeodesicMapping, w: Weights) -> float:
    """``max_i |r_i| / W_i``."""
    r = m.residues(w)
    return float(np.max(hyp2.tnorm_at(m.lifts, r) / w.vertex_totals()))


def energy(m: GeodesicMapping, w: Weights) -> float:
    """Discrete Dirichlet energy with the symmetrised weights.

    Each undirected edge is counted once: the sum over directed edges is
    halved.
    """
    l2 = m.lengths() ** 2
    return float(0.25 * np.sum(w.symmetrized() * l2))


def _act(hi, lo, x):
    x = np.asarray(x, dtype=float)
    xlo = np.zeros_like(x)
    xlo[..., 2] = hyp2.time_lo(x)
    return hyp2.project_arr(hyp2.matvec_dd(hi, lo, x, xlo))


def gauge(m: GeodesicMapping, i: int, b) -> GeodesicMapping:
    """Replace the lift of vertex ``i`` by ``B x_i`` with compensating labels.

    ``b`` is a generator word or an :class:`Isometry` carrying one.
    """
    word = b.word if isinstance(b, Isometry) else b
    if word is None:
        raise ValueError("gauge needs a deck element given by a word")
    word = word_mul(word)
    if word == "":
        return m
    updates = {}
    for j in m.complex.neighbors(i):
        updates[(i, j)] = word_mul(word, m.labels.word(i, j))
        updates[(j, i)] = word_mul(m.labels.word(j, i), word_inv(word))
    lifts = np.array(m.lifts)
    lifts[i] = _act(m.group.word_matrix(word), m.group.word_matrix_lo(word), lifts[i])
    return GeodesicMapping(m.complex, m.labels.replace(updates), lifts)


def normalize(m: GeodesicMapping, vertex: int = 0) -> GeodesicMapping:
    """Gauge ``vertex`` into the fundamental polygon."""
    _, g = reduce(m.group, m.point(vertex))
    return gauge(m, vertex, g.word)


def distance_X(m1: GeodesicMapping, m2: GeodesicMapping) -> float:
    """Sup distance between two mappings with identical labels.

    The distance between two geodesics is convex in the parameter, so the
    sup over every edge is attained at an endpoint.
    """
    if m1.labels != m2.labels:
        raise LabelMismatch("mappings have different deck labels")
    return float(np.max(hyp2.dist_arr(m1.lifts, m2.lifts)))


def _dd_minus_identity(hi, lo) -> np.ndarray:
    return np.abs((hi - np.eye(3)) + lo).max(axis=(-2, -1))


def check_involution(m) -> np.ndarray:
    """``max |A_ji A_ij - I|`` per directed edge, in double length.

    Labels are applied as ``mats + mats_lo``, so the products are formed the
    same way.  A plain float product of labels with entries near ``10^3``
    rounds at about ``1e-10`` and would measure the arithmetic, not the labels.
    """
    labels = m.labels if isinstance(m, GeodesicMapping) else m
    t = labels.complex.twin
    return _dd_minus_identity(*hyp2.matmul_dd(labels.mats[t], labels.mats_lo[t],
                                              labels.mats, labels.mats_lo))


def check_cocycle(m) -> np.ndarray:
    """``max |A_ij A_jk A_ki - I|`` per face, in double length (see :func:`check_involution`)."""
    labels = m.labels if isinstance(m, GeodesicMapping) else m
    c = labels.complex
    f = c.faces
    hi, lo = labels.mats, labels.mats_lo
    ij, jk, ki = (c.index_array(f[:, a], f[:, b]) for a, b in ((0, 1), (1, 2), (2, 0)))
    p = hyp2.matmul_dd(hi[ij], lo[ij], hi[jk], lo[jk])
    return _dd_minus_identity(*hyp2.matmul_dd(*p, hi[ki], lo[ki]))
