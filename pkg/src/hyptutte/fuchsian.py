"""Deck group of a closed genus-g surface, realised on the regular 4g-gon.

Sides of the polygon are numbered counterclockwise; side ``j`` joins vertex
``j`` (at angle ``2 pi j / 4g``) to vertex ``j + 1``.  Within each block of
four sides the pattern is ``a_k b_k a_k^-1 b_k^-1``: side ``4k`` is glued to
``4k + 2`` and ``4k + 1`` to ``4k + 3``.

Generator words are strings of tokens ``a1 b1 A1 B1 a2 ...``, capitals being
inverses; the empty string is the identity.  Matrices for words are always
rebuilt the same way (:meth:`SurfaceGroup.word_matrix`) so that anything
serialised as a word comes back bit-identical.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from . import hyp2
from .hyp2 import HPoint, Isometry

_TOKEN = re.compile(r"([abAB])(\d+)")


class GenusTooSmall(ValueError):
    pass


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------

def tokens(word: str) -> list[str]:
    if word in ("", "e", "1"):
        return []
    toks = [m.group(0) for m in _TOKEN.finditer(word)]
    if "".join(toks) != word:
        raise ValueError(f"malformed generator word {word!r}")
    return toks


def _inv_token(t: str) -> str:
    return t.swapcase() if t[0].isalpha() else t


def _reduce(toks: list[str]) -> list[str]:
    out: list[str] = []
    for t in toks:
        if out and out[-1] == _inv_token(t):
            out.pop()
        else:
            out.append(t)
    return out


def word_mul(*words: str) -> str:
    """Freely reduced product of words."""
    toks: list[str] = []
    for w in words:
        toks.extend(tokens(w))
    return "".join(_reduce(toks))


def word_inv(word: str) -> str:
    """Freely reduced inverse of a word."""
    return "".join(_reduce([_inv_token(t) for t in reversed(tokens(word))]))


# ---------------------------------------------------------------------------
# group
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SurfaceGroup:
    """Side-pairing generators of a fundamental 4g-gon.

    Attributes
    ----------
    genus : int
    generators : list of Isometry
        ``a1, b1, A1, B1, a2, ...``; each carries its one-token word.
    polygon : list of HPoint
        The 4g polygon vertices, counterclockwise.
    base : HPoint
        Polygon center.
    sides : list of tuple
        ``sides[m] = (src, dst)``: generator ``m`` maps polygon side ``src``
        onto side ``dst`` (and the polygon to its neighbour across ``dst``).
    exact : dict, optional
        Generator name to a 3x3 nested list of Fractions carrying the
        matrices to more than double precision; word matrices are products
        of these, rounded once.  Without it the float generators are used.
    """

    genus: int
    generators: list
    polygon: list
    base: HPoint
    sides: list
    exact: dict | None = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def names(self) -> list[str]:
        return [g.word for g in self.generators]

    def generator(self, name: str) -> Isometry:
        return self.generators[self.names.index(name)]

    def _float_exact(self, name: str):
        key = ("float", name)
        if key not in self._cache:
            g = self.generators[self.names.index(name)]
            self._cache[key] = [[Fraction(float(x)) for x in row] for row in g.mat]
        return self._cache[key]

    def _exact(self, name: str):
        if self.exact is not None:
            return self.exact[name]
        return self._float_exact(name)

    def _exact_product(self, toks, factor=None):
        factor = factor or self._exact
        m = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
        for t in toks:
            b = factor(t)
            m = [[m[i][0] * b[0][j] + m[i][1] * b[1][j] + m[i][2] * b[2][j]
                  for j in range(3)] for i in range(3)]
        return m

    def word_matrix(self, word: str) -> np.ndarray:
        """Matrix of a word, identity for ``''``.

        The product of the extended-precision generators is formed exactly
        and rounded once, so long words are as accurate as single
        generators.  Left-to-right float products lose up to 1e-8 on
        length-6 words of the genus-3 group, and even the exact product of
        the rounded generators amplifies their rounding by the matrix norms.
        The result does not depend on how the word was assembled.
        """
        word = word_mul(word)
        m = self._cache.get(word)
        if m is None:
            m = np.array([[float(x) for x in row]
                          for row in self._exact_product(tokens(word))])
            m.flags.writeable = False
            self._cache[word] = m
        return m

    def word_matrix_lo(self, word: str) -> np.ndarray:
        """Rounding error of :meth:`word_matrix`: ``exact - word_matrix(word)``."""
        word = word_mul(word)
        key = ("lo", word)
        m = self._cache.get(key)
        if m is None:
            hi = self.word_matrix(word)
            ex = self._exact_product(tokens(word))
            m = np.array([[float(ex[i][j] - Fraction(float(hi[i, j]))) for j in range(3)]
                          for i in range(3)])
            m.flags.writeable = False
            self._cache[key] = m
        return m

    def element(self, word: str) -> Isometry:
        return Isometry(self.word_matrix(word), word=word_mul(word))

    def relator_word(self) -> str:
        return "".join(f"a{k}b{k}A{k}B{k}" for k in range(1, self.genus + 1))

    def relator_residual(self) -> float:
        """``max |a1 b1 A1 B1 ... - I|`` for the stored float matrices.

        Evaluated exactly: in floating point the partial products reach norms
        of several hundred and association order alone moves the result by
        two orders of magnitude.
        """
        m = self._exact_product(tokens(self.relator_word()), self._float_exact)
        return max(abs(float(m[i][j] - (i == j))) for i in range(3) for j in range(3))

    def polygon_angles(self) -> np.ndarray:
        """Interior angle of the polygon at each vertex."""
        pts = np.array([p.coords for p in self.polygon])
        prev = np.roll(pts, 1, axis=0)
        nxt = np.roll(pts, -1, axis=0)
        return hyp2.angle_arr(pts, hyp2.log_arr(pts, nxt), hyp2.log_arr(pts, prev))

    def polygon_area(self) -> float:
        return float((len(self.polygon) - 2) * math.pi - self.polygon_angles().sum())

    def side(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        n = len(self.polygon)
        return self.polygon[j % n].coords, self.polygon[(j + 1) % n].coords

    def inside(self, p, tol: float = 1e-12) -> bool:
        """True if ``p`` is no farther from the center than from any neighbour center."""
        x = p.coords if isinstance(p, HPoint) else np.asarray(p)
        d0 = hyp2.dist_arr(self.base.coords, x)
        for g in self.generators:
            if hyp2.dist_arr(g.mat @ self.base.coords, x) < d0 - tol:
                return False
        return True


def _pairing(j: int) -> int:
    return j + 2 if j % 4 in (0, 1) else j - 2


@lru_cache(maxsize=None)
def regular_group(genus: int) -> SurfaceGroup:
    """Regular 4g-gon centered at the origin with interior angle ``2 pi / 4g``."""
    if genus < 2:
        raise GenusTooSmall(f"genus must be at least 2, got {genus}")
    n = 4 * genus
    # entries are computed at 40 digits and rounded once, which keeps the
    # relator residual below 1e-9 through genus 3
    with mpmath.workdps(40):
        pi = mpmath.pi
        # inradius h and circumradius R of the regular n-gon with angle 2 pi / n
        h = mpmath.acosh(mpmath.cot(pi / n))
        cosh_r = mpmath.cot(pi / n) ** 2
        sinh_r = mpmath.sqrt(cosh_r ** 2 - 1)
        polygon = []
        for j in range(n):
            t = 2 * pi * j / n
            polygon.append(HPoint(np.array([float(sinh_r * mpmath.cos(t)),
                                            float(sinh_r * mpmath.sin(t)),
                                            float(cosh_r)])))

        def rot(t):
            c, s = mpmath.cos(t), mpmath.sin(t)
            return mpmath.matrix([[c, -s, 0], [s, c, 0], [0, 0, 1]])

        boost = mpmath.matrix([[mpmath.cosh(2 * h), 0, mpmath.sinh(2 * h)],
                               [0, 1, 0],
                               [mpmath.sinh(2 * h), 0, mpmath.cosh(2 * h)]])

        def across(dst: int):
            # carry side _pairing(dst) onto side dst, flipping the polygon across dst
            src = _pairing(dst)
            return rot((2 * dst + 1) * pi / n) * boost * rot(pi - (2 * src + 1) * pi / n)

        jmat = mpmath.diag([1, 1, -1])
        hp = {}
        for k in range(genus):
            a, b = across(4 * k), across(4 * k + 3)
            hp[f"a{k + 1}"], hp[f"b{k + 1}"] = a, b
            hp[f"A{k + 1}"] = jmat * a.T * jmat
            hp[f"B{k + 1}"] = jmat * b.T * jmat
        exact = {name: [[_to_fraction(m[i, j]) for j in range(3)] for i in range(3)]
                 for name, m in hp.items()}

    gens, sides = [], []
    for k in range(genus):
        for name, dst in ((f"a{k + 1}", 4 * k), (f"b{k + 1}", 4 * k + 3),
                          (f"A{k + 1}", 4 * k + 2), (f"B{k + 1}", 4 * k + 1)):
            m = np.array([[float(x) for x in row] for row in exact[name]])
            gens.append(Isometry(m, word=name))
            sides.append((_pairing(dst), dst))
    return SurfaceGroup(genus=genus, generators=gens, polygon=polygon,
                        base=HPoint.origin(), sides=sides, exact=exact)


def _to_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if not man:
        return Fraction(0)
    return (-1) ** sign * Fraction(int(man)) * Fraction(2) ** int(exp)


def side_pairing_check(group: SurfaceGroup) -> dict[str, float]:
    """Per generator, the max deviation of mapped side endpoints from the paired side.

    Orientation of the glued sides is reversed, so endpoint ``s`` of the
    source side lands on endpoint ``1 - s`` of the destination.
    """
    out = {}
    for g, (src, dst) in zip(group.generators, group.sides):
        p0, p1 = group.side(src)
        q0, q1 = group.side(dst)
        m = g.mat
        err = max(np.abs(m @ p0 - q1).max(), np.abs(m @ p1 - q0).max())
        out[g.word] = float(err)
    return out


def reduce(group: SurfaceGroup, p: HPoint) -> tuple[HPoint, Isometry]:
    """Greedy descent toward the polygon center over generator multiplications.

    Returns ``(q, g)`` with ``q = g p`` and no single generator bringing ``q``
    closer to the center.  For the regular polygon such a ``q`` lies in the
    polygon, which is the Dirichlet domain of the center.
    """
    x = p.coords
    base = group.base.coords
    word = ""
    d = float(hyp2.dist_arr(base, x))
    mats = np.array([g.mat for g in group.generators])
    while True:
        cand = mats @ x
        dc = hyp2.dist_arr(base, cand)
        k = int(np.argmin(dc))
        if not dc[k] < d - 1e-15:
            break
        x, d = hyp2.project_arr(cand[k]), float(dc[k])
        word = word_mul(group.generators[k].word, word)
    g = group.element(word)
    return HPoint(g.mat @ p.coords), g


def enumerate_elements(group: SurfaceGroup, max_len: int) -> list[str]:
    """All freely reduced words of length ``<= max_len``, shortest first."""
    names = group.names
    out = [""]
    frontier = [""]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            last = tokens(w)[-1] if w else None
            for t in names:
                if last is not None and _inv_token(t) == last:
                    continue
                nxt.append(w + t)
        out.extend(nxt)
        frontier = nxt
    return out
