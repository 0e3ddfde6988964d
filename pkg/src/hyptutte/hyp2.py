"""Hyperbolic plane kernel in the hyperboloid model.

Points live on the upper sheet ``x1^2 + x2^2 - x3^2 = -1, x3 > 0`` of
Minkowski space with form ``<u, v> = u1 v1 + u2 v2 - u3 v3``; curvature is
fixed at -1.  Every formula here is closed form.

Tangent vectors are stored in ambient coordinates, but their lengths and
angles are read in an orthonormal frame at the base point
(:func:`frame_coords`).  The Minkowski form on tangents at distance ``R``
from the origin cancels terms of size ``e^(2R)``; the frame does not, so
results keep their precision for lifts far from the origin.

Two layers are provided:

* array functions (``mink``, ``dist_arr``, ``exp_arr``, ...) that broadcast
  over leading axes and are what the solver uses, and
* small immutable value types (:class:`HPoint`, :class:`TangentVec`,
  :class:`Isometry`) plus scalar wrappers (``dist``, ``exp``, ``log``, ...)
  for the public, per-object API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Minkowski Gram matrix.
J = np.diag([1.0, 1.0, -1.0])

#: Tangent norms below this are treated as zero (degenerate edge).
ZERO_TOL = 1e-14

#: Compose this many isometries before re-projecting onto SO+(2,1).
PROJECT_EVERY = 256


class ZeroVector(ValueError):
    """A tangent vector needed a direction but has (numerically) zero norm."""


class IsometryError(ValueError):
    """A matrix is not an orientation-preserving Lorentz transformation."""


class NotOrthochronous(IsometryError):
    """The matrix swaps the two sheets of the hyperboloid."""


# ---------------------------------------------------------------------------
# array layer
# ---------------------------------------------------------------------------

def mink(u, v):
    """Minkowski inner product over the last axis."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]


def tnorm(v):
    """Norm of spacelike vectors from the Minkowski form; negative roundoff clamps to 0.

    Loses about ``e^(2R)`` relative digits for tangents at distance ``R``
    from the origin; :func:`tnorm_at` does not.
    """
    return np.sqrt(np.maximum(mink(v, v), 0.0))


def project_arr(x):
    """Put points back on the upper sheet by recomputing the time coordinate."""
    x = np.array(x, dtype=float, copy=True)
    x[..., 2] = np.sqrt(1.0 + x[..., 0] ** 2 + x[..., 1] ** 2)
    return x


_SPLIT = 134217729.0  # 2^27 + 1


def _two_sum(a, b):
    s = a + b
    z = s - a
    return s, (a - (s - z)) + (b - z)


def _two_prod(a, b):
    p = a * b
    ca, cb = _SPLIT * a, _SPLIT * b
    ah = ca - (ca - a)
    bh = cb - (cb - b)
    al, bl = a - ah, b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def time_lo(x):
    """Rounding error of ``x3`` as a function of the spatial part.

    ``x3 + time_lo(x)`` approximates ``sqrt(1 + x1^2 + x2^2)`` to twice
    working precision.
    """
    x = np.asarray(x, dtype=float)
    a, ea = _two_prod(x[..., 0], x[..., 0])
    b, eb = _two_prod(x[..., 1], x[..., 1])
    c, ec = _two_prod(x[..., 2], x[..., 2])
    s, t1 = _two_sum(a, b)
    s, t2 = _two_sum(s, 1.0)
    s, t3 = _two_sum(s, -c)
    r = s + (t1 + t2 + t3 + ea + eb - ec)
    return r / (2.0 * x[..., 2])


def matvec_dd(hi, lo, x, xlo=None):
    """``(hi + lo) @ (x + xlo)`` over leading axes, accurate to about one rounding.

    ``hi + lo`` is a matrix held to twice working precision, likewise
    ``x + xlo``.  The sum ``sum_k hi[:, k] x[k]`` is accumulated with
    error-free transformations, so the result stays accurate when the terms
    are large and cancel, as they do when a deck word maps a far lift back
    near the origin.
    """
    hi = np.asarray(hi, dtype=float)
    lo = np.asarray(lo, dtype=float)
    x = np.asarray(x, dtype=float)[..., None, :]
    p, e = _two_prod(hi, x)
    s, err = p[..., 0], e[..., 0]
    for k in range(1, p.shape[-1]):
        s, t = _two_sum(s, p[..., k])
        err = err + t + e[..., k]
    err = err + (lo * x).sum(axis=-1)
    if xlo is not None:
        err = err + (hi * np.asarray(xlo, dtype=float)[..., None, :]).sum(axis=-1)
    return s + err


def matmul_dd(ahi, alo, bhi, blo):
    """``(ahi + alo) @ (bhi + blo)`` as a double-length pair ``(hi, lo)``."""
    ahi, alo = np.asarray(ahi, dtype=float), np.asarray(alo, dtype=float)
    bhi, blo = np.asarray(bhi, dtype=float), np.asarray(blo, dtype=float)
    a = ahi[..., :, :, None]
    p, e = _two_prod(a, bhi[..., None, :, :])
    s, err = p[..., 0, :], e[..., 0, :]
    for k in range(1, p.shape[-2]):
        s, t = _two_sum(s, p[..., k, :])
        err = err + t + e[..., k, :]
    err = err + alo @ bhi + ahi @ blo
    hi = s + err
    return hi, err - (hi - s)


def to_tangent_arr(p, v):
    """Remove the normal component of ``v`` at ``p`` (``<p,p> = -1``)."""
    return v + mink(p, v)[..., None] * p


def _radial(p):
    """Unit direction of the spatial part of ``p``; ``(1, 0)`` at the origin."""
    r = np.hypot(p[..., 0], p[..., 1])
    # any orthonormal frame serves near the origin; avoid subnormal quotients
    big = r > 1e-150
    rs = np.where(big, r, 1.0)
    return np.where(big, p[..., 0] / rs, 1.0), np.where(big, p[..., 1] / rs, 0.0)


def frame_coords(p, v):
    """Components of tangent vectors ``v`` at ``p`` in an orthonormal frame.

    The frame is radial/angular at ``p``.  Only the spatial part of ``v`` is
    read, the time part being fixed by tangency.  Far from the origin the
    Minkowski form on tangent vectors cancels terms of size ``e^(2R)``;
    these components do not, so norms, dots and angles built from them keep
    their precision.
    """
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    e0, e1 = _radial(p)
    a = (v[..., 0] * e0 + v[..., 1] * e1) / p[..., 2]
    b = e0 * v[..., 1] - e1 * v[..., 0]
    return np.stack([a, b], axis=-1)


def from_frame(p, c):
    """Tangent vectors at ``p`` with frame components ``c`` (inverse of :func:`frame_coords`)."""
    p = np.asarray(p, dtype=float)
    c = np.asarray(c, dtype=float)
    e0, e1 = _radial(p)
    a, b = c[..., 0], c[..., 1]
    r = np.hypot(p[..., 0], p[..., 1])
    return np.stack([a * p[..., 2] * e0 - b * e1, a * p[..., 2] * e1 + b * e0, a * r], axis=-1)


def tdot(p, u, v):
    """Inner product of tangents ``u``, ``v`` at ``p``."""
    cu, cv = frame_coords(p, u), frame_coords(p, v)
    return cu[..., 0] * cv[..., 0] + cu[..., 1] * cv[..., 1]


def tcross(p, u, v):
    """``|u||v| sin(angle from u to v)``; equals ``det[u, v, p]`` for tangents."""
    cu, cv = frame_coords(p, u), frame_coords(p, v)
    return cu[..., 0] * cv[..., 1] - cu[..., 1] * cv[..., 0]


def tnorm_at(p, v):
    """Norm of tangents ``v`` at ``p`` (see :func:`frame_coords`)."""
    c = frame_coords(p, v)
    return np.hypot(c[..., 0], c[..., 1])


def _chord2(p, q):
    """``<q - p, q - p>`` without cancellation.

    ``q - p`` is tangent at the midpoint ``m``, so its norm is read off in
    the frame at ``m``.  With ``s = p + q``, ``A, B`` the components of the
    spatial part of ``q - p`` along and across ``s``, and ``m3 = s3 / sqrt(4
    + c^2)``, solving ``c^2 = A^2 / m3^2 + B^2`` for ``c^2`` gives the
    expression below.  Accurate while ``c`` is moderate.
    """
    d = q - p
    s = p + q
    e0, e1 = _radial(s)
    A2 = (d[..., 0] * e0 + d[..., 1] * e1) ** 2
    B2 = (e0 * d[..., 1] - e1 * d[..., 0]) ** 2
    s3 = s[..., 2] ** 2
    return (4.0 * A2 + B2 * s3) / np.maximum(s3 - A2, np.finfo(float).tiny)


def _from_origin(p, w):
    """``B_p w`` where ``B_p`` is the transvection carrying the origin to ``p``."""
    ps = p[..., :2]
    ws = w[..., :2]
    dot = np.sum(ps * ws, axis=-1)
    top = ws + ps * (dot / (1.0 + p[..., 2]) + w[..., 2])[..., None]
    return np.concatenate([top, (dot + p[..., 2] * w[..., 2])[..., None]], axis=-1)


def _to_frame(p, w):
    """``B_p^{-1} w``: ``w`` seen from a frame in which ``p`` is the origin."""
    ps = p[..., :2]
    ws = w[..., :2]
    dot = np.sum(ps * ws, axis=-1)
    top = ws + ps * (dot / (1.0 + p[..., 2]) - w[..., 2])[..., None]
    return np.concatenate([top, (p[..., 2] * w[..., 2] - dot)[..., None]], axis=-1)


def _far(p, dd):
    """Pairs better measured in the frame of ``p``.

    The midpoint chord has relative error about ``eps cosh^2(d/2)``, the
    frame change about ``eps p3^2``; take whichever is smaller.
    """
    return dd > 4.0 * np.maximum(p[..., 2] ** 2, 1.0)


def dist_arr(p, q):
    """Geodesic distance.

    Close pairs use ``2 asinh(|q - p| / 2)`` with the chord from
    :func:`_chord2`, which equals ``arccosh(-<p, q>)`` but keeps full
    relative precision; far pairs use
    ``asinh`` of the spatial part of ``q`` in the frame of ``p``.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    dd = _chord2(p, q)
    near = 2.0 * np.arcsinh(0.5 * np.sqrt(dd))
    far = _far(p, dd)
    if not np.any(far):
        return near
    qf = _to_frame(p, q)
    return np.where(far, np.arcsinh(np.hypot(qf[..., 0], qf[..., 1])), near)


def _sinhc(t):
    t = np.asarray(t, dtype=float)
    small = t < 1e-8
    safe = np.where(small, 1.0, t)
    return np.where(small, 1.0 + t * t / 6.0, np.sinh(safe) / safe)


def exp_arr(p, v):
    """Exponential map at ``p`` applied to tangent ``v``."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    n = tnorm_at(p, v)
    out = np.cosh(n)[..., None] * p + _sinhc(n)[..., None] * v
    return project_arr(out)


def log_arr(p, q):
    """Inverse exponential map: the tangent at ``p`` pointing to ``q``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d = q - p
    dd = _chord2(p, q)
    # q + <p,q> p written without the cancellation in 1 + <p,q>.
    u = d - 0.5 * dd[..., None] * p
    un = tnorm_at(p, u)
    dist = 2.0 * np.arcsinh(0.5 * np.sqrt(dd))
    safe = np.where(un > 0.0, un, 1.0)
    scale = np.where(un > 0.0, dist / safe, 0.0)
    out = scale[..., None] * u
    far = _far(p, dd)
    if not np.any(far):
        return out
    qf = _to_frame(p, q)
    r = np.hypot(qf[..., 0], qf[..., 1])
    rs = np.where(r > 0.0, r, 1.0)
    vf = np.zeros(np.broadcast(p, q).shape)
    vf[..., :2] = qf[..., :2] * (np.arcsinh(r) / rs)[..., None]
    return np.where(far[..., None], _from_origin(p, vf), out)


def transport_arr(p, q, v):
    """Parallel transport of ``v`` from ``p`` to ``q`` along the geodesic.

    The components of ``v`` along and across the geodesic are preserved.
    They are read in the frame at ``p`` against ``log(p, q)`` and rebuilt in
    the frame at ``q`` against ``-log(q, p)``; the closed form
    ``v + <q, v> / (1 - <p, q>) (p + q)`` loses ``e^(2R)`` relative digits
    at distance ``R`` from the origin and is used only for very close pairs.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    coef = mink(q, v) / (1.0 - mink(p, q))
    close = v + coef[..., None] * (p + q)
    fu = frame_coords(p, log_arr(p, q))
    d = np.hypot(fu[..., 0], fu[..., 1])
    ok = d > 1e-8
    if not np.any(ok):
        return close
    ds = np.where(ok, d, 1.0)[..., None]
    fu = fu / ds
    fv = frame_coords(p, v)
    along = fu[..., 0] * fv[..., 0] + fu[..., 1] * fv[..., 1]
    across = fu[..., 0] * fv[..., 1] - fu[..., 1] * fv[..., 0]
    gu = -frame_coords(q, log_arr(q, p)) / ds
    out = np.stack([along * gu[..., 0] - across * gu[..., 1],
                    along * gu[..., 1] + across * gu[..., 0]], axis=-1)
    return np.where(ok[..., None], from_frame(q, out), close)


def det3(a, b, c):
    """``det[a, b, c]`` with the vectors as columns, broadcast over leading axes."""
    return (a[..., 0] * (b[..., 1] * c[..., 2] - b[..., 2] * c[..., 1])
            - a[..., 1] * (b[..., 0] * c[..., 2] - b[..., 2] * c[..., 0])
            + a[..., 2] * (b[..., 0] * c[..., 1] - b[..., 1] * c[..., 0]))


def angle_arr(p, u, v):
    """Unsigned angle in ``[0, pi]`` between tangents ``u`` and ``v`` at ``p``.

    ``atan2(|cross|, dot)`` in the frame at ``p``: the arccos of the
    normalised inner product without its loss of precision near 0 and pi.
    Returns NaN where either vector is shorter than :data:`ZERO_TOL`.
    """
    cu, cv = frame_coords(p, u), frame_coords(p, v)
    cross = np.abs(cu[..., 0] * cv[..., 1] - cu[..., 1] * cv[..., 0])
    dot = cu[..., 0] * cv[..., 0] + cu[..., 1] * cv[..., 1]
    ang = np.arctan2(cross, dot)
    bad = (np.hypot(cu[..., 0], cu[..., 1]) < ZERO_TOL) | (np.hypot(cv[..., 0], cv[..., 1]) < ZERO_TOL)
    return np.where(bad, np.nan, ang)


def signed_angle_arr(p, u, v):
    """Angle from ``u`` to ``v`` in ``(-pi, pi]``, positive counterclockwise."""
    cu, cv = frame_coords(p, u), frame_coords(p, v)
    return np.arctan2(cu[..., 0] * cv[..., 1] - cu[..., 1] * cv[..., 0],
                      cu[..., 0] * cv[..., 0] + cu[..., 1] * cv[..., 1])


def _tanh_half_over(t):
    """``tanh(t / 2) / t``, continuous at 0."""
    small = t < 1e-6
    safe = np.where(small, 1.0, t)
    return np.where(small, 0.5 - t * t / 24.0, np.tanh(0.5 * safe) / safe)


def triangle_area_arr(p, q, r):
    """Area of geodesic triangles from two sides and the included angle.

    With ``u = log(p, q)``, ``v = log(p, r)`` of lengths ``a, b``:
    ``tan(A/2) = t_a t_b (u x v) / (1 - t_a t_b (u . v))`` where
    ``t_a = tanh(a/2) / a``.  This is the determinant formula
    ``tan(A/2) = |det[p,q,r]| / (1 - <p,q> - <q,r> - <r,p>)`` evaluated in
    the frame of ``p``.  It uses only the corner at ``p``, so the angle sum
    at the other two corners is an independent check.
    """
    p = np.asarray(p, dtype=float)
    u, v = log_arr(p, q), log_arr(p, r)
    cu, cv = frame_coords(p, u), frame_coords(p, v)
    t = _tanh_half_over(np.hypot(cu[..., 0], cu[..., 1])) * _tanh_half_over(np.hypot(cv[..., 0], cv[..., 1]))
    cross = np.abs(cu[..., 0] * cv[..., 1] - cu[..., 1] * cv[..., 0])
    dot = cu[..., 0] * cv[..., 0] + cu[..., 1] * cv[..., 1]
    return 2.0 * np.arctan2(t * cross, 1.0 - t * dot)


def midpoint_arr(p, q):
    """Geodesic midpoint (normalised Minkowski sum)."""
    s = np.asarray(p, dtype=float) + np.asarray(q, dtype=float)
    return project_arr(s / np.sqrt(-mink(s, s))[..., None])


def to_poincare(x):
    """Hyperboloid to Poincare disk: ``(x1, x2) / (1 + x3)``."""
    x = np.asarray(x, dtype=float)
    return x[..., :2] / (1.0 + x[..., 2:3])


def from_poincare(z):
    z = np.asarray(z, dtype=float)
    r2 = np.sum(z * z, axis=-1)
    out = np.empty(z.shape[:-1] + (3,))
    out[..., :2] = 2.0 * z / (1.0 - r2)[..., None]
    out[..., 2] = (1.0 + r2) / (1.0 - r2)
    return out


def rotation_matrix(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def boost_matrix(t):
    """Translation by ``t`` along the geodesic through the origin in the x1 direction."""
    c, s = math.cosh(t), math.sinh(t)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def lorentz_inverse(m):
    """Exact inverse ``J m^T J`` of a Lorentz matrix (broadcasts)."""
    m = np.asarray(m, dtype=float)
    return J @ np.swapaxes(m, -1, -2) @ J


def gram_schmidt(m):
    """Minkowski Gram-Schmidt on the columns of ``m``, timelike column first."""
    m = np.asarray(m, dtype=float)
    c2 = m[:, 2]
    n2 = -mink(c2, c2)
    if not n2 > 0:
        raise IsometryError("third column is not timelike")
    c2 = c2 / math.sqrt(n2)
    if c2[2] <= 0:
        raise NotOrthochronous("matrix maps the upper sheet to the lower sheet")
    c0 = m[:, 0] + mink(m[:, 0], c2) * c2
    c0 = c0 / math.sqrt(mink(c0, c0))
    c1 = m[:, 1] + mink(m[:, 1], c2) * c2 - mink(m[:, 1], c0) * c0
    c1 = c1 / math.sqrt(mink(c1, c1))
    out = np.column_stack([c0, c1, c2])
    if np.linalg.det(out) < 0:
        raise IsometryError("matrix reverses orientation")
    return out


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class HPoint:
    """A point of the hyperbolic plane.  Coordinates are re-projected on construction."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.shape != (3,) or not np.all(np.isfinite(c)):
            raise ValueError(f"bad hyperboloid coordinates {c!r}")
        object.__setattr__(self, "coords", _frozen(project_arr(c)))

    @classmethod
    def origin(cls) -> HPoint:
        return cls(np.array([0.0, 0.0, 1.0]))

    @classmethod
    def from_poincare(cls, z) -> HPoint:
        return cls(from_poincare(np.asarray(z, dtype=float)))

    def poincare(self) -> np.ndarray:
        return to_poincare(self.coords)

    def __repr__(self):
        x = self.coords
        return f"HPoint({x[0]:.6g}, {x[1]:.6g}, {x[2]:.6g})"


@dataclass(frozen=True, eq=False)
class TangentVec:
    base: HPoint
    vec: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=float)
        if v.shape != (3,):
            raise ValueError("tangent vector must have 3 components")
        object.__setattr__(self, "vec", _frozen(to_tangent_arr(self.base.coords, v)))

    @classmethod
    def zero(cls, base: HPoint) -> TangentVec:
        return cls(base, np.zeros(3))

    def norm(self) -> float:
        return float(tnorm_at(self.base.coords, self.vec))

    def __add__(self, other: TangentVec) -> TangentVec:
        return TangentVec(self.base, self.vec + other.vec)

    def __sub__(self, other: TangentVec) -> TangentVec:
        return TangentVec(self.base, self.vec - other.vec)

    def __mul__(self, s: float) -> TangentVec:
        return TangentVec(self.base, s * self.vec)

    __rmul__ = __mul__

    def __neg__(self) -> TangentVec:
        return TangentVec(self.base, -self.vec)

    def dot(self, other: TangentVec) -> float:
        return float(tdot(self.base.coords, self.vec, other.vec))


@dataclass(frozen=True, eq=False)
class Isometry:
    """Orientation-preserving isometry, an element of SO+(2,1).

    ``word`` optionally records the generator word that produced the matrix
    (see :mod:`hyptutte.fuchsian`).  ``depth`` counts unprojected
    compositions; :func:`compose` re-projects every :data:`PROJECT_EVERY`.
    """

    mat: np.ndarray
    word: str | None = None
    depth: int = field(default=0, compare=False)

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("isometry matrix must be 3x3")
        object.__setattr__(self, "mat", _frozen(m))

    @classmethod
    def identity(cls) -> Isometry:
        return cls(np.eye(3), word="")

    def form_residual(self) -> float:
        """``max |G^T J G - J|``."""
        return float(np.abs(self.mat.T @ J @ self.mat - J).max())

    def is_valid(self, tol: float = 1e-10) -> bool:
        return (self.form_residual() < tol and self.mat[2, 2] > 0
                and np.linalg.det(self.mat) > 0)

    def __matmul__(self, other):
        if isinstance(other, Isometry):
            return compose(self, other)
        if isinstance(other, HPoint):
            return apply(self, other)
        if isinstance(other, TangentVec):
            return apply_tangent(self, other)
        return NotImplemented


# ---------------------------------------------------------------------------
# scalar API
# ---------------------------------------------------------------------------

def dist(p: HPoint, q: HPoint) -> float:
    return float(dist_arr(p.coords, q.coords))


def exp(v: TangentVec) -> HPoint:
    return HPoint(exp_arr(v.base.coords, v.vec))


def log(p: HPoint, q: HPoint) -> TangentVec:
    return TangentVec(p, log_arr(p.coords, q.coords))


def transport(p: HPoint, q: HPoint, v: TangentVec) -> TangentVec:
    return TangentVec(q, transport_arr(p.coords, q.coords, v.vec))


def angle(u: TangentVec, v: TangentVec) -> float:
    if u.norm() < ZERO_TOL or v.norm() < ZERO_TOL:
        raise ZeroVector("angle needs two non-zero tangent vectors")
    return float(angle_arr(u.base.coords, u.vec, v.vec))


def oriented_side(u: TangentVec, v: TangentVec) -> int:
    """Sign of ``det[u, v, p]``: +1 when ``(u, v)`` is positively oriented at ``p``."""
    d = float(tcross(u.base.coords, u.vec, v.vec))
    if abs(d) <= 1e-14 * u.norm() * v.norm():
        return 0
    return 1 if d > 0 else -1


def triangle_area(p: HPoint, q: HPoint, r: HPoint) -> float:
    """``pi`` minus the angle sum; 0 for degenerate triples."""
    a, b, c = p.coords, q.coords, r.coords
    corners = ((a, b, c), (b, c, a), (c, a, b))
    total = 0.0
    for x, y, z in corners:
        u, v = log_arr(x, y), log_arr(x, z)
        if tnorm_at(x, u) < ZERO_TOL or tnorm_at(x, v) < ZERO_TOL:
            return 0.0
        total += float(angle_arr(x, u, v))
    return max(math.pi - total, 0.0)


def apply(g: Isometry, p: HPoint) -> HPoint:
    return HPoint(g.mat @ p.coords)


def apply_tangent(g: Isometry, v: TangentVec) -> TangentVec:
    return TangentVec(apply(g, v.base), g.mat @ v.vec)


def compose(g: Isometry, h: Isometry) -> Isometry:
    from .fuchsian import word_mul  # words are a fuchsian concern

    word = word_mul(g.word, h.word) if g.word is not None and h.word is not None else None
    depth = g.depth + h.depth + 1
    m = g.mat @ h.mat
    if depth >= PROJECT_EVERY:
        m, depth = gram_schmidt(m), 0
    return Isometry(m, word=word, depth=depth)


def inverse(g: Isometry) -> Isometry:
    from .fuchsian import word_inv

    word = word_inv(g.word) if g.word is not None else None
    return Isometry(lorentz_inverse(g.mat), word=word, depth=g.depth)


def project(g: Isometry) -> Isometry:
    """Re-orthonormalise a drifted matrix with respect to ``J``."""
    return Isometry(gram_schmidt(g.mat), word=g.word, depth=0)


def translation(p: HPoint, q: HPoint) -> Isometry:
    """The transvection along the geodesic carrying ``p`` to ``q``."""
    v = log_arr(p.coords, q.coords)
    t = float(tnorm_at(p.coords, v))
    if t == 0.0:
        return Isometry.identity()
    # move p to the origin, boost along the image direction, move back
    to_o = _to_origin(p.coords)
    w = to_o @ v
    theta = math.atan2(w[1], w[0])
    m = (lorentz_inverse(to_o) @ rotation_matrix(theta) @ boost_matrix(t)
         @ rotation_matrix(-theta) @ to_o)
    return Isometry(m)


def _to_origin(p):
    """A Lorentz matrix sending ``p`` to ``(0, 0, 1)``."""
    r = math.hypot(p[0], p[1])
    if r == 0.0:
        return np.eye(3)
    theta = math.atan2(p[1], p[0])
    t = math.asinh(r)
    return boost_matrix(-t) @ rotation_matrix(-theta)
