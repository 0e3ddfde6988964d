"""Damped Jacobi iteration for the w-balanced geodesic mapping.

Every sweep moves each lift along its normalised residue,

    x_i <- exp_{x_i}(tau * r_i / W_i),    W_i = sum_j w_ij,

which is one damped step of the weighted Riemannian barycenter of the
neighbours.  A sweep is accepted when the largest normalised residual
``mu = max_i |r_i| / W_i`` does not grow; otherwise ``tau`` is shrunk for that
sweep only.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import hyp2
from .fuchsian import reduce
from .gmap import GeodesicMapping, Weights, gauge

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    tau: float = 0.5
    eps: float = 1e-10
    max_iters: int = 200_000
    backtrack: float = 0.5
    normalize_every: int = 64
    max_backtracks: int = 60

    def __post_init__(self):
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must lie in (0, 1]")
        if not self.eps > 0.0:
            raise ValueError("eps must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not 0.0 < self.backtrack < 1.0:
            raise ValueError("backtrack must lie in (0, 1)")


@dataclass
class SolveTrace:
    residuals: list = field(default_factory=list)
    taus: list = field(default_factory=list)
    energies: list = field(default_factory=list)
    sweeps: int = 0
    rejected: int = 0
    converged: bool = False

    @property
    def final(self) -> float:
        return self.residuals[-1] if self.residuals else float("nan")

    def summary(self) -> str:
        status = "converged" if self.converged else "not converged"
        return (f"{status}: mu={self.final:.3e} sweeps={self.sweeps} "
                f"rejected={self.rejected}")


class NoConvergence(RuntimeError):
    def __init__(self, trace: SolveTrace, message: str = ""):
        self.trace = trace
        super().__init__(message or f"solver stopped without converging ({trace.summary()})")


class _Field:
    """Residue field of one weight vector over a fixed complex and label set."""

    def __init__(self, m: GeodesicMapping, w: Weights):
        c = m.complex
        if w.complex is not c and w.complex != c:
            raise ValueError("weights belong to a different complex")
        self.tails = c.halfedges[:, 0]
        self.hd = c.halfedges[:, 1]
        self.start = c.out_start
        self.w = w.values
        self.wsym = w.symmetrized()
        self.W = w.vertex_totals()
        self.set_labels(m)

    def set_labels(self, m: GeodesicMapping):
        self.labels = m.labels

    def __call__(self, x):
        """Normalised residues ``r_i / W_i``, their max norm, and the energy."""
        y = self.labels.act(slice(None), x[self.hd])
        v = hyp2.log_arr(x[self.tails], y)
        r = np.add.reduceat(self.w[:, None] * v, self.start, axis=0)
        s = r / self.W[:, None]
        mu = float(np.max(hyp2.tnorm_at(x, s)))
        e = 0.25 * float(np.dot(self.wsym, hyp2.tnorm_at(x[self.tails], v) ** 2))
        return s, mu, e


def step(m: GeodesicMapping, w: Weights, tau: float) -> tuple[GeodesicMapping, float]:
    """One Jacobi sweep; returns the new mapping and ``mu`` before the sweep."""
    s, mu, _ = _Field(m, w)(m.lifts)
    return m.with_lifts(hyp2.exp_arr(m.lifts, tau * s)), mu


def solve(m0: GeodesicMapping, w: Weights, cfg: SolverConfig | None = None):
    """Iterate :func:`step` with backtracking until ``mu < cfg.eps``.

    Returns ``(mapping, trace)``.  Raises :class:`NoConvergence` after
    ``cfg.max_iters`` accepted sweeps, or when no step size down to
    ``tau * backtrack**max_backtracks`` decreases ``mu``.
    """
    cfg = cfg or SolverConfig()
    m = m0
    fld = _Field(m, w)
    x = np.array(m.lifts)
    s, mu, e = fld(x)
    trace = SolveTrace(residuals=[mu], energies=[e])
    while mu >= cfg.eps:
        if trace.sweeps >= cfg.max_iters:
            raise NoConvergence(trace)
        t = cfg.tau
        for _ in range(cfg.max_backtracks + 1):
            xn = hyp2.exp_arr(x, t * s)
            sn, mun, en = fld(xn)
            if mun <= mu:
                break
            trace.rejected += 1
            t *= cfg.backtrack
        else:
            raise NoConvergence(trace, f"no decreasing step at mu={mu:.3e}")
        x, s, mu, e = xn, sn, mun, en
        trace.sweeps += 1
        trace.residuals.append(mu)
        trace.taus.append(t)
        trace.energies.append(e)
        if cfg.normalize_every and trace.sweeps % cfg.normalize_every == 0:
            m = m.with_lifts(x)
            _, g = reduce(m.group, m.point(0))
            if g.word:
                m = gauge(m, 0, g.word)
                x = np.array(m.lifts)
                fld.set_labels(m)
                s, mu, e = fld(x)
        if trace.sweeps % 5000 == 0:
            logger.debug("sweep %d mu %.3e", trace.sweeps, mu)
    trace.converged = True
    m = m.with_lifts(x)
    if cfg.normalize_every and trace.sweeps:
        _, g = reduce(m.group, m.point(0))
        if g.word:
            m = gauge(m, 0, g.word)
    return m, trace


def solve_warm(prev: GeodesicMapping, w: Weights, cfg: SolverConfig | None = None):
    """:func:`solve` started from a mapping that was balanced for nearby weights."""
    return solve(prev, w, cfg)
