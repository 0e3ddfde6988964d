"""Balanced geodesic triangulations of closed hyperbolic surfaces.

Given a triangulated surface of genus ``g >= 2`` and positive edge weights,
:func:`solve` finds the unique geodesic mapping in which every vertex is the
weighted barycenter of its neighbours.  The result is an embedded
triangulation; mean value weights invert the construction, and interpolating
weights morphs between triangulations.
"""

from .balance import NoConvergence, SolverConfig, SolveTrace, solve, solve_warm, step
from .fuchsian import SurfaceGroup, reduce, regular_group
from .gmap import (DeckLabels, GeodesicMapping, LabelMismatch, Weights, distance_X,
                   energy, gauge, normalized_residual)
from .simplicial import Complex, builtin_mapping, builtin_mesh, subdivide, validate
from .verify import EmbeddingReport, embedding_report
from .weights import MorphPlan, interpolate, morph, mvc

__all__ = [
    "Complex", "DeckLabels", "EmbeddingReport", "GeodesicMapping", "LabelMismatch",
    "MorphPlan", "NoConvergence", "SolveTrace", "SolverConfig", "SurfaceGroup", "Weights",
    "builtin_mapping", "builtin_mesh", "distance_X", "embedding_report", "energy", "gauge",
    "interpolate", "morph", "mvc", "normalized_residual", "reduce", "regular_group", "solve",
    "solve_warm", "step", "subdivide", "validate",
]

__version__ = "0.1.0"
