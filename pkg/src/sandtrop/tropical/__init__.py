"""Exact min-plus polynomials, their curves, and the G_p dynamics."""

from .curve import CurveEdge, TropicalCurve, extract_curve, sample_curve, segment_curve, symplectic_area
from .dynamics import DEFAULT_GMULTI_BUDGET, apply_Gmulti, apply_Gp
from .polynomial import (
    NewtonSubdivision,
    TropicalPolynomial,
    canonicalize,
    dual_subdivision,
    edge_area,
    eval_poly,
    integral,
    quasi_degree,
    weighted_distance_polynomial,
    zero,
)

__all__ = [
    "CurveEdge",
    "DEFAULT_GMULTI_BUDGET",
    "NewtonSubdivision",
    "TropicalCurve",
    "TropicalPolynomial",
    "apply_Gmulti",
    "apply_Gp",
    "canonicalize",
    "dual_subdivision",
    "edge_area",
    "eval_poly",
    "extract_curve",
    "integral",
    "quasi_degree",
    "sample_curve",
    "segment_curve",
    "symplectic_area",
    "weighted_distance_polynomial",
    "zero",
]
