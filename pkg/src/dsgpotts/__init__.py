"""Quantum discrete sine-Gordon model at roots of unity and the chiral Potts model."""

from .core_algebra import DenseOperator, RootContext, clock_shift, make_root_context
from .curve import CurveModulus, CurvePoint, point_from_s, random_modulus, sample_points, validate_point
from .weights import WeightTable, star_triangle_residual, weight_tables

__version__ = "0.1.0"

__all__ = [
    "CurveModulus",
    "CurvePoint",
    "DenseOperator",
    "RootContext",
    "WeightTable",
    "clock_shift",
    "make_root_context",
    "point_from_s",
    "random_modulus",
    "sample_points",
    "star_triangle_residual",
    "validate_point",
    "weight_tables",
]
