"""Numerical differential geometry for immersions into warped products and Riemannian submersions.

The package evaluates, on concrete examples, lower bounds for the sectional
curvature and the mean curvature of submanifolds whose projection to the
base lies in a geodesic ball, together with the tools those bounds rest on:
curvature of chart metrics, warped-product formulas, comparison functions,
bilinear-form pair searches, Omori-Yau conditions and O'Neill tensors.
"""

from .errors import (
    ContainmentViolated,
    DimensionHypothesisFailed,
    DomainError,
    HypothesisFailed,
    InputError,
    NumericalError,
    ParseError,
    WarpGeoError,
)
from .estimates import (
    EstimateReport,
    Scenario,
    verify_all,
    verify_theorem_A,
    verify_theorem_B,
    verify_theorem_sub_mean,
    verify_theorem_sub_sectional,
)
from .expr import compile_expression, parse_expression
from .scenario import load, load_builtin

__version__ = "0.1.0"

__all__ = [
    "ContainmentViolated",
    "DimensionHypothesisFailed",
    "DomainError",
    "EstimateReport",
    "HypothesisFailed",
    "InputError",
    "NumericalError",
    "ParseError",
    "Scenario",
    "WarpGeoError",
    "compile_expression",
    "load",
    "load_builtin",
    "parse_expression",
    "verify_all",
    "verify_theorem_A",
    "verify_theorem_B",
    "verify_theorem_sub_mean",
    "verify_theorem_sub_sectional",
]
