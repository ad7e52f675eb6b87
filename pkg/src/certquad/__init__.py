"""Perturbed quarter-point quadrature with certified error bounds."""

from __future__ import annotations

from .composite import (
    Partition,
    QuadratureResult,
    integrate,
    integrate_to_tolerance,
    q1,
    q2,
    quarter_point_sum,
    trapezoid,
    tree_sum,
)
from .errors import (
    CertquadError,
    DensityError,
    DomainError,
    EvaluationError,
    IntegrationError,
    InvalidBoundsError,
    ParseError,
)
from .expr import Jet3, eval_jet, evaluate, parse, to_text
from .function_model import (
    BUILTINS,
    FunctionBundle,
    SecondDerivBounds,
    SmoothnessConstants,
    compute_constants,
    estimate_second_deriv_bounds,
    resolve_function,
)
from .kernel import Interval
from .point_estimates import PointEstimate, Theorem, all_estimates, best_estimate
from .probability import DensityModel, ExpectationBracket, expectation_bracket, expectation_reference
from .reference import ReferenceIntegral, reference_integral

__version__ = "0.1.0"

__all__ = [
    "BUILTINS",
    "CertquadError",
    "DensityError",
    "DensityModel",
    "DomainError",
    "EvaluationError",
    "ExpectationBracket",
    "FunctionBundle",
    "IntegrationError",
    "Interval",
    "InvalidBoundsError",
    "Jet3",
    "ParseError",
    "Partition",
    "PointEstimate",
    "QuadratureResult",
    "ReferenceIntegral",
    "SecondDerivBounds",
    "SmoothnessConstants",
    "Theorem",
    "all_estimates",
    "best_estimate",
    "compute_constants",
    "estimate_second_deriv_bounds",
    "eval_jet",
    "evaluate",
    "expectation_bracket",
    "expectation_reference",
    "integrate",
    "integrate_to_tolerance",
    "parse",
    "q1",
    "q2",
    "quarter_point_sum",
    "reference_integral",
    "resolve_function",
    "to_text",
    "trapezoid",
    "tree_sum",
]
