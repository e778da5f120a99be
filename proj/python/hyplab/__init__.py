"""Numerical laboratory for exponential dichotomies of 1-periodic
first-order hyperbolic systems.

The heavy lifting lives in the compiled extension ``_hyplab``; this package
re-exports its public surface.
"""

from ._hyplab import (  # noqa: F401
    EvalDomainError,
    Expr,
    ExprParseError,
    PicardError,
    SingularSystemError,
    System,
    SystemValidationError,
    bounded_solution,
    check_contraction,
    check_decaying_coupling,
    check_smallness,
    check_uniqueness,
    detect_dichotomy,
    evolve,
    extrema,
    parse_expr,
    reduce_second_order,
    trichotomy_const_check,
    validate,
)

__all__ = [
    "EvalDomainError",
    "Expr",
    "ExprParseError",
    "PicardError",
    "SingularSystemError",
    "System",
    "SystemValidationError",
    "bounded_solution",
    "check_contraction",
    "check_decaying_coupling",
    "check_smallness",
    "check_uniqueness",
    "detect_dichotomy",
    "evolve",
    "extrema",
    "parse_expr",
    "reduce_second_order",
    "trichotomy_const_check",
    "validate",
]

__version__ = "0.1.0"
