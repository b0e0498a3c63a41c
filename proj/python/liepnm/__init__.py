"""Exact Bayesian solver for ODEs with solvable Lie symmetry."""

from ._liepnm import (
    ConfigError,
    DomainError,
    Error,
    Expression,
    InfeasibleError,
    ParseError,
    StageError,
    commutators,
    parse,
    reference_first_order,
    reference_second_order,
    sample_tmg,
    solve_first_order,
    solve_second_order,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "Error",
    "Expression",
    "InfeasibleError",
    "ParseError",
    "StageError",
    "commutators",
    "parse",
    "reference_first_order",
    "reference_second_order",
    "sample_tmg",
    "solve_first_order",
    "solve_second_order",
]
