"""Monolithic and Schur-complement solvers plus spectrum estimation."""

from .condition import (
    DENSE_LIMIT,
    CondNumberReport,
    estimate_condition_number,
    materialize,
    smallest_eigenvalue_dense,
)
from .schur import (
    IndefiniteSystemError,
    SchurOperator,
    SolveInfo,
    SolveResult,
    SolverError,
    conjugate_gradient,
    solve_monolithic,
    solve_schur,
)

__all__ = [
    "DENSE_LIMIT",
    "CondNumberReport",
    "IndefiniteSystemError",
    "SchurOperator",
    "SolveInfo",
    "SolveResult",
    "SolverError",
    "conjugate_gradient",
    "estimate_condition_number",
    "materialize",
    "smallest_eigenvalue_dense",
    "solve_monolithic",
    "solve_schur",
]
