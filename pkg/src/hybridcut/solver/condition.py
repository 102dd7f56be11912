"""Extreme eigenvalues and condition number of the skeleton Schur matrix.

DENSE mode materializes the operator column by column and uses a symmetric
eigendecomposition; ITERATIVE mode runs power iteration for the largest and
inverse power iteration (with inner CG solves) for the smallest eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .schur import SchurOperator, SolverError, conjugate_gradient

DENSE_LIMIT = 2000


@dataclass(frozen=True)
class CondNumberReport:
    lambda_max: float
    lambda_min: float
    kappa: float
    h: float
    min_subdomain_diameter: float
    method: str

    def __post_init__(self):
        if not (self.lambda_max >= self.lambda_min > 0.0):
            raise SolverError(
                f"spectrum not positive: lambda_max={self.lambda_max!r}, "
                f"lambda_min={self.lambda_min!r}"
            )

    def to_dict(self) -> dict:
        return {
            "lambda_max": self.lambda_max,
            "lambda_min": self.lambda_min,
            "kappa": self.kappa,
            "h": self.h,
            "min_subdomain_diameter": self.min_subdomain_diameter,
            "method": self.method,
        }


def materialize(op: SchurOperator) -> np.ndarray:
    n = op.n
    S = np.empty((n, n))
    e = np.zeros(n)
    for k in range(n):
        e[k] = 1.0
        S[:, k] = op.apply(e)
        e[k] = 0.0
    return S


def _dense_extremes(op: SchurOperator) -> tuple[float, float]:
    S = materialize(op)
    evals = scipy.linalg.eigh(0.5 * (S + S.T), eigvals_only=True)
    return float(evals[-1]), float(evals[0])


def _power_iteration(apply_op, n: int, tol: float, maxiter: int, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(maxiter):
        w = apply_op(v)
        lam_new = float(v @ w)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            raise SolverError("power iteration hit the null space")
        v = w / nw
        if abs(lam_new - lam) <= tol * abs(lam_new):
            return lam_new
        lam = lam_new
    raise SolverError(f"power iteration did not converge in {maxiter} iterations")


def _inverse_power_iteration(op: SchurOperator, lam_max: float, tol: float, maxiter: int) -> float:
    rng = np.random.default_rng(1)
    v = rng.standard_normal(op.n)
    v /= np.linalg.norm(v)
    lam = np.inf
    inner_tol = min(1e-10, tol * 1e-3)
    for _ in range(maxiter):
        w, _ = conjugate_gradient(op.apply, v, inner_tol, maxiter=100 * op.n + 1000)
        nw = np.linalg.norm(w)
        v = w / nw
        lam_new = float(v @ op.apply(v))
        if abs(lam_new - lam) <= tol * abs(lam_new):
            return lam_new
        lam = lam_new
    raise SolverError(f"inverse power iteration did not converge in {maxiter} iterations")


def estimate_condition_number(
    op: SchurOperator,
    mode: str = "auto",
    h: float = float("nan"),
    min_diameter: float = float("nan"),
    tol: float = 1e-5,
) -> CondNumberReport:
    """Extreme eigenvalue estimates for the Schur matrix.

    ``mode`` is 'dense', 'iterative', or 'auto' (dense up to 2000 skeleton
    dofs). The iterative path falls back to dense when it stalls.
    """
    if mode not in ("auto", "dense", "iterative"):
        raise ValueError(f"unknown mode {mode!r}")
    if op.n == 0:
        raise SolverError("empty skeleton has no condition number")
    chosen = mode
    if mode == "auto":
        chosen = "dense" if op.n <= DENSE_LIMIT else "iterative"

    if chosen == "iterative":
        try:
            lam_max = _power_iteration(op.apply, op.n, tol, maxiter=20000)
            lam_min = _inverse_power_iteration(op, lam_max, tol, maxiter=2000)
            return CondNumberReport(
                lambda_max=lam_max,
                lambda_min=lam_min,
                kappa=lam_max / lam_min,
                h=h,
                min_subdomain_diameter=min_diameter,
                method="iterative",
            )
        except SolverError:
            if op.n > DENSE_LIMIT:
                raise
            chosen = "dense"

    lam_max, lam_min = _dense_extremes(op)
    return CondNumberReport(
        lambda_max=lam_max,
        lambda_min=lam_min,
        kappa=lam_max / lam_min,
        h=h,
        min_subdomain_diameter=min_diameter,
        method="dense",
    )


def smallest_eigenvalue_dense(matrix) -> float:
    """Smallest eigenvalue of a (sparse or dense) symmetric matrix, via a
    dense eigendecomposition; intended for small systems."""
    A = matrix.toarray() if hasattr(matrix, "toarray") else np.asarray(matrix)
    evals = scipy.linalg.eigh(0.5 * (A + A.T), eigvals_only=True)
    return float(evals[0])
