"""Solvers for the block system: a monolithic sparse factorization and the
skeleton Schur-complement path with per-subdomain factorizations.

The Schur operator is matrix-free: applying it solves one factorized system
per subdomain, so the bulk unknowns never enter the iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from ..forms.assembly import BlockSystem


class SolverError(RuntimeError):
    pass


class IndefiniteSystemError(SolverError):
    """Negative curvature encountered: the system is not positive definite
    (penalty parameter too small)."""


@dataclass
class SolveInfo:
    method: str
    iterations: int = 0
    residuals: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "iterations": self.iterations,
            "residuals": self.residuals,
        }


@dataclass
class SolveResult:
    u: np.ndarray
    info: SolveInfo


def solve_monolithic(system: BlockSystem, tol: float = 1e-12) -> SolveResult:
    """Direct sparse solve of the full system; the contract is the relative
    residual, checked after the fact."""
    A = system.full_matrix().tocsc()
    b = system.full_vector()
    if not np.any(b):
        return SolveResult(u=np.zeros(system.n_dofs), info=SolveInfo(method="monolithic"))
    lu = spla.splu(A)
    u = lu.solve(b)
    rel = np.linalg.norm(b - A @ u) / np.linalg.norm(b)
    if not np.isfinite(rel) or rel > tol * 100:
        raise SolverError(f"monolithic solve residual {rel:.3e} exceeds tolerance {tol:.1e}")
    return SolveResult(u=u, info=SolveInfo(method="monolithic"))


def conjugate_gradient(apply_op, b: np.ndarray, tol: float, maxiter: int) -> tuple[np.ndarray, SolveInfo]:
    """Plain CG with residual history; raises on negative curvature or
    non-convergence."""
    info = SolveInfo(method="cg")
    x = np.zeros_like(b)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return x, info
    r = b.copy()
    p = r.copy()
    rs = float(r @ r)
    info.residuals.append(np.sqrt(rs) / bnorm)
    for it in range(1, maxiter + 1):
        Ap = apply_op(p)
        curv = float(p @ Ap)
        if curv <= 0.0:
            raise IndefiniteSystemError(
                f"non-positive curvature {curv:.3e} at iteration {it}"
            )
        alpha = rs / curv
        x += alpha * p
        r -= alpha * Ap
        rs_new = float(r @ r)
        info.iterations = it
        info.residuals.append(np.sqrt(rs_new) / bnorm)
        if np.sqrt(rs_new) <= tol * bnorm:
            return x, info
        p = r + (rs_new / rs) * p
        rs = rs_new
    raise SolverError(
        f"cg did not reach tolerance {tol:.1e} in {maxiter} iterations "
        f"(last residual {info.residuals[-1]:.3e})"
    )


class SchurOperator:
    """Skeleton Schur complement S = A00 - sum_i A0i Aii^{-1} Ai0, applied
    matrix-free with one reusable factorization per subdomain."""

    def __init__(self, system: BlockSystem):
        self.system = system
        self.factorizations = []
        for i, Aii in enumerate(system.Aii):
            try:
                self.factorizations.append(spla.splu(Aii.tocsc()))
            except RuntimeError as exc:
                raise SolverError(f"bulk block {i} is singular: {exc}") from exc

    @property
    def n(self) -> int:
        return self.system.n_skel

    def apply_Th(self, v0: np.ndarray) -> list[np.ndarray]:
        """Bulk fields extending a skeleton field with zero bulk residual;
        each subdomain solves independently."""
        out = []
        for A0i, lu in zip(self.system.A0i, self.factorizations):
            out.append(lu.solve(-(A0i.T @ v0)))
        return out

    def apply(self, v0: np.ndarray) -> np.ndarray:
        y = self.system.A00 @ v0
        for A0i, lu in zip(self.system.A0i, self.factorizations):
            y -= A0i @ lu.solve(A0i.T @ v0)
        return y

    __call__ = apply

    def reduced_rhs(self) -> np.ndarray:
        g = self.system.load_skel.copy()
        for A0i, lu, li in zip(self.system.A0i, self.factorizations, self.system.load_bulk):
            g -= A0i @ lu.solve(li)
        return g

    def back_substitute(self, u0: np.ndarray) -> np.ndarray:
        """Full coefficient vector from the skeleton solution."""
        parts = [u0]
        for A0i, lu, li in zip(self.system.A0i, self.factorizations, self.system.load_bulk):
            parts.append(lu.solve(li - A0i.T @ u0))
        return np.concatenate(parts)

    def quadratic_form(self, v0: np.ndarray) -> float:
        return float(v0 @ self.apply(v0))


def solve_schur(
    system: BlockSystem,
    tol: float = 1e-12,
    maxiter: int | None = None,
    operator: SchurOperator | None = None,
) -> SolveResult:
    """Eliminate bulk unknowns, solve the skeleton system by CG, and
    back-substitute subdomain-wise."""
    op = operator if operator is not None else SchurOperator(system)
    if system.n_skel == 0:
        # no internal interfaces: the system is block diagonal over subdomains
        u = op.back_substitute(np.zeros(0))
        return SolveResult(u=u, info=SolveInfo(method="schur"))
    g = op.reduced_rhs()
    maxiter = maxiter or max(10 * system.n_skel, 1000)
    u0, info = conjugate_gradient(op.apply, g, tol, maxiter)
    info.method = "schur"
    return SolveResult(u=op.back_substitute(u0), info=info)
