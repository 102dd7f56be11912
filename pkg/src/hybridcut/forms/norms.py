"""Energy and L2 norms of discrete solutions and of errors against exact
per-subdomain fields.

The energy norm is the broken weighted H1 seminorm plus scaled boundary
gradient and interface jump terms,

    |||v|||^2 = sum_i  a_i |grad v_i|^2_{O_i}
              + h a_i |grad v_i|^2_{dO_i}
              + h^-1 a_i |v_i - v_0|^2_{dO_i},

with v_0 = 0 on the outer boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..spaces.fespace import FESpace
from .assembly import BlockSystem
from .discretization import Discretization


@dataclass(frozen=True)
class ExactSolution:
    """Exact fields as global formulas: per-subdomain values and gradients,
    plus the interface trace."""

    u: Sequence[Callable]
    grad: Sequence[Callable]  # each returns (gx, gy)
    u0: Callable | None = None

    def trace(self, x, y):
        if self.u0 is None:
            return np.zeros_like(np.asarray(x, dtype=float))
        return self.u0(x, y)


def _error_orders(disc: Discretization, i: int, j: int | None) -> tuple[int, int]:
    bulk = 2 * disc.bulk_spaces[i].degree + 3
    seg = disc.interface_quad_order(i, j) + 2
    return bulk, seg


def _eval_field(space: FESpace, local: int, coeffs: np.ndarray, pts: np.ndarray):
    c = coeffs[space.cell_dofs[local]]
    vals = space.basis_values(local, pts) @ c
    grads = np.einsum("pbd,b->pd", space.basis_gradients(local, pts), c)
    return vals, grads


def energy_error(disc: Discretization, full: np.ndarray, exact: ExactSolution | None = None) -> float:
    """|||u - u_h||| against exact fields, or |||u_h||| when exact is None."""
    skel, bulk = disc.split(full)
    total = 0.0
    for i in range(disc.n_subdomains):
        space = disc.bulk_spaces[i]
        a = disc.partition.coefficients[i]
        h = disc.grids[i].h
        order_bulk, order_seg = _error_orders(disc, i, None)

        for local in range(space.n_cells):
            rule = disc.bulk_rule(i, local, order_bulk)
            _, grads = _eval_field(space, local, bulk[i], rule.points)
            if exact is not None:
                gx, gy = exact.grad[i](rule.points[:, 0], rule.points[:, 1])
                grads = np.column_stack([gx, gy]) - grads
            total += a * float(rule.weights @ (grads**2).sum(axis=1))

        for seg in disc.boundary_segments(i):
            rule = seg.rule(order_seg)
            x, y = rule.points[:, 0], rule.points[:, 1]
            local = space.local_cell(seg.bulk_cell)
            vals, grads = _eval_field(space, local, bulk[i], rule.points)
            if seg.component is not None:
                sspace = disc.skeleton_spaces[seg.component]
                slocal = sspace.local_cell(seg.skel_cell) if sspace.mesh is not None else 0
                svals = sspace.basis_values(slocal, rule.points) @ (
                    skel[seg.component][sspace.cell_dofs[slocal]]
                )
            else:
                svals = np.zeros(len(x))
            jump = vals - svals
            if exact is not None:
                gx, gy = exact.grad[i](x, y)
                grads = np.column_stack([gx, gy]) - grads
                exact_jump = exact.u[i](x, y) - (exact.trace(x, y) if seg.component is not None else 0.0)
                jump = exact_jump - jump
            total += a * h * float(rule.weights @ (grads**2).sum(axis=1))
            total += a / h * float(rule.weights @ jump**2)
    return float(np.sqrt(total))


def energy_norm(disc: Discretization, full: np.ndarray) -> float:
    return energy_error(disc, full, exact=None)


def l2_errors(
    disc: Discretization, full: np.ndarray, exact: ExactSolution | None = None
) -> tuple[float, float]:
    """(bulk, skeleton) L2 errors; norms of u_h itself when exact is None."""
    skel, bulk = disc.split(full)
    bulk_sq = 0.0
    for i in range(disc.n_subdomains):
        space = disc.bulk_spaces[i]
        order_bulk, _ = _error_orders(disc, i, None)
        for local in range(space.n_cells):
            rule = disc.bulk_rule(i, local, order_bulk)
            vals, _ = _eval_field(space, local, bulk[i], rule.points)
            if exact is not None:
                vals = exact.u[i](rule.points[:, 0], rule.points[:, 1]) - vals
            bulk_sq += float(rule.weights @ vals**2)

    skel_sq = 0.0
    for j in range(disc.n_components):
        space = disc.skeleton_spaces[j]
        order = 2 * space.degree + 3
        for seg in disc.skeleton_segments(j):
            rule = seg.rule(order)
            local = space.local_cell(seg.skel_cell) if space.mesh is not None else 0
            vals = space.basis_values(local, rule.points) @ skel[j][space.cell_dofs[local]]
            if exact is not None:
                vals = exact.trace(rule.points[:, 0], rule.points[:, 1]) - vals
            skel_sq += float(rule.weights @ vals**2)
    return float(np.sqrt(bulk_sq)), float(np.sqrt(skel_sq))


def galerkin_residual(system: BlockSystem, u: np.ndarray) -> float:
    """max_phi |A(u_h, phi) - l(phi)| over all basis functions."""
    return float(np.abs(system.residual(u)).max())
