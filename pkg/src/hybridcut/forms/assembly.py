"""Assembly of the hybridized system: bulk stiffness, interface coupling
with weak (Nitsche-type) enforcement, ghost-penalty stabilization, loads.

Blocks follow the dof layout [skeleton components..., bulk subdomains...].
Subdomains couple only through the skeleton, so bulk-bulk cross blocks do
not exist. All local matrices are built symmetric, which keeps the global
matrix bitwise symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..geometry.grid import CellStatus
from ..geometry.quadrature import segment_rule
from .discretization import Discretization


class Triplets:
    """COO accumulator; duplicate entries sum on conversion."""

    def __init__(self, shape: tuple[int, int]):
        self.shape = shape
        self.rows: list[np.ndarray] = []
        self.cols: list[np.ndarray] = []
        self.vals: list[np.ndarray] = []

    def add_dense(self, rdofs, cdofs, K) -> None:
        rdofs = np.asarray(rdofs, dtype=int)
        cdofs = np.asarray(cdofs, dtype=int)
        self.rows.append(np.repeat(rdofs, len(cdofs)))
        self.cols.append(np.tile(cdofs, len(rdofs)))
        self.vals.append(np.asarray(K, dtype=float).ravel())

    def extend(self, other: "Triplets") -> None:
        self.rows.extend(other.rows)
        self.cols.extend(other.cols)
        self.vals.extend(other.vals)

    def to_csr(self) -> sp.csr_matrix:
        if not self.rows:
            return sp.csr_matrix(self.shape)
        mat = sp.coo_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=self.shape,
        )
        return mat.tocsr()


def assemble_bulk_stiffness(disc: Discretization, i: int) -> Triplets:
    """(a_i grad v, grad w) over the physical part of subdomain i."""
    space = disc.bulk_spaces[i]
    a = disc.partition.coefficients[i]
    order = disc.bulk_quad_order(i)
    acc = Triplets((space.n_dofs, space.n_dofs))
    cache: dict = {}
    mesh = disc.bulk_meshes[i]
    for local in range(space.n_cells):
        key = None
        if mesh.status[local] == CellStatus.INSIDE:
            key = int(mesh.cells[local]) % 2 if mesh.grid.cell_type == "tri" else 0
        if key is not None and key in cache:
            acc.add_dense(space.cell_dofs[local], space.cell_dofs[local], cache[key])
            continue
        rule = disc.bulk_rule(i, local, order)
        grads = space.basis_gradients(local, rule.points)
        K = a * np.einsum("pbd,pcd,p->bc", grads, grads, rule.weights)
        if key is not None:
            cache[key] = K
        acc.add_dense(space.cell_dofs[local], space.cell_dofs[local], K)
    return acc


def assemble_load(disc: Discretization, i: int, f) -> np.ndarray:
    """(f, v) over the physical part of subdomain i."""
    space = disc.bulk_spaces[i]
    order = disc.bulk_quad_order(i)
    out = np.zeros(space.n_dofs)
    for local in range(space.n_cells):
        rule = disc.bulk_rule(i, local, order)
        vals = space.basis_values(local, rule.points)
        fv = np.broadcast_to(
            np.asarray(f(rule.points[:, 0], rule.points[:, 1]), dtype=float), (len(rule.points),)
        )
        out[space.cell_dofs[local]] += vals.T @ (rule.weights * fv)
    return out


def assemble_nitsche(disc: Discretization, i: int) -> tuple[Triplets, Triplets, Triplets]:
    """Consistency, symmetry, and penalty terms over the boundary of
    subdomain i.

    Couples the bulk space to the adjacent skeleton spaces on internal
    pieces; on the outer boundary the skeleton trace is zero, which imposes
    the homogeneous Dirichlet condition weakly. Returns (bulk-bulk,
    skeleton-bulk, skeleton-skeleton) contributions, skeleton rows in
    component-concatenated numbering.
    """
    space = disc.bulk_spaces[i]
    a = disc.partition.coefficients[i]
    beta_h = disc.params.beta / disc.grids[i].h * a
    acc_ii = Triplets((space.n_dofs, space.n_dofs))
    acc_0i = Triplets((disc.n_skel_dofs, space.n_dofs))
    acc_00 = Triplets((disc.n_skel_dofs, disc.n_skel_dofs))

    for seg in disc.boundary_segments(i):
        rule = seg.rule(disc.interface_quad_order(i, seg.component))
        w = rule.weights
        local = space.local_cell(seg.bulk_cell)
        bdofs = space.cell_dofs[local]
        phi = space.basis_values(local, rule.points)
        grads = space.basis_gradients(local, rule.points)
        flux = a * np.einsum("pbd,d->pb", grads, seg.normal)  # n . a grad phi

        M = phi.T @ (w[:, None] * flux)  # (b_test, b_trial) of phi_r flux_c
        P = phi.T @ (w[:, None] * phi)
        acc_ii.add_dense(bdofs, bdofs, -M - M.T + beta_h * P)

        if seg.component is not None:
            sspace = disc.skeleton_spaces[seg.component]
            soff = disc.skel_offsets[seg.component]
            slocal = sspace.local_cell(seg.skel_cell) if sspace.mesh is not None else 0
            psi = sspace.basis_values(slocal, rule.points)
            sdofs = sspace.cell_dofs[slocal] + soff
            K0i = psi.T @ (w[:, None] * flux) - beta_h * psi.T @ (w[:, None] * phi)
            acc_0i.add_dense(sdofs, bdofs, K0i)
            acc_00.add_dense(sdofs, sdofs, beta_h * psi.T @ (w[:, None] * psi))
    return acc_ii, acc_0i, acc_00


def assemble_ghost_penalty_bulk(disc: Discretization, i: int) -> Triplets:
    """Normal-derivative jump penalty on the interior faces near the cut
    boundary of subdomain i: sum_l c_l h^(2l-1) ([D_n^l v], [D_n^l w])."""
    space = disc.bulk_spaces[i]
    mesh = disc.bulk_meshes[i]
    h = space.stab_h
    p = space.degree
    acc = Triplets((space.n_dofs, space.n_dofs))
    if not disc.params.c_bulk or all(c == 0.0 for c in disc.params.c_bulk[:p]):
        return acc
    for face in mesh.ghost_faces:
        rule = segment_rule(face.p0, face.p1, 2 * p)
        la, lb = space.local_cell(face.cells[0]), space.local_cell(face.cells[1])
        dofs = np.concatenate([space.cell_dofs[la], space.cell_dofs[lb]])
        K = np.zeros((len(dofs), len(dofs)))
        for l in range(1, p + 1):
            c = disc.params.c_bulk[l - 1]
            if c == 0.0:
                continue
            da = space.basis_directional(la, rule.points, face.normal, l)
            db = space.basis_directional(lb, rule.points, face.normal, l)
            jump = np.hstack([da, -db])
            K += c * h ** (2 * l - 1) * jump.T @ (rule.weights[:, None] * jump)
        acc.add_dense(dofs, dofs, K)
    return acc


def assemble_skeleton_stabilization(disc: Discretization, j: int) -> Triplets:
    """Stabilization of skeleton component j: normal-derivative terms along
    the interface plus derivative-jump terms on interior faces of its mesh.

    Rows/cols are in component-concatenated skeleton numbering. In
    single-element mode the face sum is empty and the length scale is the
    element's normal extent.
    """
    space = disc.skeleton_spaces[j]
    off = disc.skel_offsets[j]
    h = space.stab_h
    p = space.degree
    acc = Triplets((disc.n_skel_dofs, disc.n_skel_dofs))
    if not disc.params.c_skel or all(c == 0.0 for c in disc.params.c_skel[:p]):
        return acc

    order = 2 * p
    for seg in disc.skeleton_segments(j):
        rule = seg.rule(order)
        local = space.local_cell(seg.skel_cell) if space.mesh is not None else 0
        dofs = space.cell_dofs[local] + off
        K = np.zeros((len(dofs), len(dofs)))
        for l in range(1, p + 1):
            c = disc.params.c_skel[l - 1]
            if c == 0.0:
                continue
            dv = space.basis_directional(local, rule.points, seg.normal, l)
            K += c * h ** (2 * l) * dv.T @ (rule.weights[:, None] * dv)
        acc.add_dense(dofs, dofs, K)

    if space.mesh is not None:
        for face in space.mesh.ghost_faces:
            rule = segment_rule(face.p0, face.p1, order)
            la, lb = space.local_cell(face.cells[0]), space.local_cell(face.cells[1])
            dofs = np.concatenate([space.cell_dofs[la], space.cell_dofs[lb]]) + off
            K = np.zeros((len(dofs), len(dofs)))
            for l in range(1, p + 1):
                c = disc.params.c_skel[l - 1]
                if c == 0.0:
                    continue
                da = space.basis_directional(la, rule.points, face.normal, l)
                db = space.basis_directional(lb, rule.points, face.normal, l)
                jump = np.hstack([da, -db])
                K += c * h ** (2 * l) * jump.T @ (rule.weights[:, None] * jump)
            acc.add_dense(dofs, dofs, K)
    return acc


@dataclass
class BlockSystem:
    """Assembled blocks of the symmetric system.

    ``A0i[i]`` couples the concatenated skeleton dofs to bulk subdomain i;
    its transpose is used implicitly, so global symmetry is structural.
    """

    disc: Discretization
    A00: sp.csr_matrix
    A0i: list[sp.csr_matrix]
    Aii: list[sp.csr_matrix]
    load_bulk: list[np.ndarray]
    _full: sp.csr_matrix | None = field(default=None, repr=False)

    @property
    def n_skel(self) -> int:
        return self.A00.shape[0]

    @property
    def n_dofs(self) -> int:
        return self.n_skel + sum(A.shape[0] for A in self.Aii)

    @property
    def load_skel(self) -> np.ndarray:
        return np.zeros(self.n_skel)

    def full_matrix(self) -> sp.csr_matrix:
        if self._full is None:
            n = len(self.Aii)
            blocks = [[None] * (n + 1) for _ in range(n + 1)]
            blocks[0][0] = self.A00
            for i in range(n):
                blocks[0][i + 1] = self.A0i[i]
                blocks[i + 1][0] = self.A0i[i].T
                blocks[i + 1][i + 1] = self.Aii[i]
            self._full = sp.bmat(blocks, format="csr")
        return self._full

    def full_vector(self) -> np.ndarray:
        return np.concatenate([self.load_skel] + self.load_bulk)

    def residual(self, u: np.ndarray) -> np.ndarray:
        return self.full_vector() - self.full_matrix() @ u


def assemble(disc: Discretization, rhs) -> BlockSystem:
    """Assemble the full block system for right-hand sides ``rhs`` (one
    callable per subdomain, or a single callable/constant for all)."""
    rhs_list = _rhs_list(disc.n_subdomains, rhs)

    acc00 = Triplets((disc.n_skel_dofs, disc.n_skel_dofs))
    A0i, Aii, loads = [], [], []
    for i in range(disc.n_subdomains):
        acc_ii = assemble_bulk_stiffness(disc, i)
        nit_ii, nit_0i, nit_00 = assemble_nitsche(disc, i)
        acc_ii.extend(nit_ii)
        acc_ii.extend(assemble_ghost_penalty_bulk(disc, i))
        acc00.extend(nit_00)
        Aii.append(acc_ii.to_csr())
        A0i.append(nit_0i.to_csr())
        loads.append(assemble_load(disc, i, rhs_list[i]))
    for j in range(disc.n_components):
        acc00.extend(assemble_skeleton_stabilization(disc, j))

    return BlockSystem(disc=disc, A00=acc00.to_csr(), A0i=A0i, Aii=Aii, load_bulk=loads)


def _rhs_list(n: int, rhs) -> list:
    if callable(rhs):
        return [rhs] * n
    if np.isscalar(rhs):
        value = float(rhs)
        return [lambda x, y, v=value: np.full_like(np.asarray(x, dtype=float), v)] * n
    out = []
    for f in rhs:
        if callable(f):
            out.append(f)
        else:
            value = float(f)
            out.append(lambda x, y, v=value: np.full_like(np.asarray(x, dtype=float), v))
    if len(out) != n:
        raise ValueError(f"need {n} right-hand sides, got {len(out)}")
    return out
