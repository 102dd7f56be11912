"""Continuous Lagrange spaces on active meshes and single-element skeleton
spaces, with global dof maps, evaluation, and nodal interpolation.

All cell geometry maps are affine, x = origin + B xi, so derivatives of any
order transform by contracting reference mixed partials with B^{-1}.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import comb

import numpy as np

from ..geometry.grid import ActiveMesh, BackgroundGrid
from ..geometry.partition import SkeletonComponent
from ..geometry.polygon import GeometryError
from .basis import ElementBasis

# roundoff in physical coordinates is amplified by the inverse map on very
# thin cells (single-element skeleton boxes), so the guard is loose
REF_TOL = 1e-5


class SpaceMode(enum.Enum):
    BULK = "bulk"
    SKELETON_TRACE = "skeleton_trace"
    SKELETON_SINGLE_ELEMENT = "skeleton_single_element"


@dataclass(frozen=True)
class CellMap:
    """Affine reference-to-physical map x = origin + B xi."""

    origin: np.ndarray
    B: np.ndarray
    Binv: np.ndarray

    def to_physical(self, ref: np.ndarray) -> np.ndarray:
        return self.origin + np.atleast_2d(ref) @ self.B.T

    def to_reference(self, phys: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(phys) - self.origin) @ self.Binv.T

    def ref_direction(self, d: np.ndarray) -> np.ndarray:
        return self.Binv @ np.asarray(d, dtype=float)


def _quad_cell_map(grid: BackgroundGrid, cell_id: int) -> CellMap:
    lo, hi = grid.cell_bounds(cell_id)
    B = np.diag(0.5 * (hi - lo))
    return CellMap(origin=0.5 * (lo + hi), B=B, Binv=np.diag(2.0 / (hi - lo)))


def _tri_cell_map(grid: BackgroundGrid, cell_id: int) -> CellMap:
    v = grid.cell_vertices(cell_id)
    B = np.column_stack([v[1] - v[0], v[2] - v[0]])
    return CellMap(origin=v[0].astype(float), B=B, Binv=np.linalg.inv(B))


@dataclass(frozen=True)
class FESpace:
    """Scalar continuous FE space.

    For grid-backed spaces dofs are identified on the refined node lattice
    of step h/p, which makes continuity exact by construction. The
    single-element mode spans one tensor element on the oriented bounding
    box of a skeleton component.
    """

    basis: ElementBasis
    mode: SpaceMode
    cell_maps: list[CellMap]
    cell_dofs: np.ndarray  # (n_cells, n_basis)
    n_dofs: int
    dof_coords: np.ndarray  # (n_dofs, 2)
    mesh: ActiveMesh | None = None
    stab_h: float = 0.0  # length scale for stabilization weights
    frame: tuple | None = field(default=None, repr=False)  # single-element (tangent, normal)

    @property
    def degree(self) -> int:
        return self.basis.degree

    @property
    def n_cells(self) -> int:
        return len(self.cell_maps)

    def local_cell(self, cell_id: int) -> int:
        if self.mesh is None:
            return 0
        return self.mesh.local_index(cell_id)

    def ref_points(self, local_cell: int, phys_pts: np.ndarray, check: bool = True) -> np.ndarray:
        ref = self.cell_maps[local_cell].to_reference(phys_pts)
        if check:
            if self.basis.family == "Q":
                bad = np.abs(ref).max() > 1.0 + REF_TOL
            else:
                bad = ref.min() < -REF_TOL or (ref[:, 0] + ref[:, 1]).max() > 1.0 + REF_TOL
            if bad:
                raise GeometryError("evaluation point outside cell")
        return ref

    def basis_values(self, local_cell: int, phys_pts: np.ndarray) -> np.ndarray:
        return self.basis.eval_ref(self.ref_points(local_cell, phys_pts))

    def basis_gradients(self, local_cell: int, phys_pts: np.ndarray) -> np.ndarray:
        """Physical gradients, shape (npts, n_basis, 2)."""
        ref = self.ref_points(local_cell, phys_pts)
        gx = self.basis.eval_ref(ref, 1, 0)
        gy = self.basis.eval_ref(ref, 0, 1)
        grad_ref = np.stack([gx, gy], axis=-1)
        return grad_ref @ self.cell_maps[local_cell].Binv

    def basis_directional(
        self, local_cell: int, phys_pts: np.ndarray, direction, order: int
    ) -> np.ndarray:
        """l-fold directional derivative of all basis functions along a unit
        physical direction; shape (npts, n_basis)."""
        ref = self.ref_points(local_cell, phys_pts, check=False)
        m = self.cell_maps[local_cell].ref_direction(direction)
        out = None
        for k in range(order + 1):
            c = comb(order, k) * m[0] ** (order - k) * m[1] ** k
            if c == 0.0:
                continue
            term = c * self.basis.eval_ref(ref, order - k, k)
            out = term if out is None else out + term
        return out if out is not None else np.zeros((len(np.atleast_2d(phys_pts)), self.basis.n_basis))


def evaluate(space: FESpace, coeffs: np.ndarray, cell_id: int, points, order: int = 0, direction=None):
    """Evaluate a FE function (or a derivative) at physical points in a cell.

    order 0 returns values; order 1 with no direction returns gradients
    (npts, 2); order >= 1 with a direction returns the contracted directional
    derivative of that order.
    """
    local = space.local_cell(cell_id)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    c = np.asarray(coeffs)[space.cell_dofs[local]]
    if order == 0:
        return space.basis_values(local, pts) @ c
    if direction is None:
        if order != 1:
            raise ValueError("derivative tensors above order 1 require a direction to contract")
        return np.einsum("pbd,b->pd", space.basis_gradients(local, pts), c)
    if order > space.degree:
        raise ValueError(f"derivative order {order} exceeds polynomial degree {space.degree}")
    return space.basis_directional(local, pts, direction, order) @ c


def interpolate_nodal(space: FESpace, f) -> np.ndarray:
    """Coefficients matching f at every Lagrange node of the space."""
    x, y = space.dof_coords[:, 0], space.dof_coords[:, 1]
    vals = f(x, y)
    return np.broadcast_to(np.asarray(vals, dtype=float), x.shape).copy()


def build_space(mesh, family: str | None = None, p: int = 1, mode: SpaceMode = SpaceMode.BULK) -> FESpace:
    """Build a space on an active mesh, or a single-element skeleton space
    when called with a skeleton component in SKELETON_SINGLE_ELEMENT mode."""
    if mode is SpaceMode.SKELETON_SINGLE_ELEMENT:
        if not isinstance(mesh, (SkeletonComponent, np.ndarray)):
            raise TypeError("single-element mode expects a skeleton component or polyline")
        points = mesh.points if isinstance(mesh, SkeletonComponent) else mesh
        if family not in (None, "Q"):
            raise ValueError("single-element skeleton spaces use the tensor family")
        return _build_single_element_space(points, p)

    if not isinstance(mesh, ActiveMesh):
        raise TypeError("grid-backed modes expect an ActiveMesh")
    grid_family = "Q" if mesh.grid.cell_type == "quad" else "P"
    if family is None:
        family = grid_family
    if family != grid_family:
        raise ValueError(f"family {family!r} unsupported on {mesh.grid.cell_type!r} grids")
    basis = ElementBasis(family, p)
    grid = mesh.grid

    # dof identification on the lattice of step h/p, in integer arithmetic
    keys_per_cell = []
    for c in mesh.cells:
        corners = np.asarray(grid.cell_corner_indices(int(c)), dtype=np.int64)
        if family == "Q":
            ix, iy = corners[0]
            keys = [
                (ix * p + a, iy * p + b) for b in range(p + 1) for a in range(p + 1)
            ]
        else:
            v0, v1, v2 = corners * p
            keys = [
                tuple(v0 + (v1 - v0) * i // p + (v2 - v0) * j // p)
                for j in range(p + 1)
                for i in range(p + 1 - j)
            ]
        keys_per_cell.append(keys)

    unique = sorted({k for keys in keys_per_cell for k in keys}, key=lambda k: (k[1], k[0]))
    number = {k: i for i, k in enumerate(unique)}
    cell_dofs = np.array([[number[k] for k in keys] for keys in keys_per_cell], dtype=int)

    step = grid.h / p
    origin = grid.domain_lo()
    dof_coords = np.array([[origin[0] + k[0] * step, origin[1] + k[1] * step] for k in unique])

    make_map = _quad_cell_map if family == "Q" else _tri_cell_map
    cell_maps = [make_map(grid, int(c)) for c in mesh.cells]

    return FESpace(
        basis=basis,
        mode=mode,
        cell_maps=cell_maps,
        cell_dofs=cell_dofs,
        n_dofs=len(unique),
        dof_coords=dof_coords,
        mesh=mesh,
        stab_h=grid.h,
    )


def _build_single_element_space(points: np.ndarray, p: int) -> FESpace:
    """One tensor Q_p element on the oriented bounding box of a polyline.

    The box is tight tangentially and inflated in the normal direction so
    straight segments still get a nondegenerate frame; the normal extent
    doubles as the stabilization length scale of the space.
    """
    pts = np.asarray(points, dtype=float)
    chord = pts[-1] - pts[0]
    ln = np.linalg.norm(chord)
    if ln == 0.0:
        raise GeometryError("skeleton component has zero chord length")
    tangent = chord / ln
    normal = np.array([-tangent[1], tangent[0]])
    s = pts @ tangent
    t = pts @ normal
    length = float(s.max() - s.min())
    inflate = 1e-8 * length
    width = float(t.max() - t.min()) + 2.0 * inflate
    center = (
        0.5 * (s.max() + s.min()) * tangent + 0.5 * (t.max() + t.min()) * normal
    )
    B = np.column_stack([tangent * 0.5 * length, normal * 0.5 * width])
    cmap = CellMap(origin=center, B=B, Binv=np.linalg.inv(B))
    basis = ElementBasis("Q", p)
    nodes = cmap.to_physical(basis.nodes_ref)
    return FESpace(
        basis=basis,
        mode=SpaceMode.SKELETON_SINGLE_ELEMENT,
        cell_maps=[cmap],
        cell_dofs=np.arange(basis.n_basis, dtype=int)[None, :],
        n_dofs=basis.n_basis,
        dof_coords=nodes,
        mesh=None,
        stab_h=width,
        frame=(tangent, normal),
    )
