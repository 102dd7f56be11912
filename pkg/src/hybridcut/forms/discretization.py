"""Discretization container: grids, active meshes, spaces, and the cached
cut geometry (cell integration domains and subdivided boundary legs) that
assembly and error evaluation share.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry.grid import (
    ActiveMesh,
    BackgroundGrid,
    BulkRegion,
    CellStatus,
    SkeletonRegion,
    build_active_mesh,
)
from ..geometry.partition import PolygonalPartition
from ..geometry.polygon import GeometryError, clip_polygon, triangulate_polygon
from ..geometry.quadrature import (
    QuadratureRule,
    segment_rule,
    tensor_rect_rule,
    triangle_rule,
)
from ..spaces.fespace import FESpace, SpaceMode, build_space
from .params import MethodParams

GLOBAL_GRID = "global_background_grid"
SINGLE_ELEMENT = "single_element_interfaces"


@dataclass(frozen=True)
class BoundarySegment:
    """A straight piece of a subdomain boundary inside one bulk cell.

    ``component`` is the skeleton component id, or None on the outer domain
    boundary. ``skel_cell`` locates the piece in the skeleton space of that
    component.
    """

    p0: np.ndarray
    p1: np.ndarray
    normal: np.ndarray
    component: int | None
    bulk_cell: int
    skel_cell: int | None

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.p1 - self.p0))

    def rule(self, order: int) -> QuadratureRule:
        return segment_rule(self.p0, self.p1, order)


@dataclass(frozen=True)
class SkeletonSegment:
    """A piece of a skeleton component inside one cell of its own space."""

    p0: np.ndarray
    p1: np.ndarray
    normal: np.ndarray
    skel_cell: int

    def rule(self, order: int) -> QuadratureRule:
        return segment_rule(self.p0, self.p1, order)


@dataclass
class Discretization:
    partition: PolygonalPartition
    mode: str
    params: MethodParams
    grids: list[BackgroundGrid]
    bulk_meshes: list[ActiveMesh]
    bulk_spaces: list[FESpace]
    skeleton_meshes: list[ActiveMesh | None]
    skeleton_spaces: list[FESpace]
    _cut_domains: dict = field(default_factory=dict, repr=False)
    _rules: dict = field(default_factory=dict, repr=False)
    _boundary: dict = field(default_factory=dict, repr=False)
    _skeleton_segs: dict = field(default_factory=dict, repr=False)

    # ----- dof layout: [skeleton components..., bulk subdomains...] -----

    @property
    def n_subdomains(self) -> int:
        return len(self.bulk_spaces)

    @property
    def n_components(self) -> int:
        return len(self.skeleton_spaces)

    @property
    def skel_offsets(self) -> list[int]:
        off, out = 0, []
        for s in self.skeleton_spaces:
            out.append(off)
            off += s.n_dofs
        return out

    @property
    def n_skel_dofs(self) -> int:
        return sum(s.n_dofs for s in self.skeleton_spaces)

    @property
    def bulk_offsets(self) -> list[int]:
        off, out = 0, []
        for s in self.bulk_spaces:
            out.append(off)
            off += s.n_dofs
        return out

    @property
    def n_bulk_dofs(self) -> int:
        return sum(s.n_dofs for s in self.bulk_spaces)

    @property
    def n_dofs(self) -> int:
        return self.n_skel_dofs + self.n_bulk_dofs

    def split(self, full: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """Split a full coefficient vector into per-component and
        per-subdomain pieces."""
        skel, bulk = [], []
        for off, s in zip(self.skel_offsets, self.skeleton_spaces):
            skel.append(full[off : off + s.n_dofs])
        base = self.n_skel_dofs
        for off, s in zip(self.bulk_offsets, self.bulk_spaces):
            bulk.append(full[base + off : base + off + s.n_dofs])
        return skel, bulk

    # ----- cached cut-cell integration domains -----

    def _cell_domain(self, i: int, local: int):
        """Integration domain of bulk cell ``local`` of subdomain i: either
        ('full', lo, hi) or ('tris', [triangles]) for cut cells."""
        key = (i, local)
        if key not in self._cut_domains:
            mesh = self.bulk_meshes[i]
            cell_id = int(mesh.cells[local])
            if mesh.status[local] == CellStatus.INSIDE and mesh.grid.cell_type == "quad":
                lo, hi = mesh.grid.cell_bounds(cell_id)
                self._cut_domains[key] = ("full", lo, hi)
            else:
                cell_poly = mesh.grid.cell_vertices(cell_id)
                if mesh.status[local] == CellStatus.INSIDE:
                    tris = triangulate_polygon(cell_poly)
                else:
                    pieces = clip_polygon(cell_poly, self.partition.subdomains[i])
                    tris = [t for piece in pieces for t in triangulate_polygon(piece)]
                if not tris:
                    raise GeometryError(f"active cell {cell_id} has empty cut domain")
                self._cut_domains[key] = ("tris", tris)
        return self._cut_domains[key]

    def bulk_rule(self, i: int, local: int, order: int) -> QuadratureRule:
        key = (i, local, order)
        if key not in self._rules:
            domain = self._cell_domain(i, local)
            if domain[0] == "full":
                rule = tensor_rect_rule(domain[1], domain[2], order)
            else:
                parts = [triangle_rule(t, order) for t in domain[1]]
                rule = QuadratureRule(
                    points=np.vstack([p.points for p in parts]),
                    weights=np.concatenate([p.weights for p in parts]),
                    order=order,
                )
            self._rules[key] = rule
        return self._rules[key]

    def bulk_quad_order(self, i: int) -> int:
        return self.params.quad_order_bulk or (2 * self.bulk_spaces[i].degree + 1)

    def interface_quad_order(self, i: int, j: int | None) -> int:
        if self.params.quad_order_segment:
            return self.params.quad_order_segment
        p = self.bulk_spaces[i].degree
        if j is not None:
            p = max(p, self.skeleton_spaces[j].degree)
        return 2 * p + 1

    # ----- boundary decomposition -----

    def boundary_segments(self, i: int) -> list[BoundarySegment]:
        """Pieces of the boundary of subdomain i, one bulk cell each, with
        outward normals and skeleton owner cells."""
        if i not in self._boundary:
            segs: list[BoundarySegment] = []
            mesh = self.bulk_meshes[i]
            for line, comp in self.partition.subdomain_boundary(i):
                for q0, q1, normal in line.legs():
                    for a, b in _subdivide_leg(mesh.grid, q0, q1):
                        mid = 0.5 * (a + b)
                        bulk_cell = mesh.locate(mid, bias=-normal)
                        skel_cell = None
                        if comp is not None:
                            skel_cell = self._locate_skeleton(comp, mid)
                        segs.append(
                            BoundarySegment(
                                p0=a, p1=b, normal=normal, component=comp,
                                bulk_cell=bulk_cell, skel_cell=skel_cell,
                            )
                        )
            self._boundary[i] = segs
        return self._boundary[i]

    def _locate_skeleton(self, comp: int, point: np.ndarray) -> int:
        smesh = self.skeleton_meshes[comp]
        if smesh is None:
            return 0
        try:
            return smesh.locate(point)
        except GeometryError as exc:
            raise GeometryError(
                f"boundary quadrature point {point} not locatable in skeleton component {comp}"
            ) from exc

    def skeleton_segments(self, j: int) -> list[SkeletonSegment]:
        """Pieces of skeleton component j, one skeleton cell each, for the
        along-interface stabilization and skeleton norms."""
        if j not in self._skeleton_segs:
            comp = self.partition.skeleton[j]
            smesh = self.skeleton_meshes[j]
            segs: list[SkeletonSegment] = []
            for k in range(len(comp.points) - 1):
                q0, q1 = comp.points[k], comp.points[k + 1]
                normal = comp.normals[k]
                if smesh is None:
                    segs.append(SkeletonSegment(p0=q0, p1=q1, normal=normal, skel_cell=0))
                    continue
                for a, b in _subdivide_leg(smesh.grid, q0, q1):
                    segs.append(
                        SkeletonSegment(
                            p0=a, p1=b, normal=normal,
                            skel_cell=smesh.locate(0.5 * (a + b)),
                        )
                    )
            self._skeleton_segs[j] = segs
        return self._skeleton_segs[j]


def _subdivide_leg(grid: BackgroundGrid, q0, q1) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a segment at every grid line (and diagonal for tri grids) so
    each piece lies in a single cell."""
    q0 = np.asarray(q0, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    d = q1 - q0
    seg_len = float(np.linalg.norm(d))
    if seg_len == 0.0:
        return []
    ts = {0.0, 1.0}
    for axis, (o, h, n) in enumerate(
        [(grid.origin[0], grid.hx, grid.nx), (grid.origin[1], grid.hy, grid.ny)]
    ):
        if d[axis] == 0.0:
            continue
        lo = min(q0[axis], q1[axis])
        hi = max(q0[axis], q1[axis])
        k0 = int(np.ceil((lo - o) / h)) - 1
        k1 = int(np.floor((hi - o) / h)) + 1
        for k in range(max(k0, 0), min(k1, n) + 1):
            t = (o + k * h - q0[axis]) / d[axis]
            if 0.0 < t < 1.0:
                ts.add(float(t))
    if grid.cell_type == "tri":
        # diagonals x - y = const through lattice corners
        ox, oy = grid.origin
        c0 = (q0[0] - ox) - (q0[1] - oy)
        c1 = (q1[0] - ox) - (q1[1] - oy)
        dc = c1 - c0
        if dc != 0.0:
            k0 = int(np.floor(min(c0, c1) / grid.h))
            k1 = int(np.ceil(max(c0, c1) / grid.h))
            for k in range(k0, k1 + 1):
                t = (k * grid.h - c0) / dc
                if 0.0 < t < 1.0:
                    ts.add(float(t))
    ts = sorted(ts)
    out = []
    min_len = 1e-13
    for ta, tb in zip(ts[:-1], ts[1:]):
        if (tb - ta) * seg_len > min_len * max(grid.h, seg_len):
            out.append((q0 + ta * d, q0 + tb * d))
    return out


def discretize(
    partition: PolygonalPartition,
    mode: str = GLOBAL_GRID,
    p: int = 1,
    p_skeleton: int | None = None,
    n: int = 8,
    params: MethodParams | None = None,
    cell_type: str = "quad",
    n_subdomain: list[int] | None = None,
) -> Discretization:
    """Build grids, active meshes, and spaces for a partition.

    In global-background-grid mode every mesh comes from one n-by-n grid.
    In single-element-interfaces mode the bulk meshes may use per-subdomain
    resolutions (``n_subdomain``) while each skeleton component carries a
    single tensor element of degree ``p_skeleton``.
    """
    if mode not in (GLOBAL_GRID, SINGLE_ELEMENT):
        raise ValueError(f"unknown mode {mode!r}")
    p_skel = p_skeleton if p_skeleton is not None else p
    params = params or MethodParams.default(p, p_skel)

    lo = partition.domain.min(axis=0)
    hi = partition.domain.max(axis=0)
    extent = hi - lo

    def make_grid(n_cells: int, ctype: str) -> BackgroundGrid:
        if abs(extent[0] - extent[1]) > 1e-12 * extent[0]:
            raise GeometryError("background grids require a square domain bounding box")
        return BackgroundGrid(
            origin=(float(lo[0]), float(lo[1])),
            extent=(float(extent[0]), float(extent[1])),
            nx=n_cells,
            ny=n_cells,
            cell_type=ctype,
        )

    if mode == GLOBAL_GRID:
        grid = make_grid(n, cell_type)
        grids = [grid] * partition.n_subdomains
    else:
        ns = n_subdomain or [n] * partition.n_subdomains
        if len(ns) != partition.n_subdomains:
            raise ValueError("n_subdomain must list one resolution per subdomain")
        grids = [make_grid(int(nc), cell_type) for nc in ns]

    bulk_meshes = [
        build_active_mesh(grids[i], BulkRegion(poly, i))
        for i, poly in enumerate(partition.subdomains)
    ]
    bulk_spaces = [build_space(m, None, p, SpaceMode.BULK) for m in bulk_meshes]

    skeleton_meshes: list[ActiveMesh | None] = []
    skeleton_spaces: list[FESpace] = []
    for j, comp in enumerate(partition.skeleton):
        if mode == GLOBAL_GRID:
            smesh = build_active_mesh(grids[0], SkeletonRegion.from_component(comp, j))
            skeleton_meshes.append(smesh)
            skeleton_spaces.append(build_space(smesh, None, p_skel, SpaceMode.SKELETON_TRACE))
        else:
            skeleton_meshes.append(None)
            skeleton_spaces.append(
                build_space(comp, None, p_skel, SpaceMode.SKELETON_SINGLE_ELEMENT)
            )

    return Discretization(
        partition=partition,
        mode=mode,
        params=params,
        grids=grids,
        bulk_meshes=bulk_meshes,
        bulk_spaces=bulk_spaces,
        skeleton_meshes=skeleton_meshes,
        skeleton_spaces=skeleton_spaces,
    )
