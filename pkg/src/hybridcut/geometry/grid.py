"""Uniform background grids and the active meshes a region cuts out of them.

A cell is active for a region when their intersection has positive measure
(area for bulk polygons, length for skeleton polylines); touching at a point
or along a zero-measure set does not activate a cell. Ghost faces are the
interior faces of the active mesh used by the stabilization forms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .partition import SkeletonComponent
from .polygon import (
    GeometryError,
    as_vertex_array,
    clip_polygon,
    clip_segment_to_convex,
    polygon_area,
)

# containment tolerance relative to the domain extent
POINT_TOL = 1e-12


class CellStatus(enum.IntEnum):
    INSIDE = 0
    CUT = 1


@dataclass(frozen=True)
class BulkRegion:
    polygon: np.ndarray
    index: int = 0


@dataclass(frozen=True)
class SkeletonRegion:
    points: np.ndarray
    index: int = 0

    @staticmethod
    def from_component(comp: SkeletonComponent, index: int = 0) -> "SkeletonRegion":
        return SkeletonRegion(points=comp.points, index=index)


@dataclass(frozen=True)
class GhostFace:
    """Interior face shared by exactly two active cells.

    The normal has a fixed sign chosen from the lattice ordering of the face
    endpoints, so face sets and orientations do not depend on the order in
    which cells or regions are processed.
    """

    cells: tuple[int, int]
    p0: np.ndarray
    p1: np.ndarray
    normal: np.ndarray

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.p1 - self.p0))


@dataclass(frozen=True)
class BackgroundGrid:
    """Axis-aligned uniform grid, optionally split into triangles.

    Quad cells are numbered row major; with ``cell_type='tri'`` every quad
    splits into two triangles along its main diagonal (lower triangle first).
    """

    origin: tuple[float, float] = (0.0, 0.0)
    extent: tuple[float, float] = (1.0, 1.0)
    nx: int = 1
    ny: int = 1
    cell_type: str = "quad"

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise GeometryError("grid needs at least one cell per direction")
        if self.cell_type not in ("quad", "tri"):
            raise GeometryError(f"unknown cell_type {self.cell_type!r}")
        if abs(self.hx - self.hy) > 1e-12 * self.hx:
            raise GeometryError("grid cells must be square (hx == hy)")

    @property
    def hx(self) -> float:
        return self.extent[0] / self.nx

    @property
    def hy(self) -> float:
        return self.extent[1] / self.ny

    @property
    def h(self) -> float:
        return self.hx

    @property
    def n_cells(self) -> int:
        per_quad = 2 if self.cell_type == "tri" else 1
        return self.nx * self.ny * per_quad

    def quad_of(self, cell_id: int) -> tuple[int, int]:
        q = cell_id // 2 if self.cell_type == "tri" else cell_id
        return q % self.nx, q // self.nx

    def corner(self, ix: int, iy: int) -> np.ndarray:
        return np.array([self.origin[0] + ix * self.hx, self.origin[1] + iy * self.hy])

    def corner_id(self, ix: int, iy: int) -> int:
        return iy * (self.nx + 1) + ix

    def cell_corner_indices(self, cell_id: int) -> list[tuple[int, int]]:
        ix, iy = self.quad_of(cell_id)
        quad = [(ix, iy), (ix + 1, iy), (ix + 1, iy + 1), (ix, iy + 1)]
        if self.cell_type == "quad":
            return quad
        if cell_id % 2 == 0:
            return [quad[0], quad[1], quad[2]]
        return [quad[0], quad[2], quad[3]]

    def cell_vertices(self, cell_id: int) -> np.ndarray:
        return np.array([self.corner(ix, iy) for ix, iy in self.cell_corner_indices(cell_id)])

    def cell_bounds(self, cell_id: int) -> tuple[np.ndarray, np.ndarray]:
        ix, iy = self.quad_of(cell_id)
        return self.corner(ix, iy), self.corner(ix + 1, iy + 1)

    def _quad_range(self, lo, hi) -> tuple[int, int, int, int]:
        # widen by one cell so boxes degenerate onto grid lines still see
        # their neighbors; callers filter by actual intersection tests
        ix0 = max(0, int(np.floor((lo[0] - self.origin[0]) / self.hx)) - 1)
        iy0 = max(0, int(np.floor((lo[1] - self.origin[1]) / self.hy)) - 1)
        ix1 = min(self.nx - 1, int(np.ceil((hi[0] - self.origin[0]) / self.hx)) + 1)
        iy1 = min(self.ny - 1, int(np.ceil((hi[1] - self.origin[1]) / self.hy)) + 1)
        return ix0, ix1, iy0, iy1

    def cells_overlapping_box(self, lo, hi):
        ix0, ix1, iy0, iy1 = self._quad_range(np.asarray(lo), np.asarray(hi))
        for iy in range(iy0, iy1 + 1):
            for ix in range(ix0, ix1 + 1):
                q = iy * self.nx + ix
                if self.cell_type == "tri":
                    yield 2 * q
                    yield 2 * q + 1
                else:
                    yield q

    def cells_containing(self, point) -> list[int]:
        """Cell ids whose closed cell contains the point (several when the
        point sits on a grid line or diagonal)."""
        p = np.asarray(point, dtype=float)
        tol = POINT_TOL * max(self.extent)
        out = []
        for q in self.cells_overlapping_box(p - tol, p + tol):
            if self._contains(q, p, tol):
                out.append(q)
        return out

    def _contains(self, cell_id: int, p: np.ndarray, tol: float) -> bool:
        lo, hi = self.cell_bounds(cell_id)
        if not (lo[0] - tol <= p[0] <= hi[0] + tol and lo[1] - tol <= p[1] <= hi[1] + tol):
            return False
        if self.cell_type == "quad":
            return True
        v = self.cell_vertices(cell_id)
        for k in range(3):
            a, b = v[k], v[(k + 1) % 3]
            cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
            if cross < -tol * self.h:
                return False
        return True

    def domain_lo(self) -> np.ndarray:
        return np.asarray(self.origin, dtype=float)

    def domain_hi(self) -> np.ndarray:
        return np.asarray(self.origin, dtype=float) + np.asarray(self.extent, dtype=float)


@dataclass(frozen=True)
class ActiveMesh:
    """Cells of a background grid with positive-measure region intersection."""

    grid: BackgroundGrid
    region: BulkRegion | SkeletonRegion
    cells: np.ndarray  # sorted cell ids
    status: np.ndarray  # CellStatus per cell
    ghost_faces: list[GhostFace]
    _local: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "_local", {int(c): k for k, c in enumerate(self.cells)})

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def local_index(self, cell_id: int) -> int:
        return self._local[int(cell_id)]

    def is_active(self, cell_id: int) -> bool:
        return int(cell_id) in self._local

    def locate(self, point, bias=None) -> int:
        """Active cell containing the point; ties on grid lines are resolved
        toward the cell that also contains ``point + eps*bias``, else toward
        the lowest cell id."""
        candidates = [c for c in self.grid.cells_containing(point) if self.is_active(c)]
        if not candidates:
            raise GeometryError(f"point {point} is not in any active cell")
        if len(candidates) == 1:
            return candidates[0]
        if bias is not None:
            probe = np.asarray(point, dtype=float) + 1e-3 * self.grid.h * np.asarray(bias)
            inside = [c for c in candidates if self.grid._contains(c, probe, 0.0)]
            if inside:
                return min(inside)
        return min(candidates)

    def ghost_face_keys(self) -> set[tuple[int, int]]:
        return {f.cells for f in self.ghost_faces}


def build_active_mesh(grid: BackgroundGrid, region: BulkRegion | SkeletonRegion) -> ActiveMesh:
    """Collect cells with positive-measure region intersection plus the ghost
    faces of the stabilization forms.

    Bulk regions: ghost faces are interior faces with at least one adjacent
    cell cut by the region boundary. Skeleton regions: every active cell is
    cut, so all interior faces are ghost faces.
    """
    if isinstance(region, BulkRegion):
        cells, status = _active_bulk(grid, region.polygon)
    elif isinstance(region, SkeletonRegion):
        cells, status = _active_skeleton(grid, region.points)
    else:
        raise TypeError(f"unsupported region {type(region)!r}")
    if len(cells) == 0:
        raise GeometryError("region does not activate any cell")
    ghost = _ghost_faces(grid, cells, status)
    return ActiveMesh(grid=grid, region=region, cells=cells, status=status, ghost_faces=ghost)


def _check_in_grid(grid: BackgroundGrid, lo, hi) -> None:
    tol = POINT_TOL * max(grid.extent)
    glo, ghi = grid.domain_lo(), grid.domain_hi()
    if np.any(lo < glo - tol) or np.any(hi > ghi + tol):
        raise GeometryError("region extends outside the background grid")


def _active_bulk(grid: BackgroundGrid, polygon) -> tuple[np.ndarray, np.ndarray]:
    poly = as_vertex_array(polygon)
    _check_in_grid(grid, poly.min(axis=0), poly.max(axis=0))
    cells, status = [], []
    area_tol = 1e-12
    for c in grid.cells_overlapping_box(poly.min(axis=0), poly.max(axis=0)):
        cell_poly = grid.cell_vertices(c)
        cell_area = polygon_area(cell_poly)
        area = sum(polygon_area(p) for p in clip_polygon(cell_poly, poly))
        if area <= area_tol * cell_area:
            continue
        cells.append(c)
        status.append(CellStatus.INSIDE if area >= (1.0 - area_tol) * cell_area else CellStatus.CUT)
    return np.array(sorted(cells), dtype=int), np.array(
        [s for _, s in sorted(zip(cells, status))], dtype=int
    )


def _active_skeleton(grid: BackgroundGrid, points) -> tuple[np.ndarray, np.ndarray]:
    pts = np.asarray(points, dtype=float)
    _check_in_grid(grid, pts.min(axis=0), pts.max(axis=0))
    length_tol = 1e-12 * grid.h
    active: set[int] = set()
    for k in range(len(pts) - 1):
        p0, p1 = pts[k], pts[k + 1]
        lo = np.minimum(p0, p1)
        hi = np.maximum(p0, p1)
        seg_len = float(np.linalg.norm(p1 - p0))
        for c in grid.cells_overlapping_box(lo, hi):
            interval = clip_segment_to_convex(p0, p1, grid.cell_vertices(c))
            if interval is None:
                continue
            t0, t1 = interval
            if (t1 - t0) * seg_len > length_tol:
                active.add(c)
    cells = np.array(sorted(active), dtype=int)
    return cells, np.full(len(cells), CellStatus.CUT, dtype=int)


def _ghost_faces(grid: BackgroundGrid, cells: np.ndarray, status: np.ndarray) -> list[GhostFace]:
    by_face: dict[tuple[int, int], list[int]] = {}
    for c in cells:
        corners = grid.cell_corner_indices(int(c))
        ids = [grid.corner_id(ix, iy) for ix, iy in corners]
        for k in range(len(ids)):
            a, b = ids[k], ids[(k + 1) % len(ids)]
            key = (a, b) if a < b else (b, a)
            by_face.setdefault(key, []).append(int(c))

    cut = {int(c) for c, s in zip(cells, status) if s == CellStatus.CUT}
    n1 = grid.nx + 1
    faces = []
    for (va, vb), owners in sorted(by_face.items()):
        if len(owners) != 2:
            continue
        if not (owners[0] in cut or owners[1] in cut):
            continue
        p0 = grid.corner(va % n1, va // n1)
        p1 = grid.corner(vb % n1, vb // n1)
        d = p1 - p0
        normal = np.array([-d[1], d[0]]) / np.linalg.norm(d)
        faces.append(GhostFace(cells=(min(owners), max(owners)), p0=p0, p1=p1, normal=normal))
    return faces
