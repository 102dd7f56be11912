"""Geometry layer: partitions, background grids, active meshes, quadrature."""

from .grid import (
    ActiveMesh,
    BackgroundGrid,
    BulkRegion,
    CellStatus,
    GhostFace,
    SkeletonRegion,
    build_active_mesh,
)
from .partition import (
    BoundaryPolyline,
    PartitionError,
    PartitionSpec,
    PolygonalPartition,
    SkeletonComponent,
    build_partition,
    extract_skeleton,
)
from .polygon import GeometryError
from .quadrature import (
    QuadratureRule,
    cut_cell_quadrature,
    gauss_1d,
    polygon_rule,
    segment_rule,
    skeleton_quadrature,
    tensor_rect_rule,
    triangle_rule,
)

__all__ = [
    "ActiveMesh",
    "BackgroundGrid",
    "BoundaryPolyline",
    "BulkRegion",
    "CellStatus",
    "GeometryError",
    "GhostFace",
    "PartitionError",
    "PartitionSpec",
    "PolygonalPartition",
    "QuadratureRule",
    "SkeletonComponent",
    "SkeletonRegion",
    "build_active_mesh",
    "build_partition",
    "cut_cell_quadrature",
    "extract_skeleton",
    "gauss_1d",
    "polygon_rule",
    "segment_rule",
    "skeleton_quadrature",
    "tensor_rect_rule",
    "triangle_rule",
]
