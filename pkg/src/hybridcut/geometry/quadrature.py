"""Quadrature rules on cells, clipped cells, and segments.

Rules carry physical coordinates and weights in physical units (area for 2D
rules, length for 1D rules along segments). Cut-cell rules are built by
clipping the cell against the subdomain polygon, triangulating the pieces,
and mapping a reference triangle rule of the requested exactness order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .polygon import (
    GeometryError,
    clip_polygon,
    clip_segment_to_convex,
    polygon_area,
    triangulate_polygon,
)


@dataclass(frozen=True)
class QuadratureRule:
    """Points in physical coordinates with positive weights.

    ``order`` is the total polynomial degree integrated exactly.
    """

    points: np.ndarray  # (n, 2) for area rules, (n, 2) along the segment for line rules
    weights: np.ndarray  # (n,)
    order: int

    def __post_init__(self):
        if np.any(self.weights <= 0.0):
            raise GeometryError("quadrature weights must be positive")

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())


@lru_cache(maxsize=None)
def gauss_1d(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1], exact to the given degree."""
    if order < 0:
        raise ValueError("order must be >= 0")
    npts = order // 2 + 1
    x, w = np.polynomial.legendre.leggauss(npts)
    return x, w


@lru_cache(maxsize=None)
def _reference_triangle_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Rule on the unit triangle {x>=0, y>=0, x+y<=1} via a collapsed square.

    The Duffy map (u, v) -> (u, v(1-u)) has Jacobian (1-u), so degree-d
    integrands become degree d+1 in u and d in v; both directions use Gauss
    rules of matching exactness.
    """
    xu, wu = gauss_1d(order + 1)
    xv, wv = gauss_1d(order)
    u = 0.5 * (xu + 1.0)
    v = 0.5 * (xv + 1.0)
    U, V = np.meshgrid(u, v, indexing="ij")
    WU, WV = np.meshgrid(wu, wv, indexing="ij")
    x = U
    y = V * (1.0 - U)
    w = 0.25 * WU * WV * (1.0 - U)
    pts = np.column_stack([x.ravel(), y.ravel()])
    return pts, w.ravel()


def triangle_rule(vertices, order: int) -> QuadratureRule:
    """Map the reference triangle rule affinely onto a physical triangle."""
    v = np.asarray(vertices, dtype=float)
    ref_pts, ref_w = _reference_triangle_rule(order)
    jac = abs(
        (v[1, 0] - v[0, 0]) * (v[2, 1] - v[0, 1])
        - (v[1, 1] - v[0, 1]) * (v[2, 0] - v[0, 0])
    )
    if jac == 0.0:
        raise GeometryError("degenerate triangle")
    pts = v[0] + ref_pts[:, :1] * (v[1] - v[0]) + ref_pts[:, 1:] * (v[2] - v[0])
    return QuadratureRule(points=pts, weights=ref_w * jac, order=order)


def tensor_rect_rule(lo, hi, order: int) -> QuadratureRule:
    """Tensor Gauss rule on an axis-aligned rectangle."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    x, wx = gauss_1d(order)
    X, Y = np.meshgrid(
        lo[0] + 0.5 * (x + 1.0) * (hi[0] - lo[0]),
        lo[1] + 0.5 * (x + 1.0) * (hi[1] - lo[1]),
        indexing="ij",
    )
    WX, WY = np.meshgrid(wx, wx, indexing="ij")
    scale = 0.25 * (hi[0] - lo[0]) * (hi[1] - lo[1])
    return QuadratureRule(
        points=np.column_stack([X.ravel(), Y.ravel()]),
        weights=(WX * WY).ravel() * scale,
        order=order,
    )


def polygon_rule(vertices, order: int) -> QuadratureRule:
    """Rule on a simple polygon by triangulation."""
    tris = triangulate_polygon(vertices)
    if not tris:
        raise GeometryError("cannot integrate over a zero-area polygon")
    parts = [triangle_rule(t, order) for t in tris]
    return QuadratureRule(
        points=np.vstack([p.points for p in parts]),
        weights=np.concatenate([p.weights for p in parts]),
        order=order,
    )


def cut_cell_quadrature(cell_vertices, polygon, order: int) -> QuadratureRule:
    """Quadrature on cell ∩ polygon, exact for total degree <= order.

    Raises GeometryError when the intersection has zero area; callers are
    expected to only request rules on active cells.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    pieces = clip_polygon(cell_vertices, polygon)
    area = sum(polygon_area(p) for p in pieces)
    if area <= 1e-14 * polygon_area(cell_vertices):
        raise GeometryError("cell/polygon intersection has zero area")
    parts = [polygon_rule(p, order) for p in pieces]
    return QuadratureRule(
        points=np.vstack([p.points for p in parts]),
        weights=np.concatenate([p.weights for p in parts]),
        order=order,
    )


def segment_rule(p0, p1, order: int) -> QuadratureRule:
    """1D Gauss rule along the segment p0->p1; weights carry length units."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    length = float(np.linalg.norm(p1 - p0))
    if length == 0.0:
        raise GeometryError("zero-length segment")
    x, w = gauss_1d(order)
    t = 0.5 * (x + 1.0)
    pts = p0 + t[:, None] * (p1 - p0)
    return QuadratureRule(points=pts, weights=w * 0.5 * length, order=order)


def skeleton_quadrature(cell_vertices, p0, p1, order: int) -> QuadratureRule:
    """Rule on the part of segment p0->p1 inside a convex cell."""
    interval = clip_segment_to_convex(p0, p1, cell_vertices)
    if interval is None:
        raise GeometryError("segment does not intersect the cell")
    t0, t1 = interval
    p0 = np.asarray(p0, dtype=float)
    d = np.asarray(p1, dtype=float) - p0
    return segment_rule(p0 + t0 * d, p0 + t1 * d, order)
