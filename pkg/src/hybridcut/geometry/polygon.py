"""Low-level polygon helpers: areas, orientation, clipping, triangulation.

All polygons are (k, 2) float arrays of vertices without a repeated closing
vertex. Boolean operations go through shapely, which gives us robust
predicates for the deliberately degenerate cut configurations (sliver cells,
interfaces sitting exactly on grid lines).
"""

from __future__ import annotations

import numpy as np
from shapely.geometry import GeometryCollection, LineString, MultiPolygon, Polygon


class GeometryError(ValueError):
    """Invalid or degenerate geometric input."""


def as_vertex_array(vertices) -> np.ndarray:
    arr = np.asarray(vertices, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise GeometryError(f"polygon needs shape (k>=3, 2), got {arr.shape}")
    return arr


def signed_area(vertices) -> float:
    """Shoelace area, positive for counterclockwise orientation."""
    v = as_vertex_array(vertices)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_area(vertices) -> float:
    return abs(signed_area(vertices))


def ensure_ccw(vertices) -> np.ndarray:
    v = as_vertex_array(vertices)
    return v if signed_area(v) > 0 else v[::-1].copy()


def polygon_diameter(vertices) -> float:
    """Largest pairwise vertex distance (the diameter for convex polygons,
    a close proxy otherwise)."""
    v = as_vertex_array(vertices)
    diff = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=2)).max())


def polygon_perimeter(vertices) -> float:
    v = as_vertex_array(vertices)
    return float(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1).sum())


def to_shapely(vertices) -> Polygon:
    return Polygon(as_vertex_array(vertices))


def _rings_of(geom) -> list[np.ndarray]:
    """Extract exterior rings of a (multi)polygon as open vertex arrays."""
    if geom.is_empty:
        return []
    if isinstance(geom, Polygon):
        polys = [geom]
    elif isinstance(geom, (MultiPolygon, GeometryCollection)):
        polys = [g for g in geom.geoms if isinstance(g, Polygon)]
    else:
        return []
    rings = []
    for poly in polys:
        if poly.area <= 0.0:
            continue
        coords = np.asarray(poly.exterior.coords)[:-1]
        rings.append(ensure_ccw(coords))
    return rings


def clip_polygon(subject, clipper) -> list[np.ndarray]:
    """Intersection of two simple polygons as a list of simple pieces.

    The result may be empty (no overlap) and may contain several pieces when
    the clipper is nonconvex.
    """
    inter = to_shapely(subject).intersection(to_shapely(clipper))
    return _rings_of(inter)


def triangulate_polygon(vertices) -> list[np.ndarray]:
    """Ear-clipping triangulation of a simple polygon into (3, 2) arrays.

    Convex polygons degrade to a plain fan. Collinear vertices are tolerated
    by allowing zero-area ears.
    """
    v = ensure_ccw(vertices)
    n = len(v)
    if n == 3:
        return [v.copy()]
    scale = polygon_diameter(v)
    eps = 1e-14 * scale * scale
    idx = list(range(n))
    tris: list[np.ndarray] = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10 * n * n:
            raise GeometryError("ear clipping failed to terminate; polygon may be non-simple")
        found = False
        m = len(idx)
        for k in range(m):
            i0, i1, i2 = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
            a, b, c = v[i0], v[i1], v[i2]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross < -eps:
                continue  # reflex corner
            ear = np.array([a, b, c])
            if cross > eps and _any_point_inside(ear, v[[j for j in idx if j not in (i0, i1, i2)]], eps):
                continue
            tris.append(ear)
            idx.pop(k)
            found = True
            break
        if not found:
            raise GeometryError("no ear found; polygon may be non-simple")
    tris.append(v[idx].copy())
    return [t for t in tris if polygon_area(t) > eps]


def _any_point_inside(tri: np.ndarray, points: np.ndarray, eps: float) -> bool:
    if len(points) == 0:
        return False
    a, b, c = tri
    for p in points:
        d1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        d2 = (c[0] - b[0]) * (p[1] - b[1]) - (c[1] - b[1]) * (p[0] - b[0])
        d3 = (a[0] - c[0]) * (p[1] - c[1]) - (a[1] - c[1]) * (p[0] - c[0])
        if min(d1, d2, d3) > eps:
            return True
    return False


def clip_segment_to_box(p0, p1, lo, hi) -> tuple[float, float] | None:
    """Clip segment p0->p1 against an axis-aligned box by parameter slabs.

    Returns the parameter interval (t0, t1) of the inside part, or None when
    the overlap has zero length.
    """
    p0 = np.asarray(p0, dtype=float)
    d = np.asarray(p1, dtype=float) - p0
    t0, t1 = 0.0, 1.0
    for ax in range(2):
        if d[ax] == 0.0:
            if p0[ax] < lo[ax] or p0[ax] > hi[ax]:
                return None
            continue
        ta = (lo[ax] - p0[ax]) / d[ax]
        tb = (hi[ax] - p0[ax]) / d[ax]
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
    if t1 <= t0:
        return None
    return t0, t1


def clip_segment_to_convex(p0, p1, polygon) -> tuple[float, float] | None:
    """Parameter interval of segment p0->p1 inside a convex CCW polygon."""
    v = ensure_ccw(polygon)
    p0 = np.asarray(p0, dtype=float)
    d = np.asarray(p1, dtype=float) - p0
    t0, t1 = 0.0, 1.0
    for i in range(len(v)):
        a = v[i]
        e = v[(i + 1) % len(v)] - a
        # inward normal of edge for CCW polygon
        n = np.array([-e[1], e[0]])
        denom = float(n @ d)
        num = float(n @ (a - p0))
        if denom == 0.0:
            if num > 0.0:
                return None
            continue
        t = num / denom
        if denom > 0.0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
    if t1 <= t0:
        return None
    return t0, t1


def shared_boundary(poly_a, poly_b) -> list[np.ndarray]:
    """Positive-length pieces of the common boundary of two polygons.

    Each piece is returned as a polyline (k, 2). Pieces are maximal connected
    components of the boundary intersection; shared single points are
    dropped.
    """
    from shapely.ops import linemerge

    inter = to_shapely(poly_a).boundary.intersection(to_shapely(poly_b).boundary)
    if inter.is_empty:
        return []
    lines = _lines_of(inter)
    if not lines:
        return []
    merged = linemerge(lines) if len(lines) > 1 else lines[0]
    return [np.asarray(g.coords, dtype=float) for g in _lines_of(merged)]


def _lines_of(geom) -> list[LineString]:
    if geom.is_empty:
        return []
    if isinstance(geom, LineString):
        return [geom]
    if hasattr(geom, "geoms"):
        out = []
        for g in geom.geoms:
            out.extend(_lines_of(g))
        return out
    return []


def polyline_length(points) -> float:
    pts = np.asarray(points, dtype=float)
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())
