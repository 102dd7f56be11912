"""Polygonal partitions of a domain: subdomains, skeleton, outer boundary.

The skeleton is the union of internal boundaries shared by pairs of
subdomains, split into components at points where three or more subdomains
meet so that every component is adjacent to exactly one unordered pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.ops import unary_union

from .polygon import (
    ensure_ccw,
    polygon_area,
    polygon_diameter,
    polygon_perimeter,
    polyline_length,
    shared_boundary,
    signed_area,
    to_shapely,
)

UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])

AREA_RTOL = 1e-12
LENGTH_RTOL = 1e-12


class PartitionError(ValueError):
    """Rejected partition geometry (non-simple, overlapping, gapped, dangling)."""


@dataclass(frozen=True)
class BoundaryPolyline:
    """A piece of a subdomain boundary with per-leg outward unit normals."""

    points: np.ndarray  # (k, 2)
    normals: np.ndarray  # (k-1, 2), outward from the owning subdomain

    @property
    def length(self) -> float:
        return polyline_length(self.points)

    def legs(self):
        for k in range(len(self.points) - 1):
            yield self.points[k], self.points[k + 1], self.normals[k]


@dataclass(frozen=True)
class SkeletonComponent:
    """Maximal shared boundary piece between exactly one subdomain pair.

    ``normals`` point outward from subdomain ``pair[0]``.
    """

    points: np.ndarray
    pair: tuple[int, int]
    normals: np.ndarray

    @property
    def length(self) -> float:
        return polyline_length(self.points)

    def as_boundary_of(self, i: int) -> BoundaryPolyline:
        if i == self.pair[0]:
            return BoundaryPolyline(self.points, self.normals)
        if i == self.pair[1]:
            return BoundaryPolyline(self.points, -self.normals)
        raise ValueError(f"subdomain {i} is not adjacent to this component")


@dataclass(frozen=True)
class PartitionSpec:
    """Recipe for a partition preset."""

    kind: str  # two_halves | three_subdomains | voronoi | explicit
    split: float = 0.5
    count: int = 50
    seed: int = 0
    polygons: tuple | None = None
    domain: tuple | None = None

    def to_dict(self) -> dict:
        out = {"preset": self.kind}
        if self.kind == "two_halves":
            out["split"] = self.split
        elif self.kind == "voronoi":
            out["count"] = self.count
            out["seed"] = self.seed
        elif self.kind == "explicit":
            out["polygons"] = [np.asarray(p).tolist() for p in self.polygons]
            if self.domain is not None:
                out["domain"] = np.asarray(self.domain).tolist()
        return out

    @staticmethod
    def from_dict(d: dict) -> "PartitionSpec":
        kind = d.get("preset")
        if kind == "two_halves":
            return PartitionSpec("two_halves", split=float(d.get("split", 0.5)))
        if kind == "three_subdomains":
            return PartitionSpec("three_subdomains")
        if kind == "voronoi":
            return PartitionSpec("voronoi", count=int(d.get("count", 50)), seed=int(d.get("seed", 0)))
        if kind == "explicit":
            polys = tuple(tuple(map(tuple, p)) for p in d["polygons"])
            dom = tuple(map(tuple, d["domain"])) if "domain" in d else None
            return PartitionSpec("explicit", polygons=polys, domain=dom)
        raise PartitionError(f"unknown partition preset {kind!r}")


@dataclass(frozen=True)
class PolygonalPartition:
    """The domain, its subdomains, the skeleton, and outer boundary pieces."""

    domain: np.ndarray
    subdomains: list[np.ndarray]
    coefficients: np.ndarray
    skeleton: list[SkeletonComponent]
    outer_edges: list[list[BoundaryPolyline]] = field(repr=False)

    @property
    def n_subdomains(self) -> int:
        return len(self.subdomains)

    @property
    def n_skeleton_components(self) -> int:
        return len(self.skeleton)

    @property
    def diameters(self) -> np.ndarray:
        return np.array([polygon_diameter(p) for p in self.subdomains])

    def components_of(self, i: int) -> list[int]:
        return [j for j, comp in enumerate(self.skeleton) if i in comp.pair]

    def subdomain_boundary(self, i: int) -> list[tuple[BoundaryPolyline, int | None]]:
        """Pieces of the boundary of subdomain i with outward normals.

        Yields (polyline, component_id) pairs; component_id is None for
        pieces on the outer domain boundary.
        """
        pieces: list[tuple[BoundaryPolyline, int | None]] = []
        for j, comp in enumerate(self.skeleton):
            if i in comp.pair:
                pieces.append((comp.as_boundary_of(i), j))
        for line in self.outer_edges[i]:
            pieces.append((line, None))
        return pieces


def _outward_normals(polygon_ccw: np.ndarray, polyline: np.ndarray) -> np.ndarray:
    """Outward unit normals for each leg of a polyline lying on the polygon
    boundary, by matching legs to the polygon's own (oriented) edges."""
    edges = []
    n = len(polygon_ccw)
    for k in range(n):
        a, b = polygon_ccw[k], polygon_ccw[(k + 1) % n]
        t = b - a
        ln = np.linalg.norm(t)
        if ln == 0.0:
            continue
        t = t / ln
        edges.append((a, b, np.array([t[1], -t[0]])))  # CCW: outward = tangent rotated -90
    tol = 1e-9 * max(polygon_diameter(polygon_ccw), 1.0)
    normals = np.empty((len(polyline) - 1, 2))
    for k in range(len(polyline) - 1):
        mid = 0.5 * (polyline[k] + polyline[k + 1])
        best, best_d = None, np.inf
        for a, b, nrm in edges:
            d = _point_segment_distance(mid, a, b)
            if d < best_d:
                best, best_d = nrm, d
        if best is None or best_d > tol:
            raise PartitionError(
                f"boundary piece at {mid} does not lie on a subdomain edge (distance {best_d:.2e})"
            )
        normals[k] = best
    return normals


def _point_segment_distance(p, a, b) -> float:
    d = b - a
    denom = float(d @ d)
    t = 0.0 if denom == 0.0 else float(np.clip((p - a) @ d / denom, 0.0, 1.0))
    return float(np.linalg.norm(a + t * d - p))


def _check_simple(polys: list[np.ndarray]) -> None:
    for i, p in enumerate(polys):
        if abs(signed_area(p)) <= 0.0:
            raise PartitionError(f"subdomain {i} has zero area")
        if not to_shapely(p).is_valid:
            raise PartitionError(f"subdomain {i} is not a simple polygon")


def _check_tiling(domain: np.ndarray, polys: list[np.ndarray]) -> None:
    area_sum = sum(polygon_area(p) for p in polys)
    domain_area = polygon_area(domain)
    if abs(area_sum - domain_area) > AREA_RTOL * domain_area * max(len(polys), 10):
        raise PartitionError(
            f"subdomain areas sum to {area_sum!r}, domain area is {domain_area!r}"
        )
    shp = [to_shapely(p) for p in polys]
    for i in range(len(shp)):
        for j in range(i + 1, len(shp)):
            inter = shp[i].intersection(shp[j]).area
            if inter > AREA_RTOL * domain_area * 100:
                raise PartitionError(f"subdomains {i} and {j} overlap (area {inter:.2e})")
    union = unary_union(shp)
    if abs(union.area - domain_area) > AREA_RTOL * domain_area * max(len(polys), 10):
        raise PartitionError("subdomains leave gaps in the domain")


def extract_skeleton(
    subdomains: list[np.ndarray], domain: np.ndarray
) -> tuple[list[SkeletonComponent], list[list[BoundaryPolyline]]]:
    """Shared-boundary components between subdomain pairs, plus outer edges.

    Components are maximal connected pieces of each pairwise boundary
    intersection; points where three or more subdomains meet are natural
    component endpoints. Raises on dangling internal edges.
    """
    polys = [ensure_ccw(p) for p in subdomains]
    n = len(polys)
    boxes = [(p[:, 0].min(), p[:, 0].max(), p[:, 1].min(), p[:, 1].max()) for p in polys]
    components: list[SkeletonComponent] = []
    for i in range(n):
        for j in range(i + 1, n):
            bi, bj = boxes[i], boxes[j]
            if bi[1] < bj[0] or bj[1] < bi[0] or bi[3] < bj[2] or bj[3] < bi[2]:
                continue
            for piece in shared_boundary(polys[i], polys[j]):
                if polyline_length(piece) <= 0.0:
                    continue
                normals = _outward_normals(polys[i], piece)
                components.append(SkeletonComponent(points=piece, pair=(i, j), normals=normals))

    outer: list[list[BoundaryPolyline]] = []
    for i in range(n):
        lines = []
        for piece in shared_boundary(polys[i], domain):
            if polyline_length(piece) <= 0.0:
                continue
            lines.append(BoundaryPolyline(points=piece, normals=_outward_normals(polys[i], piece)))
        outer.append(lines)

    total_perim = sum(polygon_perimeter(p) for p in polys)
    skel_len = sum(c.length for c in components)
    outer_len = sum(line.length for lines in outer for line in lines)
    covered = 2.0 * skel_len + outer_len
    if abs(covered - total_perim) > LENGTH_RTOL * total_perim * 100:
        raise PartitionError(
            f"dangling boundary edges: perimeters {total_perim!r} vs "
            f"2*skeleton + outer = {covered!r}"
        )
    return components, outer


def build_partition(spec: PartitionSpec, coefficients=None) -> PolygonalPartition:
    """Build and validate a partition from a preset spec.

    ``coefficients`` overrides the preset's per-subdomain conductivities.
    """
    if spec.kind == "two_halves":
        domain = UNIT_SQUARE
        s = spec.split
        if not 0.0 < s < 1.0:
            raise PartitionError(f"two_halves split {s} outside (0, 1)")
        polys = [
            np.array([[0.0, 0.0], [s, 0.0], [s, 1.0], [0.0, 1.0]]),
            np.array([[s, 0.0], [1.0, 0.0], [1.0, 1.0], [s, 1.0]]),
        ]
        default_coeffs = np.array([1.0, 1.0])
    elif spec.kind == "three_subdomains":
        domain = UNIT_SQUARE
        polys = _three_subdomain_polygons()
        default_coeffs = np.array([1.0, 2.0, 3.0])
    elif spec.kind == "voronoi":
        domain = UNIT_SQUARE
        polys, default_coeffs = _voronoi_polygons(spec.count, spec.seed)
    elif spec.kind == "explicit":
        if not spec.polygons:
            raise PartitionError("explicit partition needs at least one polygon")
        polys = [ensure_ccw(np.asarray(p, dtype=float)) for p in spec.polygons]
        domain = (
            ensure_ccw(np.asarray(spec.domain, dtype=float))
            if spec.domain is not None
            else UNIT_SQUARE
        )
        default_coeffs = np.ones(len(polys))
    else:
        raise PartitionError(f"unknown partition preset {spec.kind!r}")

    polys = [ensure_ccw(p) for p in polys]
    _check_simple(polys)
    _check_tiling(domain, polys)
    components, outer = extract_skeleton(polys, domain)

    coeffs = np.asarray(coefficients if coefficients is not None else default_coeffs, dtype=float)
    if coeffs.shape != (len(polys),):
        raise PartitionError(f"need {len(polys)} coefficients, got {coeffs.shape}")
    if np.any(coeffs <= 0.0):
        raise PartitionError("coefficients must be positive")

    return PolygonalPartition(
        domain=domain,
        subdomains=polys,
        coefficients=coeffs,
        skeleton=components,
        outer_edges=outer,
    )


def _three_subdomain_polygons() -> list[np.ndarray]:
    """Unit square split into three pieces by polyline interfaces meeting at
    a triple point; none of the interfaces is grid aligned."""
    c = np.array([0.55, 0.52])  # triple point
    a1 = np.array([0.40, 0.0])
    a2 = np.array([0.48, 0.30])
    b1 = np.array([0.50, 0.78])
    b2 = np.array([0.44, 1.0])
    c1 = np.array([0.80, 0.60])
    c2 = np.array([1.0, 0.63])
    left = np.array([[0, 0], a1, a2, c, b1, b2, [0, 1]], dtype=float)
    bottom_right = np.array([a1, [1, 0], c2, c1, c, a2], dtype=float)
    top_right = np.array([c, c1, c2, [1, 1], b2, b1], dtype=float)
    return [left, bottom_right, top_right]


def _voronoi_polygons(count: int, seed: int) -> tuple[list[np.ndarray], np.ndarray]:
    """Voronoi cells of uniform random seed points, clipped to the unit
    square by mirroring the points across all four sides."""
    from scipy.spatial import Voronoi

    if count < 1:
        raise PartitionError("voronoi preset needs count >= 1")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 1.0, size=(count, 2))
    coeffs = 0.01 + rng.uniform(0.0, 1.0, size=count)
    if count == 1:
        return [UNIT_SQUARE.copy()], coeffs

    mirrored = [pts]
    for axis, value in ((0, 0.0), (0, 2.0), (1, 0.0), (1, 2.0)):
        m = pts.copy()
        m[:, axis] = value - m[:, axis]
        mirrored.append(m)
    vor = Voronoi(np.vstack(mirrored))

    polys = []
    for i in range(count):
        region = vor.regions[vor.point_region[i]]
        if -1 in region or len(region) < 3:
            raise PartitionError("unbounded voronoi region; mirroring failed")
        verts = vor.vertices[region].copy()
        # mirrored construction puts boundary vertices on the square sides up
        # to circumcenter roundoff; snap them exactly
        snap = 1e-9
        for ax in range(2):
            verts[np.abs(verts[:, ax]) < snap, ax] = 0.0
            verts[np.abs(verts[:, ax] - 1.0) < snap, ax] = 1.0
        order = np.argsort(np.arctan2(verts[:, 1] - pts[i, 1], verts[:, 0] - pts[i, 0]))
        verts = verts[order]
        keep = [k for k in range(len(verts)) if np.linalg.norm(verts[k] - verts[k - 1]) > 1e-12]
        polys.append(ensure_ccw(verts[keep]))
    return polys, coeffs
