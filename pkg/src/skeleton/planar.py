import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from shapely.geometry import LineString, MultiLineString, Point, Polygon

from ..core.box import Box, as_box
from ..core.expsum import TOL_TIE, ExpSum, dominance

logger = logging.getLogger(__name__)

TOL_VERTEX = 1e-7
# halfplanes clipped before the vectorized sweep over the remaining terms
NEAREST_FIRST = 8


@dataclass
class Cell:
    """Region U_i of the window where term i attains b(z)."""

    index: int
    polygon: np.ndarray
    area: float
    clipped: bool

    def shapely(self) -> Polygon:
        return Polygon(self.polygon)


@dataclass
class Edge:
    """Segment of Γ separating two cells."""

    cells: Tuple[int, int]
    active: Tuple[int, ...]
    start: complex
    end: complex
    clipped: bool

    @property
    def generic(self) -> bool:
        return len(self.active) == 2

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    @property
    def midpoint(self) -> complex:
        return (self.start + self.end) / 2

    def shapely(self) -> LineString:
        return LineString([(self.start.real, self.start.imag), (self.end.real, self.end.imag)])


@dataclass
class Vertex:
    """Point of Γ^{(0)} inside the window."""

    point: complex
    active: Tuple[int, ...]
    edges: Tuple[int, ...]


@dataclass
class Skeleton2D:
    """Planar skeleton Γ of a one-variable exponential sum clipped to a window."""

    window: Box
    cells: List[Cell] = field(default_factory=list)
    edges: List[Edge] = field(default_factory=list)
    vertices: List[Vertex] = field(default_factory=list)

    @property
    def total_area(self) -> float:
        return float(sum(cell.area for cell in self.cells))

    def edge_geometry(self) -> MultiLineString:
        return MultiLineString([edge.shapely() for edge in self.edges])

    def distance(self, z) -> float:
        """Euclidean distance from z to the union of edges."""
        if not self.edges:
            return float('inf')
        z = complex(np.asarray(z, dtype=complex).reshape(-1)[0])
        return float(self.edge_geometry().distance(Point(z.real, z.imag)))

    def cell_of(self, index: int) -> Optional[Cell]:
        for cell in self.cells:
            if cell.index == index:
                return cell
        return None

    def nongeneric_edges(self) -> List[Edge]:
        return [edge for edge in self.edges if not edge.generic]


def _halfplane_data(sum_: ExpSum):
    """f_i(x, y) = a_i + u_i x + v_i y."""
    m = sum_.exponents[:, 0]
    return sum_.alphas.real.copy(), m.real.copy(), -m.imag


def _clip(poly: np.ndarray, coef: np.ndarray, const: float) -> np.ndarray:
    """Sutherland–Hodgman clip of a convex polygon by {coef·p + const ≥ 0}."""
    if len(poly) == 0:
        return poly
    vals = poly @ coef + const
    inside = vals >= 0
    if inside.all():
        return poly
    if not inside.any():
        return poly[:0]
    out = []
    count = len(poly)
    for idx in range(count):
        nxt = (idx + 1) % count
        if inside[idx]:
            out.append(poly[idx])
        if inside[idx] != inside[nxt]:
            t = vals[idx] / (vals[idx] - vals[nxt])
            out.append(poly[idx] + t * (poly[nxt] - poly[idx]))
    return np.array(out) if out else poly[:0]


def _cell_polygon(i: int, a, u, v, window_poly: np.ndarray) -> np.ndarray:
    others = np.flatnonzero(np.arange(len(a)) != i)
    if others.size == 0:
        return window_poly
    coefs = np.stack([u[i] - u[others], v[i] - v[others]], axis=1)
    consts = a[i] - a[others]
    order = np.argsort(np.hypot(coefs[:, 0], coefs[:, 1]))

    poly = window_poly
    for j in order[:NEAREST_FIRST]:
        poly = _clip(poly, coefs[j], consts[j])
        if len(poly) == 0:
            return poly
    rest = order[NEAREST_FIRST:]
    if rest.size:
        vals = poly @ coefs[rest].T + consts[rest]
        cutting = rest[np.any(vals < 0, axis=0)]
        for j in cutting:
            poly = _clip(poly, coefs[j], consts[j])
            if len(poly) == 0:
                return poly
    return poly


def _on_boundary(window: Box, z: complex, tol: float) -> bool:
    return float(window.boundary_distance(np.array([z]))[0]) <= tol


def _edge_interval(i: int, j: int, a, u, v, window: Box, tol_tie: float):
    """Parameter interval of the bisector {f_i = f_j} where i, j attain the max inside the window."""
    A, B, C = u[i] - u[j], v[i] - v[j], a[i] - a[j]
    norm2 = A * A + B * B
    base = -C * np.array([A, B]) / norm2
    direction = np.array([-B, A]) / np.sqrt(norm2)

    lo, hi = -np.inf, np.inf
    for axis in (0, 1):
        low, high = window.lower[axis], window.upper[axis]
        d = direction[axis]
        if abs(d) < 1e-15:
            if not (low <= base[axis] <= high):
                return None
            continue
        t0, t1 = (low - base[axis]) / d, (high - base[axis]) / d
        lo, hi = max(lo, min(t0, t1)), min(hi, max(t0, t1))

    others = np.flatnonzero((np.arange(len(a)) != i) & (np.arange(len(a)) != j))
    if others.size:
        # g_k(t) = f_i − f_k along the line, must stay ≥ −tol
        g0 = (a[i] - a[others]) + (u[i] - u[others]) * base[0] + (v[i] - v[others]) * base[1]
        slope = (u[i] - u[others]) * direction[0] + (v[i] - v[others]) * direction[1]
        for g, s in zip(g0, slope):
            if abs(s) < 1e-15:
                if g < -tol_tie:
                    return None
                continue
            bound = (-tol_tie - g) / s
            if s > 0:
                lo = max(lo, bound)
            else:
                hi = min(hi, bound)
    if hi <= lo:
        return None
    start, end = base + lo * direction, base + hi * direction
    return complex(start[0], start[1]), complex(end[0], end[1])


def build_skeleton_2d(
    sum_: ExpSum,
    window,
    tol_tie: float = TOL_TIE,
    tol_vertex: float = TOL_VERTEX,
) -> Skeleton2D:
    """
    Exact planar skeleton of a one-variable exponential sum.

    Cell i is the intersection of the halfplanes {f_i ≥ f_j} with
    f_i(x, y) = Re α_i + Re(m_i)x − Im(m_i)y, clipped to the window.

    Args:
        sum_: Exponential sum with dim 1
        window: Planar Box (or "x0,y0,x1,y1")
        tol_tie: Tolerance on real exponent parts
        tol_vertex: Relative tolerance for merging vertices and tie detection at edges

    Returns:
        Skeleton2D with cells, edges and interior vertices
    """
    if sum_.dim != 1:
        raise ValueError(f"Planar skeletons need a one-variable sum, got dim {sum_.dim}")
    window = as_box(window)
    a, u, v = _halfplane_data(sum_)
    (x0, y0), (x1, y1) = window.lower, window.upper
    window_poly = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)
    scale = window.diameter
    min_area = 1e-12 * window.area
    boundary_tol = 1e-9 * scale

    skeleton = Skeleton2D(window=window)
    bounds = {}
    for i in range(sum_.size):
        poly = _cell_polygon(i, a, u, v, window_poly)
        if len(poly) < 3:
            continue
        area = Polygon(poly).area
        if area <= min_area:
            continue
        clipped = bool(np.any(window.boundary_distance(poly[:, 0] + 1j * poly[:, 1]) <= boundary_tol))
        skeleton.cells.append(Cell(index=i, polygon=poly, area=float(area), clipped=clipped))
        bounds[i] = (poly.min(axis=0) - boundary_tol, poly.max(axis=0) + boundary_tol)

    kept = sorted(bounds)
    min_length = tol_vertex * scale
    tie_tol = max(tol_tie, tol_vertex * (1.0 + np.abs(sum_.exponents).max() * scale))
    for pos, i in enumerate(kept):
        for j in kept[pos + 1:]:
            lo_i, hi_i = bounds[i]
            lo_j, hi_j = bounds[j]
            if np.any(hi_i < lo_j) or np.any(hi_j < lo_i):
                continue
            segment = _edge_interval(i, j, a, u, v, window, tol_tie)
            if segment is None or abs(segment[1] - segment[0]) <= min_length:
                continue
            start, end = segment
            mid = (start + end) / 2
            active = dominance(sum_, mid, 0.0, tol_tie=tie_tol).argmax_set
            clipped = _on_boundary(window, start, boundary_tol) or _on_boundary(window, end, boundary_tol)
            skeleton.edges.append(Edge(cells=(i, j), active=active, start=start, end=end, clipped=clipped))

    _assemble_vertices(skeleton, sum_, tol_vertex * scale, tie_tol, boundary_tol)
    nongeneric = len(skeleton.nongeneric_edges())
    if nongeneric:
        logger.warning(f"Skeleton has {nongeneric} non-generic edge(s) with more than two tied terms")
    logger.debug(
        f"Skeleton: {len(skeleton.cells)} cells, {len(skeleton.edges)} edges, {len(skeleton.vertices)} vertices"
    )
    return skeleton


def _assemble_vertices(skeleton: Skeleton2D, sum_: ExpSum, merge_tol: float, tie_tol: float, boundary_tol: float):
    clusters: List[List] = []
    for index, edge in enumerate(skeleton.edges):
        for end in (edge.start, edge.end):
            if _on_boundary(skeleton.window, end, boundary_tol):
                continue
            for cluster in clusters:
                if abs(cluster[0] - end) <= merge_tol:
                    cluster[1].add(index)
                    break
            else:
                clusters.append([end, {index}])

    for point, edge_ids in clusters:
        active = dominance(sum_, point, 0.0, tol_tie=tie_tol).argmax_set
        skeleton.vertices.append(Vertex(point=point, active=active, edges=tuple(sorted(edge_ids))))
