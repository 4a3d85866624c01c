import logging
from typing import List, Set, Tuple

import numpy as np
from scipy.spatial import QhullError, Voronoi
from shapely.geometry import LineString, MultiLineString

from ..core.box import Box

logger = logging.getLogger(__name__)

Segment = Tuple[Tuple[int, int], complex, complex]


def _clip_segment(window: Box, start: np.ndarray, end: np.ndarray, min_length: float):
    clipped = LineString([tuple(start), tuple(end)]).intersection(window.shapely())
    if clipped.is_empty or clipped.geom_type != 'LineString' or clipped.length <= min_length:
        return None
    (x0, y0), (x1, y1) = clipped.coords[0], clipped.coords[-1]
    return complex(x0, y0), complex(x1, y1)


def _bisector(p: np.ndarray, q: np.ndarray, reach: float) -> Tuple[np.ndarray, np.ndarray]:
    mid = (p + q) / 2
    tangent = np.array([-(q - p)[1], (q - p)[0]])
    tangent /= np.linalg.norm(tangent)
    return mid - reach * tangent, mid + reach * tangent


def voronoi_segments(points, window: Box, min_length: float = 0.0) -> List[Segment]:
    """
    Euclidean Voronoi edges of planar sites clipped to a window.

    Infinite ridges are closed with a far point along the outward bisector
    direction. Fewer than three sites and collinear sites are handled by
    explicit bisectors.

    Returns:
        List of ((i, j), start, end) with site indices i < j
    """
    pts = np.asarray(points, dtype=complex)
    coords = np.stack([pts.real, pts.imag], axis=1)
    reach = 10 * (window.diameter + float(np.ptp(coords, axis=0).max()) + 1.0)
    segments: List[Segment] = []
    if len(pts) < 2:
        return segments

    try:
        if len(pts) < 3:
            raise QhullError("two sites")
        vor = Voronoi(coords)
    except QhullError:
        # collinear sites: parallel bisectors between consecutive sites
        axis = coords[-1] - coords[0]
        order = np.argsort(coords @ axis)
        for a, b in zip(order[:-1], order[1:]):
            start, end = _bisector(coords[a], coords[b], reach)
            piece = _clip_segment(window, start, end, min_length)
            if piece is not None:
                segments.append(((int(min(a, b)), int(max(a, b))), *piece))
        return segments

    center = coords.mean(axis=0)
    for (a, b), ridge in zip(vor.ridge_points, vor.ridge_vertices):
        ridge = np.asarray(ridge)
        if np.all(ridge >= 0):
            start, end = vor.vertices[ridge[0]], vor.vertices[ridge[1]]
        else:
            finite = ridge[ridge >= 0][0]
            tangent = coords[b] - coords[a]
            tangent /= np.linalg.norm(tangent)
            normal = np.array([-tangent[1], tangent[0]])
            midpoint = (coords[a] + coords[b]) / 2
            direction = np.sign(np.dot(midpoint - center, normal)) * normal
            start = vor.vertices[finite]
            end = start + direction * reach
        piece = _clip_segment(window, start, end, min_length)
        if piece is not None:
            segments.append(((int(min(a, b)), int(max(a, b))), *piece))
    return segments


def voronoi_geometry(segments: List[Segment]) -> MultiLineString:
    return MultiLineString([[(s.real, s.imag), (e.real, e.imag)] for _, s, e in segments])


def voronoi_adjacency(points, sources=None) -> Set[Tuple[int, int]]:
    """
    Pairs of sites whose Voronoi cells share an edge.

    Args:
        points: Planar sites (lattice translates allowed)
        sources: Net index of every site; pairs are reported between sources

    Returns:
        Set of (i, j) with i < j
    """
    pts = np.asarray(points, dtype=complex)
    sources = np.arange(len(pts)) if sources is None else np.asarray(sources)
    if len(pts) < 2:
        return set()
    coords = np.stack([pts.real, pts.imag], axis=1)
    try:
        if len(pts) < 3:
            raise QhullError("two sites")
        ridges = Voronoi(coords).ridge_points
    except QhullError:
        order = np.argsort(coords @ (coords[-1] - coords[0]))
        ridges = np.stack([order[:-1], order[1:]], axis=1)
    pairs = set()
    for a, b in ridges:
        i, j = int(sources[a]), int(sources[b])
        if i != j:
            pairs.add((min(i, j), max(i, j)))
    return pairs
