"""
Quantitative genericity of exponent sets.

Simplices live in ℂⁿ viewed as ℝ^{2n}. The complexified simplex of
{m_0, ..., m_k} has vertices {0, v_j, i·v_j} with v_j = m_j − m_0; its
volume measures how far the simplex is from containing a complex direction.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .box import Box, as_box
from .errors import SearchExhaustedError
from .expsum import ExpSum

logger = logging.getLogger(__name__)

TOL_RANK = 1e-10
MAX_ENUMERATION = 1e7

REAL = 'real'
COMPLEXIFIED = 'complexified'


def _as_vertices(vertices) -> np.ndarray:
    pts = np.asarray(vertices, dtype=complex)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError(f"Invalid simplex vertices with shape {pts.shape}")
    return pts


def _embed(vectors: np.ndarray) -> np.ndarray:
    """ℂⁿ → ℝ^{2n}."""
    return np.concatenate([vectors.real, vectors.imag], axis=-1)


def _edge_frame(pts: np.ndarray, mode: str) -> np.ndarray:
    edges = pts[1:] - pts[0]
    if mode == REAL:
        return _embed(edges)
    if mode == COMPLEXIFIED:
        # rows v_1, Jv_1, v_2, Jv_2, ...
        doubled = np.empty((2 * len(edges), edges.shape[1]), dtype=complex)
        doubled[0::2] = edges
        doubled[1::2] = 1j * edges
        return _embed(doubled)
    raise ValueError(f"Invalid volume mode: {mode}")


def simplex_volume(vertices, mode: str = REAL) -> float:
    """
    Volume of a simplex in ℂⁿ ≅ ℝ^{2n} via the Gram determinant.

    Args:
        vertices: k+1 vertices, shape (k+1, n) (planar vertices may be flat)
        mode: 'real' for the k-volume, 'complexified' for the 2k-volume of Δ^ℂ

    Returns:
        sqrt(det G) / k! (real) or sqrt(det G) / (2k)! (complexified)
    """
    pts = _as_vertices(vertices)
    k = pts.shape[0] - 1
    if k < 1:
        raise ValueError("A simplex needs at least two vertices")
    if mode == COMPLEXIFIED and k > pts.shape[1]:
        raise ValueError(f"Complexified volume needs at most n+1 = {pts.shape[1] + 1} vertices, got {k + 1}")
    frame = _edge_frame(pts, mode)
    gram = frame @ frame.T
    det = max(float(np.linalg.det(gram)), 0.0)
    order = k if mode == REAL else 2 * k
    return math.sqrt(det) / math.factorial(order)


def _diameter(pts: np.ndarray) -> float:
    diffs = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((np.abs(diffs) ** 2).sum(axis=-1)).max())


def _face_quality(face: np.ndarray, mode: str, tol_rank: float) -> float:
    dim = face.shape[0] - 1
    vol = simplex_volume(face, mode)
    if vol < tol_rank:
        return 0.0
    return vol ** (1.0 / dim) if mode == REAL else vol ** (1.0 / (2 * dim))


def _quality_and_face(pts: np.ndarray, mode: str, extra_point, tol_rank: float) -> Tuple[float, np.ndarray]:
    k = pts.shape[0] - 1
    n = pts.shape[1]
    diam = _diameter(pts)
    if diam == 0.0:
        return 0.0, pts
    origin = pts[0]
    scaled = (pts - origin) / diam

    best, witness = np.inf, pts
    for size in range(2, k + 2):
        for idx in itertools.combinations(range(k + 1), size):
            q = _face_quality(scaled[list(idx)], mode, tol_rank)
            if q < best:
                best, witness = q, pts[list(idx)]

    if extra_point is not None:
        m = (np.atleast_1d(np.asarray(extra_point, dtype=complex)) - origin) / diam
        if m.shape != (n,):
            raise ValueError(f"Dimension mismatch: extra point of shape {m.shape} for simplex in C^{n}")
        # (l'−1)-faces joined with m, l' ≤ n
        for size in range(1, min(k + 1, n) + 1):
            for idx in itertools.combinations(range(k + 1), size):
                face = np.vstack([scaled[list(idx)], m[None, :]])
                q = _face_quality(face, mode, tol_rank)
                if q < best:
                    best, witness = q, np.vstack([pts[list(idx)], (m * diam + origin)[None, :]])
    return float(best), witness


def simplex_quality(vertices, mode: str = REAL, extra_point=None, tol_rank: float = TOL_RANK) -> float:
    """
    Diameter-normalized quality δ^ℝ, δ^ℂ or δ^ℂ_m of a simplex.

    Args:
        vertices: k+1 vertices of the simplex
        mode: 'real' or 'complexified'
        extra_point: Point m; faces joined with m are included (complexified only)
        tol_rank: Faces with normalized volume below this count as degenerate

    Returns:
        Minimum over faces of Vol^{1/l'} (real) or Vol_ℂ^{1/(2l')} (complexified)
    """
    pts = _as_vertices(vertices)
    if pts.shape[0] < 2:
        raise ValueError("A simplex needs at least two vertices")
    if mode == COMPLEXIFIED and pts.shape[0] > pts.shape[1] + 1:
        raise ValueError(f"Complexified quality needs at most n+1 vertices, got {pts.shape[0]}")
    if extra_point is not None and mode != COMPLEXIFIED:
        raise ValueError("An extra point is only meaningful for the complexified quality")
    return _quality_and_face(pts, mode, extra_point, tol_rank)[0]


@dataclass
class GenericityReport:
    """Quantitative non-degeneracy of an exponent set."""

    delta_r: float
    delta_c: float
    delta_c_origin: float
    delta_set: float
    strongly_basic: bool
    witness: Optional[np.ndarray]
    margins: Dict[int, float] = field(default_factory=dict)
    simplex_count: int = 0


def _subsets_within(points_real: np.ndarray, cutoff: Optional[float], max_size: int, must_include: Optional[int]):
    """Index subsets of 2..max_size points, pairwise within cutoff when one is given."""
    count = len(points_real)
    neighbours = None
    if cutoff is not None:
        neighbours = [set() for _ in range(count)]
        for i, j in cKDTree(points_real).query_pairs(cutoff * (1 + 1e-12)):
            neighbours[i].add(j)
            neighbours[j].add(i)

    if must_include is None:
        pool = list(range(count))
    elif neighbours is None:
        pool = list(range(count))
    else:
        # every admissible subset lies in the neighbourhood of must_include
        pool = sorted(neighbours[must_include] | {must_include})

    def linked(a: int, b: int) -> bool:
        return neighbours is None or b in neighbours[a]

    def extend(subset, candidates):
        for c in candidates:
            grown = subset + (c,)
            if must_include is None or must_include in grown:
                yield grown
            if len(grown) < max_size:
                yield from extend(grown, [d for d in candidates if d > c and linked(c, d)])

    for start in pool:
        yield from extend((start,), [d for d in pool if d > start and linked(start, d)])


def exponent_set_quality(
    points,
    n: Optional[int] = None,
    cutoff: Optional[float] = None,
    must_include: Optional[int] = None,
    tol_rank: float = TOL_RANK,
    max_enumeration: float = MAX_ENUMERATION,
) -> GenericityReport:
    """
    Minimal real and complexified quality over all small simplices of a point set.

    Real quality ranges over simplices with at most n+2 vertices, complexified
    quality over simplices with at most n+1 vertices.

    Args:
        points: Exponents, shape (N, n) (planar sets may be flat)
        n: Complex dimension (inferred from points when omitted)
        cutoff: Only subsets with pairwise distances ≤ cutoff are enumerated
        must_include: Only subsets containing this index are enumerated
        tol_rank: Degeneracy threshold
        max_enumeration: Refuse unrestricted enumerations larger than this

    Returns:
        GenericityReport
    """
    pts = _as_vertices(points)
    if n is None:
        n = pts.shape[1]
    if pts.shape[1] != n:
        raise ValueError(f"Dimension mismatch: points in C^{pts.shape[1]}, expected C^{n}")
    count = pts.shape[0]
    real = _embed(pts)
    if len({tuple(r) for r in real.tolist()}) < count:
        raise ValueError("Exponent points must be pairwise distinct")

    max_size = n + 2
    if cutoff is None and must_include is None:
        total = sum(math.comb(count, s) for s in range(2, min(max_size, count) + 1))
        if total > max_enumeration:
            raise ValueError(f"Refusing to enumerate {total} simplices (limit {max_enumeration:.0e})")

    delta_r = delta_c = delta_origin = 1.0
    witness = None
    margins: Dict[int, float] = {}
    examined = 0
    best = np.inf
    origin = np.zeros(n, dtype=complex)

    for subset in _subsets_within(real, cutoff, min(max_size, count), must_include):
        examined += 1
        verts = pts[list(subset)]
        q_real, face = _quality_and_face(verts, REAL, None, tol_rank)
        q = q_real
        delta_r = min(delta_r, q_real)
        if len(subset) <= n + 1:
            q_complex, c_face = _quality_and_face(verts, COMPLEXIFIED, None, tol_rank)
            q_origin, _ = _quality_and_face(verts, COMPLEXIFIED, origin, tol_rank)
            delta_c = min(delta_c, q_complex)
            delta_origin = min(delta_origin, q_origin)
            if q_complex < q:
                q = q_complex
        margins[len(subset)] = min(margins.get(len(subset), 1.0), q)
        if q < best:
            best, witness = q, verts

    delta_set = min(delta_r, delta_c)
    strongly = delta_set > tol_rank
    logger.debug(f"Enumerated {examined} simplices: delta_r={delta_r:.4g}, delta_c={delta_c:.4g}")
    return GenericityReport(
        delta_r=float(delta_r),
        delta_c=float(delta_c),
        delta_c_origin=float(delta_origin),
        delta_set=float(delta_set),
        strongly_basic=bool(strongly),
        witness=witness,
        margins=margins,
        simplex_count=examined,
    )


@dataclass
class SimplexCatalog:
    """Simplices spanned by subsets of an exponent set."""

    points: np.ndarray
    index_sets: List[Tuple[int, ...]] = field(default_factory=list)
    nongeneric: List[Tuple[int, ...]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.index_sets)

    def __iter__(self):
        for idx in self.index_sets:
            yield self.points[list(idx)]

    def filtered(self, max_vertices: int) -> List[np.ndarray]:
        return [self.points[list(idx)] for idx in self.index_sets if len(idx) <= max_vertices]


@dataclass
class Classification:
    """Genericity classification of an exponential sum."""

    strongly: bool
    basic: Optional[bool]
    strictly: Optional[bool]
    catalog: SimplexCatalog
    report: GenericityReport
    vacuous: bool = False


def catalog_from_skeleton(sum_: ExpSum, skeleton) -> SimplexCatalog:
    """
    Simplex catalog of a planar sum read off its skeleton.

    Each edge contributes the pair of cells it separates; edges whose tie set
    is larger than that pair are recorded as non-generic.
    """
    pairs, nongeneric = [], []
    for edge in skeleton.edges:
        pair = tuple(sorted(edge.cells))
        if pair not in pairs:
            pairs.append(pair)
        if len(edge.active) > 2 and tuple(edge.active) not in nongeneric:
            nongeneric.append(tuple(edge.active))
    return SimplexCatalog(points=np.array(sum_.exponents), index_sets=pairs, nongeneric=nongeneric)


def classify_sum(sum_: ExpSum, window, tol_rank: float = TOL_RANK) -> Classification:
    """
    Decide strongly basic / basic / strictly basic.

    Args:
        sum_: Exponential sum
        window: Box bounding the strata that are enumerated (planar sums)
        tol_rank: Degeneracy threshold

    Returns:
        Classification; for n ≥ 2 basic is inferred from strongly basic and
        strictly is left undecided (None). Planar strata are edge pairs, and
        the strictly basic test only involves simplices of at most n = 1
        vertex, so for planar sums strictly coincides with basic.
    """
    report = exponent_set_quality(sum_.exponents, sum_.dim, tol_rank=tol_rank)
    n = sum_.dim

    if n != 1:
        basic = True if report.strongly_basic else None
        return Classification(report.strongly_basic, basic, None, SimplexCatalog(np.array(sum_.exponents)), report)

    from ..skeleton.planar import build_skeleton_2d

    skeleton = build_skeleton_2d(sum_, as_box(window))
    catalog = catalog_from_skeleton(sum_, skeleton)
    if not len(catalog):
        logger.warning("No skeleton strata inside the window; basic holds vacuously")
        return Classification(report.strongly_basic, True, True, catalog, report, vacuous=True)

    basic = all(simplex_quality(s, COMPLEXIFIED, tol_rank=tol_rank) > tol_rank for s in catalog)
    strictly = basic
    logger.info(
        f"Classified sum with {sum_.size} terms: strongly={report.strongly_basic}, "
        f"basic={basic}, strictly={strictly}, catalog={len(catalog)}"
    )
    return Classification(report.strongly_basic, basic, strictly, catalog, report)


def _sample_ball(rng: np.random.Generator, center: np.ndarray, radius: float) -> np.ndarray:
    n = center.shape[0]
    direction = rng.standard_normal(2 * n)
    direction /= np.linalg.norm(direction)
    r = radius * rng.random() ** (1.0 / (2 * n))
    offset = r * direction
    return center + offset[:n] + 1j * offset[n:]


def shift_margin(catalog_simplices: Sequence[np.ndarray], m: np.ndarray, tol_rank: float = TOL_RANK) -> float:
    """min δ^ℂ_m over the given simplices (1.0 when there are none)."""
    margin = 1.0
    for s in catalog_simplices:
        margin = min(margin, simplex_quality(s, COMPLEXIFIED, extra_point=m, tol_rank=tol_rank))
    return margin


def find_shift(
    sum_: ExpSum,
    anchor,
    radius: float,
    target: float,
    seed: int = 0,
    max_tries: int = 1000,
    catalog: Optional[SimplexCatalog] = None,
    window=None,
) -> np.ndarray:
    """
    Rejection-sample a shift m with |m − m'| ≤ radius and δ^ℂ_m ≥ target.

    Every catalog simplex with at most n+1 vertices is constrained.

    Args:
        sum_: Exponential sum
        anchor: Center m' of the sampling ball
        radius: Ball radius c_2
        target: Required margin c_3
        seed: Random seed
        max_tries: Number of draws before giving up
        catalog: Simplex catalog (computed over `window` when omitted)
        window: Window for the catalog (default [−5, 5]²)

    Returns:
        Accepted shift m

    Raises:
        SearchExhaustedError: no draw met the target; carries the best margin
    """
    if radius <= 0 or target <= 0:
        raise ValueError(f"find_shift needs positive radius and target, got {radius}, {target}")
    center = np.atleast_1d(np.asarray(anchor, dtype=complex))
    if center.shape != (sum_.dim,):
        raise ValueError(f"Dimension mismatch: anchor of shape {center.shape}")
    if catalog is None:
        catalog = classify_sum(sum_, window if window is not None else Box.planar(-5, -5, 5, 5)).catalog
    simplices = catalog.filtered(sum_.dim + 1)
    if not simplices:
        return center

    rng = np.random.default_rng(seed)
    best_margin, best = -np.inf, center
    for attempt in range(max_tries):
        m = _sample_ball(rng, center, radius)
        margin = shift_margin(simplices, m)
        if margin >= target:
            logger.debug(f"Shift accepted after {attempt + 1} draw(s) with margin {margin:.4f}")
            return m
        if margin > best_margin:
            best_margin, best = margin, m
    raise SearchExhaustedError(
        f"No shift with margin {target} found in {max_tries} draws (best {best_margin:.4f})",
        best_margin=float(best_margin),
        best=best,
    )
