import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from ..core.box import as_box
from .section import SectionSpec

logger = logging.getLogger(__name__)

C3_DEFAULT = 0.05
R1_DEFAULT = 0.5
C4_RATIO = 0.05


def c1_datum(spec: SectionSpec, z) -> np.ndarray:
    """
    Normalized C¹ datum e^{−b}(|μ| + |∇μ|/(εk)) of the section at z.

    ∇ = ∂ − (k z̄/2) is the Chern connection of the Gaussian frame, measured
    in the rescaled metric.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _, value, gradient, _ = spec.global_sum.log_jet(z, order=1)
    covariant = gradient[:, 0] - spec.k * np.conj(z) / 2 * value
    return np.abs(value) + np.abs(covariant) / spec.scale


@dataclass
class Cluster:
    """Near-critical cluster γ° with its center q′ and grid members."""

    center: complex
    members: np.ndarray
    datum: float
    flagged: bool = False

    @property
    def size(self) -> int:
        return len(self.members)

    def distance(self, z) -> np.ndarray:
        """Euclidean distance from z to the member set."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return np.abs(z[:, None] - self.members[None, :]).min(axis=1)


@dataclass
class ClusterSet:
    """
    Clusters where the normalized C¹ datum of a section falls below C3.

    Distances in the rescaled metric are εk times Euclidean distances.
    """

    clusters: List[Cluster] = field(default_factory=list)
    C3: float = C3_DEFAULT
    C4: float = C3_DEFAULT * C4_RATIO
    R1: float = R1_DEFAULT
    scale: float = 1.0
    grid_spacing: float = 0.0

    def __len__(self) -> int:
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    @property
    def centers(self) -> np.ndarray:
        return np.array([c.center for c in self.clusters], dtype=complex)

    @property
    def flagged(self) -> bool:
        return any(c.flagged for c in self.clusters)

    def ball_radius(self, multiple: float) -> float:
        """Euclidean radius of a rescaled ball of radius multiple·R1."""
        return multiple * self.R1 / self.scale

    def disjoint(self) -> bool:
        """The 3R1 balls of distinct clusters do not meet."""
        reach = self.ball_radius(6)
        for i, a in enumerate(self.clusters):
            for b in self.clusters[i + 1:]:
                if a.distance(b.members).min() <= reach:
                    return False
        return True


def _components(points: np.ndarray, radius: float) -> np.ndarray:
    coords = np.stack([points.real, points.imag], axis=1)
    pairs = cKDTree(coords).query_pairs(radius, output_type='ndarray').reshape(-1, 2)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(points), len(points)))
    _, labels = connected_components(graph, directed=False)
    return labels


def detect_clusters(
    spec: SectionSpec,
    C3: float = C3_DEFAULT,
    R1: float = R1_DEFAULT,
    grid_density: int = 200,
    window=None,
    c4_ratio: float = C4_RATIO,
) -> ClusterSet:
    """
    Scan a grid for points where the normalized C¹ datum falls below C3.

    Hits closer than 8R1 in the rescaled metric form one cluster; its center
    is the hit with the smallest datum. Distinct clusters are then more than
    8R1 apart, so their 3R1 balls are disjoint; clusters wider than 8R1 are
    flagged.

    Args:
        spec: Section
        C3: Threshold on the normalized C¹ datum
        R1: Rescaled cluster radius
        grid_density: Samples per axis
        window: Scan window (default: the net domain)
        c4_ratio: C4 = c4_ratio·C3, the margin required after surgery
    """
    if R1 <= 0:
        raise ValueError(f"R1 must be positive, got {R1}")
    window = as_box(window) if window is not None else spec.net.domain
    spacing = window.grid_spacing(grid_density)
    result = ClusterSet(C3=C3, C4=c4_ratio * C3, R1=R1, scale=spec.scale, grid_spacing=spacing)
    if C3 <= 0:
        return result

    grid = window.grid(grid_density)
    datum = c1_datum(spec, grid)
    hits = np.flatnonzero(datum < C3)
    if hits.size == 0:
        logger.info(f"No clusters below C3 = {C3:g} on a {grid_density}x{grid_density} grid")
        return result

    points = grid[hits]
    link = max(result.ball_radius(8), 1.5 * spacing)
    labels = _components(points, link)
    clusters = []
    for label in np.unique(labels):
        members = points[labels == label]
        values = datum[hits][labels == label]
        best = int(np.argmin(values))
        extent = float(np.hypot(np.ptp(members.real), np.ptp(members.imag)))
        clusters.append(Cluster(complex(members[best]), members, float(values[best]), flagged=extent > result.ball_radius(8)))

    result.clusters = clusters
    long = sum(c.flagged for c in clusters)
    if long:
        logger.warning(f"{long} cluster(s) extend beyond 8R1; the threshold C3 is likely too large")
    logger.info(f"Detected {len(result.clusters)} cluster(s) from {hits.size} grid hits below C3 = {C3:g}")
    return result

