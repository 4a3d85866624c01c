import logging
from dataclasses import dataclass

import numpy as np

from ..core.box import as_box
from ..core.errors import ConsistencyError
from ..core.expsum import ExpSum
from ..skeleton.planar import TOL_VERTEX, Skeleton2D, build_skeleton_2d
from .net import Net
from .voronoi import voronoi_geometry, voronoi_segments

logger = logging.getLogger(__name__)

WEIGHT_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class SectionSpec:
    """
    Section s = Σ a_j σ_{p_j} of L^k written as e^{−k|z|²/4}·μ(z).

    Term i of global_sum is the peak section at centers[i] (a lattice
    translate of net point sources[i] for periodic nets):
    α_i = log a_j − k|p_i|²/4 and exponent k·conj(p_i)/2.
    """

    net: Net
    amplitudes: np.ndarray
    k: float
    R0: float
    global_sum: ExpSum
    centers: np.ndarray
    sources: np.ndarray

    @property
    def epsilon(self) -> float:
        return self.net.epsilon

    @property
    def scale(self) -> float:
        """Factor εk of the rescaled metric."""
        return self.net.epsilon * self.k

    def log_modulus(self, z) -> np.ndarray:
        """log|s(z)| including the Gaussian frame factor."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        b, value, _, _ = self.global_sum.log_jet(z, order=0)
        with np.errstate(divide='ignore'):
            return -self.k * np.abs(z) ** 2 / 4 + b + np.log(np.abs(value))


def error_scale(epsilon: float, k: float, c: float = 1.0) -> float:
    """c_{ε,k} = max(ε, 1/(εk), e^{−cε²k})."""
    return float(max(epsilon, 1.0 / (epsilon * k), np.exp(-c * epsilon ** 2 * k)))


def build_section(net: Net, amplitudes=None, k: float = 100.0, weight_floor: float = WEIGHT_FLOOR) -> SectionSpec:
    """
    Assemble the global exponential sum of a section over a net.

    Args:
        net: Planar net
        amplitudes: Unit-modulus amplitudes a_j, one per net point (default all 1)
        k: Tensor power, any positive real
        weight_floor: Periodic nets include lattice translates whose Gaussian
            weight at the domain exceeds this floor

    Raises:
        ValueError: amplitude count or modulus mismatch, k ≤ 0
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if net.size == 0:
        raise ValueError("Net has no points")
    amplitudes = np.ones(net.size, dtype=complex) if amplitudes is None else np.atleast_1d(np.array(amplitudes, dtype=complex))
    if amplitudes.shape != (net.size,):
        raise ValueError(f"Expected {net.size} amplitudes, got {amplitudes.shape[0]}")
    if np.any(np.abs(np.abs(amplitudes) - 1) > 1e-9):
        raise ValueError("Section amplitudes must have unit modulus")
    if k * net.epsilon ** 2 < 4:
        logger.warning(f"k*epsilon^2 = {k * net.epsilon ** 2:.3g} < 4; the e^(-c eps^2 k) error term is not small")

    R0 = float(np.sqrt(4 * np.log(1 / weight_floor) / k))
    centers, sources = net.replicated(R0)
    alphas = np.log(amplitudes[sources]) - k * np.abs(centers) ** 2 / 4
    exponents = k * np.conj(centers) / 2
    global_sum = ExpSum(alphas, exponents[:, None])
    logger.info(f"Section with k = {k:g}: {net.size} net points, {len(centers)} terms (R0 = {R0:.3g})")
    for arr in (amplitudes, centers, sources):
        arr.setflags(write=False)
    return SectionSpec(net, amplitudes, float(k), R0, global_sum, centers, sources)


def section_skeleton(spec: SectionSpec, window=None, tol: float = 1e-8, tol_vertex: float = TOL_VERTEX) -> Skeleton2D:
    """
    Skeleton of the global sum, cross-checked against the Euclidean Voronoi diagram.

    With unit amplitudes f_i ≥ f_j ⇔ |z − p_i| ≤ |z − p_j|, so both edge
    sets must agree up to tol·diameter in Hausdorff distance.

    Raises:
        ConsistencyError: the two edge sets disagree
    """
    window = as_box(window) if window is not None else spec.net.domain
    skeleton = build_skeleton_2d(spec.global_sum, window, tol_vertex=tol_vertex)
    oracle = voronoi_segments(spec.centers, window, min_length=tol_vertex * window.diameter)

    if not skeleton.edges and not oracle:
        return skeleton
    if not skeleton.edges or not oracle:
        raise ConsistencyError(
            f"Skeleton has {len(skeleton.edges)} edges but the Voronoi diagram has {len(oracle)}",
            discrepancy=float('inf'),
        )
    discrepancy = float(skeleton.edge_geometry().hausdorff_distance(voronoi_geometry(oracle)))
    if discrepancy > tol * window.diameter:
        raise ConsistencyError(
            f"Section skeleton deviates from the Voronoi diagram by {discrepancy:.3e}",
            discrepancy=discrepancy,
        )
    logger.debug(f"Section skeleton matches Voronoi diagram (Hausdorff {discrepancy:.2e})")
    return skeleton
