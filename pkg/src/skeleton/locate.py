import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from ..core.expsum import TOL_TIE, ExpSum, as_vector, dominance

logger = logging.getLogger(__name__)

SVD_RANK = 1e-8


@dataclass(frozen=True)
class StratumLocation:
    """Where a point sits relative to the skeleton strata."""

    region: int
    stratum_dim: int
    active_span_dim: int
    near_set: Tuple[int, ...]
    in_U_c: Dict[int, bool]


def affine_rank(points: np.ndarray, svd_rank: float = SVD_RANK) -> int:
    """Real affine rank of points in ℂⁿ ≅ ℝ^{2n}."""
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts[:, None]
    if len(pts) <= 1:
        return 0
    real = np.concatenate([pts.real, pts.imag], axis=1)
    diffs = real[1:] - real[0]
    spread = np.sqrt(((real[:, None, :] - real[None, :, :]) ** 2).sum(axis=-1)).max()
    singular = np.linalg.svd(diffs, compute_uv=False)
    return int(np.sum(singular > svd_rank * max(spread, 1e-300)))


def locate(sum_: ExpSum, z, c: float, tol_tie: float = TOL_TIE, svd_rank: float = SVD_RANK) -> StratumLocation:
    """
    Locate z relative to the neighbourhoods U_c(Γ^{(k)}).

    z ∈ U_c(Γ^{(k)}) when the exponents of the c-near set affinely span a real
    dimension of at least 2n − k.
    """
    dom = dominance(sum_, z, c, tol_tie=tol_tie)
    n = sum_.dim
    span = affine_rank(sum_.exponents[list(dom.near_set)], svd_rank)
    return StratumLocation(
        region=dom.region,
        stratum_dim=2 * n - span,
        active_span_dim=span,
        near_set=dom.near_set,
        in_U_c={k: span >= 2 * n - k for k in range(2 * n + 1)},
    )


def second_gap(sum_: ExpSum, points) -> np.ndarray:
    """Gap between the largest and second largest real exponent part, per point."""
    real = sum_.real_parts(points)
    if real.shape[1] < 2:
        return np.full(real.shape[0], np.inf)
    top2 = np.partition(real, -2, axis=1)[:, -2:]
    return top2[:, 1] - top2[:, 0]


def skeleton_distance(sum_: ExpSum, z, skeleton=None) -> float:
    """
    Distance from z to the skeleton.

    With a planar Skeleton2D the exact Euclidean distance to its edges is
    returned; otherwise the distance to the nearest bisector hyperplane of the
    dominant term, min_j (f_i − f_j)/|m_i − m_j|. The skeleton lies in the union
    of those hyperplanes, so this is a lower bound; cells are convex, so it is
    attained in ℂⁿ and only falls short of skeletons clipped to a window.
    """
    if skeleton is not None:
        if sum_.dim != 1:
            raise ValueError("Exact skeleton distances are planar only")
        return skeleton.distance(z)

    vec = as_vector(z, sum_.dim)
    real = sum_.real_parts(vec[None, :])[0]
    if real.size < 2:
        return float('inf')
    i = int(np.argmax(real))
    others = np.flatnonzero(np.arange(real.size) != i)
    norms = np.linalg.norm(sum_.exponents[i][None, :] - sum_.exponents[others], axis=1)
    return float(np.min((real[i] - real[others]) / norms))
