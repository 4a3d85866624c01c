import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.box import as_box
from ..core.errors import PreconditionError, RootOnContourError, SearchExhaustedError
from ..core.expsum import TOL_TIE, ExpSum
from ..core.parallel import parallel_map
from ..skeleton.locate import SVD_RANK, affine_rank, locate
from .roots import ZEROS, find_roots
from .winding import DERIVATIVE, Circle, count_winding

logger = logging.getLogger(__name__)

ZERO_CONTAINMENT = 'zero_containment'
C1_LOWER = 'c1_lower'
VANISHING = 1e-12


@dataclass
class BoundReport:
    """Outcome of a grid or root sweep checking one of the bound propositions."""

    mode: str
    c_used: float
    violations: List[Tuple[complex, ...]] = field(default_factory=list)
    min_margin: float = float('inf')
    grid_spec: Dict = field(default_factory=dict)
    empirical_c2: Optional[float] = None
    checked: int = 0

    @property
    def holds(self) -> bool:
        return not self.violations


def _outside_mask(sum_: ExpSum, points: np.ndarray, c_1: float, svd_rank: float, chunk: int = 4096) -> np.ndarray:
    """Points outside U_{c_1}(Γ^{(n−1)}): near-set exponents span fewer than n + 1 real dimensions."""
    n = sum_.dim
    outside = np.ones(len(points), dtype=bool)
    for start in range(0, len(points), chunk):
        real = sum_.real_parts(points[start:start + chunk])
        near = (real.max(axis=1, keepdims=True) - real) < c_1
        crowded = np.flatnonzero(near.sum(axis=1) >= n + 2)
        for i in crowded:
            outside[start + i] = affine_rank(sum_.exponents[near[i]], svd_rank) < n + 1
    return outside


def _c1_scan(sum_: ExpSum, window, c_1: float, grid_density: int, svd_rank: float):
    points = sum_.as_points(as_box(window).grid(grid_density))
    outside = _outside_mask(sum_, points, c_1, svd_rank)
    _, value, gradient, _ = sum_.log_jet(points[outside], order=1)
    datum = np.abs(value) + np.linalg.norm(gradient, axis=1)
    return points[outside], datum


def c1_lower_bound(
    sum_: ExpSum,
    window,
    c_1: float,
    grid_density: int = 200,
    svd_rank: float = SVD_RANK,
) -> float:
    """
    Grid estimate of c_2 = inf e^{−b}|μ|_{C¹} away from U_{c_1}(Γ^{(n−1)}).

    Returns:
        Minimum normalized C¹ datum over grid points outside the neighbourhood
        (inf when every grid point lies inside it)
    """
    if c_1 <= 0:
        raise PreconditionError(f"c_1 must be positive, got {c_1}")
    _, datum = _c1_scan(sum_, window, c_1, grid_density, svd_rank)
    return float(datum.min()) if datum.size else float('inf')


def verify_bounds(
    sum_: ExpSum,
    window,
    c: float,
    mode: str = ZERO_CONTAINMENT,
    c_1: Optional[float] = None,
    grid_density: Optional[int] = None,
    seed: int = 0,
    tol_tie: float = TOL_TIE,
    svd_rank: float = SVD_RANK,
) -> BoundReport:
    """
    Numerically check zero containment in U_c(Γ) or the C¹ lower bound.

    Args:
        sum_: Exponential sum
        window: Search window
        c: Containment width; must exceed log l in zero_containment mode
        mode: 'zero_containment' or 'c1_lower'
        c_1: Neighbourhood width for c1_lower
        grid_density: Root seed density (zero_containment) or scan density (c1_lower)
        seed: Seed for root finding

    Returns:
        BoundReport; empty violations means the claim holds on the sample

    Raises:
        PreconditionError: c ≤ log l, or c_1 missing / not positive
    """
    window = as_box(window)
    n = sum_.dim
    if mode == ZERO_CONTAINMENT:
        l = sum_.size - 1
        if l >= 1 and c <= np.log(l):
            raise PreconditionError(f"Zero containment needs c > log l = {np.log(l):.6g}, got c = {c}")
        if n != 1:
            raise ValueError("Zero containment is checked for one-variable sums only")
        roots = find_roots(sum_, window, ZEROS, grid_density=grid_density, seed=seed)
        report = BoundReport(mode, float(c), grid_spec={'window': window.to_list(), 'density': roots.grid_density})
        for root in roots:
            location = locate(sum_, root.location, c, tol_tie=tol_tie, svd_rank=svd_rank)
            gaps = np.sort(sum_.real_parts(np.array([root.location]))[0])[::-1]
            second = gaps[0] - gaps[1] if gaps.size > 1 else float('inf')
            report.min_margin = min(report.min_margin, c - second)
            if not location.in_U_c[2 * n - 1]:
                report.violations.append(root.location)
        report.checked = len(roots)
        logger.info(
            f"Zero containment with c = {c:.4g}: {report.checked} roots, "
            f"{len(report.violations)} violation(s), min margin {report.min_margin:.3g}"
        )
        return report

    if mode == C1_LOWER:
        if c_1 is None or c_1 <= 0:
            raise PreconditionError(f"c1_lower needs a positive c_1, got {c_1}")
        density = grid_density or 200
        points, datum = _c1_scan(sum_, window, c_1, density, svd_rank)
        report = BoundReport(mode, float(c_1), grid_spec={'window': window.to_list(), 'density': density})
        report.checked = len(points)
        if datum.size:
            report.empirical_c2 = float(datum.min())
            report.min_margin = report.empirical_c2
            report.violations = [tuple(p) for p in points[datum < VANISHING]]
        logger.info(
            f"C1 lower bound with c_1 = {c_1:.4g}: {report.checked} grid points outside, "
            f"empirical c_2 = {report.empirical_c2}"
        )
        return report

    raise ValueError(f"Invalid bound mode: {mode}")


def critical_count_bound(
    sum_: ExpSum,
    window,
    samples: int = 100,
    radius: float = 1.0,
    seed: int = 0,
    retries: int = 5,
    workers: Optional[int] = None,
) -> int:
    """
    Largest number of critical points of μ in a disk of the given radius,
    sampled over random centers in the window (one-variable sums).

    Raises:
        SearchExhaustedError: every retried radius around some center passes
            through a critical point
    """
    window = as_box(window)
    rng = np.random.default_rng(seed)
    (x0, y0), (x1, y1) = window.lower, window.upper
    centers = rng.uniform(x0, x1, samples) + 1j * rng.uniform(y0, y1, samples)

    def count(center: complex) -> int:
        smallest = float('inf')
        for attempt in range(retries):
            try:
                return count_winding(sum_, DERIVATIVE, Circle(center, radius * (1 + 1e-3 * attempt)))
            except RootOnContourError as e:
                smallest = min(smallest, e.min_modulus)
        raise SearchExhaustedError(
            f"No contour around {center:.4g} avoids the critical points after {retries} radii",
            best_margin=smallest,
            best=center,
        )

    return max(parallel_map(count, list(centers), workers), default=0)
