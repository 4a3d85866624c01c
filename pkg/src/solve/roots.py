import logging
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..core.box import Box, as_box
from ..core.errors import ExpSkelError, RootOnContourError
from ..core.expsum import ExpSum
from ..core.parallel import parallel_map
from .winding import VALUE, Circle, count_winding

logger = logging.getLogger(__name__)

ZEROS = 'zeros'
CRITICAL = 'critical'
CRITICAL_ZEROS = 'critical_zeros'
MODES = (ZEROS, CRITICAL, CRITICAL_ZEROS)

MERGE_RADIUS = 1e-6
TOL_NEWTON = 1e-10
# Seeds are kept where the non-dominant terms carry at least this much weight.
CROWDING_MIN = 0.05


@dataclass(frozen=True)
class Root:
    """A converged root with its multiplicity and normalized residual."""

    location: Tuple[complex, ...]
    multiplicity: int
    residual: float
    boundary: bool = False

    @property
    def z(self) -> complex:
        """Planar location (first coordinate)."""
        return self.location[0]


@dataclass
class RootSet:
    """Deduplicated roots of μ, ∇μ or the joint system in a window."""

    points: List[Root]
    mode: str
    window: Optional[Box] = None
    grid_density: int = 0
    boundary_count: Optional[int] = None
    refinements: int = 0

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Root]:
        return iter(self.points)

    @property
    def locations(self) -> np.ndarray:
        """Root locations of shape (N, n)."""
        if not self.points:
            dim = self.window.dim if self.window is not None else 1
            return np.empty((0, dim), dtype=complex)
        return np.array([r.location for r in self.points], dtype=complex)

    @property
    def planar(self) -> np.ndarray:
        return self.locations[:, 0]

    @property
    def total(self) -> int:
        """Multiplicity-weighted count."""
        return sum(r.multiplicity for r in self.points)

    def count_inside(self, contour, half_open: bool = True) -> int:
        """Multiplicity-weighted count of roots inside a Circle or Box."""
        if not self.points:
            return 0
        if isinstance(contour, Circle):
            inside = contour.contains(self.planar)
        else:
            inside = as_box(contour).contains(self.locations, half_open=half_open)
        return int(sum(r.multiplicity for r, hit in zip(self.points, inside) if hit))


def derivative_sum(sum_: ExpSum, axis: int = 0) -> Optional[ExpSum]:
    """
    ∂μ/∂z_axis as an exponential sum (terms with zero exponent component drop out).

    Returns:
        The derivative sum, or None when μ does not depend on z_axis
    """
    m = sum_.exponents[:, axis]
    keep = m != 0
    if not np.any(keep):
        return None
    return ExpSum(sum_.alphas[keep] + np.log(m[keep]), sum_.exponents[keep])


def crowding(sum_: ExpSum, points, chunk: int = 4096) -> np.ndarray:
    """Total normalized weight of the non-dominant terms, Σ_{j≠top} e^{f_j − b}."""
    pts = sum_.as_points(points)
    out = np.empty(len(pts))
    for start in range(0, len(pts), chunk):
        real = sum_.real_parts(pts[start:start + chunk])
        out[start:start + chunk] = np.exp(real - real.max(axis=1, keepdims=True)).sum(axis=1) - 1.0
    return out


def auto_density(sum_: ExpSum, window: Box, lo: int = 32, hi: int = 800) -> int:
    """
    Seed density resolving the root spacing 2π/|m_i − m_j| of the locally
    dominant pairs.
    """
    if sum_.size < 2:
        return lo
    coarse = sum_.as_points(window.grid(33))
    real = sum_.real_parts(coarse)
    top2 = np.argsort(real, axis=1)[:, -2:]
    jumps = np.linalg.norm(sum_.exponents[top2[:, 1]] - sum_.exponents[top2[:, 0]], axis=1)
    density = int(np.ceil(np.max(window.widths) * float(jumps.max()))) + 1
    return int(np.clip(density, lo, hi))


def boundary_mask(window: Box, locations: np.ndarray, radius: float) -> np.ndarray:
    coords = window.to_real(locations)
    margin = np.minimum(coords - np.asarray(window.lower), np.asarray(window.upper) - coords)
    return margin.min(axis=1) <= radius


def newton_iterate(
    step_fn: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
    seeds: np.ndarray,
    step_cap: float,
    max_iter: int,
    tol: float,
    bound: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized (Gauss-)Newton iteration.

    step_fn maps points (s, n) to (step (s, n), residual (s,)) at those points.
    Seeds whose step becomes non-finite or that run further than `bound`
    from the origin of their seed are dropped (residual inf).
    """
    z = seeds.copy()
    residual = np.full(len(z), np.inf)
    active = np.ones(len(z), dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        step, res = step_fn(z[idx])
        residual[idx] = res
        finite = np.all(np.isfinite(step), axis=1)
        norm = np.where(finite, np.linalg.norm(np.where(finite[:, None], step, 0), axis=1), 0.0)
        scale = np.where(norm > step_cap, step_cap / np.maximum(norm, 1e-300), 1.0)
        z[idx] -= np.where(finite[:, None], step * scale[:, None], 0)
        lost = ~finite | (np.linalg.norm(z[idx] - seeds[idx], axis=1) > bound)
        residual[idx[lost]] = np.inf
        scale_z = 1.0 + np.linalg.norm(z[idx], axis=1)
        done = lost | (norm <= 1e-14 * scale_z) | ((res <= 1e-3 * tol) & (norm <= 1e-9 * scale_z))
        active[idx[done]] = False

    keep = np.isfinite(residual)
    if np.any(keep):
        _, final = step_fn(z[keep])
        residual[keep] = final
    return z, residual


def merge_points(points: np.ndarray, residuals: np.ndarray, radius: float) -> List[int]:
    """Greedy deduplication keeping the lowest-residual representative."""
    if len(points) == 0:
        return []
    coords = np.concatenate([points.real, points.imag], axis=1)
    tree = cKDTree(coords)
    taken = np.zeros(len(points), dtype=bool)
    kept = []
    for i in np.argsort(residuals, kind='stable'):
        if taken[i]:
            continue
        kept.append(int(i))
        taken[tree.query_ball_point(coords[i], radius)] = True
    return kept


class _Target:
    """Newton system of one find_roots mode."""

    def __init__(self, sum_: ExpSum, mode: str):
        self.sum = sum_
        self.mode = mode
        self.dim = sum_.dim
        self.planar_target = None
        if self.dim == 1:
            self.planar_target = sum_ if mode == ZEROS else derivative_sum(sum_)

    def step(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if self.dim == 1:
            _, v, g, _ = self.planar_target.log_jet(z, order=1)
            with np.errstate(divide='ignore', invalid='ignore'):
                step = (v / g[:, 0])[:, None]
            return step, np.abs(v)
        _, v, g, h = self.sum.log_jet(z, order=2)
        if self.mode == CRITICAL:
            det = h[:, 0, 0] * h[:, 1, 1] - h[:, 0, 1] * h[:, 1, 0]
            with np.errstate(divide='ignore', invalid='ignore'):
                step = np.stack([
                    h[:, 1, 1] * g[:, 0] - h[:, 0, 1] * g[:, 1],
                    -h[:, 1, 0] * g[:, 0] + h[:, 0, 0] * g[:, 1],
                ], axis=1) / det[:, None]
            return step, np.linalg.norm(g, axis=1)
        system = np.concatenate([v[:, None], g], axis=1)
        jac = np.concatenate([g[:, None, :], h], axis=1)
        step = np.einsum('sij,sj->si', np.linalg.pinv(jac), system)
        return step, np.abs(system).max(axis=1)

    def residual(self, z: np.ndarray) -> np.ndarray:
        _, res = self.step(z)
        if self.dim == 1 and self.mode == CRITICAL_ZEROS:
            _, v, _, _ = self.sum.log_jet(z, order=0)
            res = np.maximum(res, np.abs(v))
        return res


def _seeds(target: _Target, window: Box, density: int, rng: np.random.Generator) -> np.ndarray:
    grid = window.grid(density)
    if window.dim == 1:
        h = window.grid_spacing(density)
        grid = grid + rng.uniform(-0.25, 0.25, grid.shape) * h + 1j * rng.uniform(-0.25, 0.25, grid.shape) * h
        seeds = grid[crowding(target.planar_target, grid) >= CROWDING_MIN]
        return seeds[:, None]
    return grid


def multiplicity_radii(points: np.ndarray, cap: float, floor: float) -> np.ndarray:
    """Per-root circle radii: half the distance to the nearest other root, at most cap."""
    radii = np.full(len(points), cap)
    if len(points) > 1:
        coords = np.stack([points.real, points.imag], axis=1)
        nearest, _ = cKDTree(coords).query(coords, k=2)
        radii = np.minimum(radii, 0.5 * nearest[:, 1])
    return np.maximum(radii, floor)


def _multiplicity(target_sum: ExpSum, z: complex, radius: float) -> int:
    try:
        return max(1, count_winding(target_sum, VALUE, Circle(z, radius)))
    except (RootOnContourError, ExpSkelError) as e:
        logger.debug(f"Multiplicity at {z:.6g} defaulted to 1: {e}")
        return 1


def find_roots(
    sum_: ExpSum,
    window,
    mode: str = ZEROS,
    grid_density: Optional[int] = None,
    seed: int = 0,
    merge_radius: float = MERGE_RADIUS,
    tol_newton: float = TOL_NEWTON,
    max_iter: int = 80,
    max_refine: int = 3,
    workers: Optional[int] = None,
) -> RootSet:
    """
    Find zeros, critical points or critical zeros of μ in a window.

    Newton iterations start from a jittered grid restricted to points where
    the dominant term is crowded (near the skeleton). For one variable the
    result is checked against the winding number along the window boundary
    and the grid is doubled on a mismatch.

    Args:
        sum_: Exponential sum with n ∈ {1, 2}
        window: Box (or planar bounds) to search
        mode: 'zeros', 'critical' or 'critical_zeros'
        grid_density: Seeds per real axis (auto when None)
        seed: Jitter seed
        merge_radius: Deduplication radius
        tol_newton: Accepted normalized residual
        max_iter: Newton iterations per seed
        max_refine: Grid doublings for the completeness check
        workers: Thread count for multiplicity counts

    Returns:
        RootSet sorted by location
    """
    if mode not in MODES:
        raise ValueError(f"Invalid mode: {mode}; expected one of {MODES}")
    window = as_box(window)
    n = sum_.dim
    if n not in (1, 2):
        raise ValueError(f"find_roots supports n = 1 or 2, got n = {n}")
    if window.dim != n:
        raise ValueError(f"Dimension mismatch: window in C^{window.dim}, sum in C^{n}")
    if n == 2 and mode == ZEROS:
        raise ValueError("Zeros of two-variable sums are curves; use critical or critical_zeros")

    target = _Target(sum_, mode)
    if n == 1 and (target.planar_target is None or target.planar_target.size < 2):
        logger.info(f"No isolated {mode} for a sum with {sum_.size} term(s)")
        return RootSet([], mode, window, grid_density or 0)

    if grid_density is None:
        grid_density = auto_density(target.planar_target, window) if n == 1 else 8
    rng = np.random.default_rng(seed)
    density = int(grid_density)
    found = np.empty((0, n), dtype=complex)
    found_res = np.empty(0)
    roots: List[Root] = []
    boundary_count = None
    refinements = 0

    while True:
        seeds = _seeds(target, window, density, rng)
        step_cap = 2.0 * window.grid_spacing(density)
        z, res = newton_iterate(target.step, seeds, step_cap, max_iter, tol_newton, bound=window.diameter)
        ok = np.isfinite(res) & window.contains(z, tol=merge_radius)
        if np.any(ok):
            res[ok] = target.residual(z[ok])
        ok &= res < tol_newton
        found = np.concatenate([found, z[ok]])
        found_res = np.concatenate([found_res, res[ok]])
        kept = merge_points(found, found_res, merge_radius)
        found, found_res = found[kept], found_res[kept]
        logger.debug(f"{len(seeds)} seeds at density {density} -> {len(found)} distinct {mode}")

        boundary = boundary_mask(window, found, merge_radius)
        if n == 1:
            radii = multiplicity_radii(found[:, 0], 0.25 * window.grid_spacing(density), 10 * merge_radius)
            mults = parallel_map(
                lambda item: _multiplicity(target.planar_target, item[0], item[1]),
                list(zip(found[:, 0], radii)),
                workers,
            )
        else:
            mults = [1] * len(found)
        roots = [
            Root(tuple(complex(c) for c in loc), int(m), float(r), bool(bd))
            for loc, m, r, bd in zip(found, mults, found_res, boundary)
        ]

        if n != 1 or mode == CRITICAL_ZEROS or np.any(boundary):
            break
        try:
            boundary_count = count_winding(target.planar_target, VALUE, window)
        except (RootOnContourError, ExpSkelError) as e:
            logger.debug(f"Completeness check skipped: {e}")
            break
        total = sum(r.multiplicity for r in roots)
        if total == boundary_count:
            break
        if refinements >= max_refine:
            logger.warning(f"Found {total} {mode} but the boundary winding number is {boundary_count}")
            break
        refinements += 1
        density *= 2
        logger.info(f"Root count {total} != winding {boundary_count}; refining seeds to density {density}")

    flagged = sum(r.boundary for r in roots)
    if flagged:
        logger.warning(f"{flagged} root(s) within {merge_radius:g} of the window boundary")
    roots.sort(key=lambda r: tuple(v for c in r.location for v in (round(c.real, 9), round(c.imag, 9))))
    return RootSet(roots, mode, window, density, boundary_count, refinements)
