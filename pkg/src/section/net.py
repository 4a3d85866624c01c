import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..core.box import Box, as_box
from ..core.genericity import TOL_RANK, exponent_set_quality

logger = logging.getLogger(__name__)


@dataclass
class Net:
    """
    ε-net {p_i} on a planar domain, optionally on the flat torus.

    Attributes:
        points: Net points (complex, inside the domain)
        epsilon: Covering radius ε
        domain: Planar Box
        periodic: Distances use the minimum image on the torus domain
        delta: Minimal simplex quality over simplices with edges ≤ 2ε
        c1: Separation slack, pairwise distances exceed (1 − c1)ε
        flagged: The genericity target was not reached for some point
    """

    points: np.ndarray
    epsilon: float
    domain: Box
    periodic: bool = False
    delta: float = float('nan')
    c1: float = 0.0
    flagged: bool = False
    target: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        self.points = np.atleast_1d(np.asarray(self.points, dtype=complex))
        self.domain = as_box(self.domain)
        if self.domain.dim != 1:
            raise ValueError("Nets live on planar domains")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    @property
    def size(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return self.size

    @property
    def periods(self) -> Tuple[float, float]:
        w = self.domain.widths
        return float(w[0]), float(w[1])

    def wrap(self, z) -> np.ndarray:
        """Map points into the torus domain [lower, upper)."""
        z = np.asarray(z, dtype=complex)
        if not self.periodic:
            return z
        (x0, y0), (wx, wy) = self.domain.lower, self.periods
        return (x0 + np.mod(z.real - x0, wx)) + 1j * (y0 + np.mod(z.imag - y0, wy))

    def displacement(self, z) -> np.ndarray:
        """z − p_i for every net point, minimum image when periodic; shape (M, N)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        d = z[:, None] - self.points[None, :]
        if self.periodic:
            wx, wy = self.periods
            d = (d.real - wx * np.round(d.real / wx)) + 1j * (d.imag - wy * np.round(d.imag / wy))
        return d

    def distances(self, z) -> np.ndarray:
        return np.abs(self.displacement(z))

    def min_separation(self) -> float:
        if self.size < 2:
            return float('inf')
        d = self.distances(self.points)
        np.fill_diagonal(d, np.inf)
        return float(d.min())

    def _tree(self) -> cKDTree:
        coords = np.stack([self.points.real, self.points.imag], axis=1)
        if self.periodic:
            lower = np.asarray(self.domain.lower)
            widths = self.domain.widths
            return cKDTree(_fold(coords - lower, widths), boxsize=widths)
        return cKDTree(coords)

    def _query_coords(self, z: np.ndarray) -> np.ndarray:
        coords = np.stack([z.real, z.imag], axis=1)
        if self.periodic:
            coords = _fold(coords - np.asarray(self.domain.lower), self.domain.widths)
        return coords

    def nearest(self, z) -> Tuple[np.ndarray, np.ndarray]:
        """Distance to and index of the nearest net point."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return self._tree().query(self._query_coords(z))

    def cover_radius(self, resolution: Optional[float] = None) -> float:
        """Largest distance from a domain grid point to the net."""
        h = resolution or self.epsilon / 10
        density = int(np.ceil(np.max(self.domain.widths) / h)) + 1
        dist, _ = self.nearest(self.domain.grid(density))
        return float(dist.max())

    def neighbourhood(self, z: complex, radius: float) -> Tuple[np.ndarray, np.ndarray]:
        """Indices and (unwrapped) positions of net points within radius of z."""
        d = self.displacement(z)[0]
        idx = np.flatnonzero(np.abs(d) <= radius)
        return idx, z - d[idx]

    def replicated(self, reach: float) -> Tuple[np.ndarray, np.ndarray]:
        """
        Net points together with the lattice translates within `reach` of the domain.

        Returns:
            (positions, source indices); non-periodic nets return the points themselves
        """
        if not self.periodic:
            return self.points.copy(), np.arange(self.size)
        wx, wy = self.periods
        (x0, y0), (x1, y1) = self.domain.lower, self.domain.upper
        nx, ny = int(np.ceil(reach / wx)) + 1, int(np.ceil(reach / wy)) + 1
        positions, sources = [], []
        for a in range(-nx, nx + 1):
            for b in range(-ny, ny + 1):
                shifted = self.points + a * wx + 1j * b * wy
                dx = np.maximum.reduce([x0 - shifted.real, np.zeros(self.size), shifted.real - x1])
                dy = np.maximum.reduce([y0 - shifted.imag, np.zeros(self.size), shifted.imag - y1])
                keep = np.hypot(dx, dy) <= reach
                positions.append(shifted[keep])
                sources.append(np.flatnonzero(keep))
        return np.concatenate(positions), np.concatenate(sources)

    def local_quality(self, z: complex, tol_rank: float = TOL_RANK) -> float:
        """Quality δ of the simplices through z whose edges are at most 2ε."""
        _, positions = self.neighbourhood(z, 2 * self.epsilon)
        positions = positions[np.abs(positions - z) > 1e-12]
        pts = np.concatenate([[z], positions])
        return exponent_set_quality(pts, n=1, cutoff=2 * self.epsilon, must_include=0, tol_rank=tol_rank).delta_set

    def quality(self, tol_rank: float = TOL_RANK) -> float:
        if self.size == 0:
            return 1.0
        return float(min(self.local_quality(p, tol_rank) for p in self.points))

    def cell_radii(self, resolution: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        Inner and outer radii of the Voronoi cells U_i.

        The inner radius is half the distance to the nearest other point; the
        outer radius is the largest distance to a grid point of the cell.
        """
        if self.size < 2:
            inner = np.full(self.size, np.inf)
        else:
            d = self.distances(self.points)
            np.fill_diagonal(d, np.inf)
            inner = d.min(axis=1) / 2
        h = resolution or self.epsilon / 10
        density = int(np.ceil(np.max(self.domain.widths) / h)) + 1
        dist, owner = self.nearest(self.domain.grid(density))
        outer = np.zeros(self.size)
        np.maximum.at(outer, owner, dist)
        return inner, outer

    def cell_bounds_ok(self, resolution: Optional[float] = None) -> bool:
        """B_{(1−c1)ε/2}(p_i) ⊂ U_i ⊂ B_ε(p_i) for every cell."""
        inner, outer = self.cell_radii(resolution)
        return bool(np.all(inner >= (1 - self.c1) * self.epsilon / 2 - 1e-12) and np.all(outer <= self.epsilon + 1e-12))


def greedy_net(domain, epsilon: float, periodic: bool = False, seed: int = 0) -> "Net":
    """Plain greedy ε-net (no genericity stage)."""
    return generic_net(domain, epsilon, c1=0.0, c2_target=0.0, periodic=periodic, seed=seed, max_tries=1)


def generic_net(
    domain,
    epsilon: float,
    c1: float = 0.2,
    c2_target: float = 0.05,
    periodic: bool = False,
    seed: int = 0,
    max_tries: int = 200,
    tol_rank: float = TOL_RANK,
) -> Net:
    """
    Greedy ε-net whose points are rejection sampled for simplex quality.

    Uncovered points of a grid at resolution ≤ ε/10 are picked at random;
    each new net point is drawn in a ball of radius about c1·ε around the
    picked point until every simplex it forms with net points within 2ε
    has quality at least c2_target. Pairwise distances exceed (1 − c1)ε
    and every grid cell is within ε of the net.

    Args:
        domain: Planar Box (torus fundamental domain when periodic)
        epsilon: Covering radius
        c1: Separation slack in [0, 0.5)
        c2_target: Required local simplex quality
        periodic: Build a net on the flat torus
        seed: Random seed
        max_tries: Samples per point before keeping the best candidate

    Returns:
        Net; `flagged` is set when some point missed the quality target
    """
    domain = as_box(domain)
    if not 0 <= c1 < 0.5:
        raise ValueError(f"c1 must lie in [0, 0.5), got {c1}")
    extent = float(np.min(domain.widths))
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if epsilon >= extent / 4:
        logger.warning(f"epsilon = {epsilon} is large for a domain of extent {extent}")

    rng = np.random.default_rng(seed)
    h = epsilon / 10 if c1 == 0 else min(epsilon / 10, c1 * epsilon / 2)
    density = int(np.ceil(np.max(domain.widths) / h)) + 1
    grid = domain.grid(density)
    spacing = domain.grid_spacing(density)
    # with c1 = 0 the grid itself certifies the cover and separation stays above ε
    cover_tol = epsilon if c1 == 0 else epsilon - spacing / np.sqrt(2)
    sample_radius = max(c1 * epsilon - spacing / np.sqrt(2), 0.0)

    net = Net(np.empty(0, dtype=complex), epsilon, domain, periodic, c1=c1, target=c2_target)
    nearest = np.full(len(grid), np.inf)
    deltas = []
    while True:
        uncovered = np.flatnonzero(nearest > cover_tol)
        if uncovered.size == 0:
            break
        q = grid[rng.choice(uncovered)]
        best, best_delta = q, net.local_quality(q, tol_rank) if net.size else 1.0
        for _ in range(max_tries if sample_radius > 0 else 0):
            if best_delta >= c2_target:
                break
            radius = sample_radius * np.sqrt(rng.uniform())
            candidate = q + radius * np.exp(2j * np.pi * rng.uniform())
            if periodic:
                candidate = complex(net.wrap(candidate))
            elif not domain.contains(candidate):
                continue
            delta = net.local_quality(candidate, tol_rank) if net.size else 1.0
            if delta > best_delta:
                best, best_delta = candidate, delta
        if best_delta < c2_target:
            net.flagged = True
        deltas.append(best_delta)
        net.points = np.append(net.points, best)
        nearest = np.minimum(nearest, np.abs(_min_image(grid - best, domain, periodic)))

    net.delta = net.quality(tol_rank) if net.size else 1.0
    if net.flagged:
        logger.warning(f"Net quality target {c2_target} missed; achieved delta = {net.delta:.4g}")
    logger.info(
        f"Net with {net.size} points: epsilon = {epsilon}, separation = {net.min_separation():.4g}, "
        f"delta = {net.delta:.4g}"
    )
    return net


def _fold(coords: np.ndarray, widths: np.ndarray) -> np.ndarray:
    folded = np.mod(coords, widths)
    return np.where(folded >= widths, 0.0, folded)


def _min_image(d: np.ndarray, domain: Box, periodic: bool) -> np.ndarray:
    if not periodic:
        return d
    wx, wy = domain.widths
    return (d.real - wx * np.round(d.real / wx)) + 1j * (d.imag - wy * np.round(d.imag / wy))
