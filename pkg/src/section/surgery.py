import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..core.box import as_box
from ..core.errors import SearchExhaustedError
from ..core.expsum import ExpSum
from ..pencil.spec import ExtendedComplex, PencilSpec, pencil_sum
from ..solve.roots import MERGE_RADIUS, TOL_NEWTON, ZEROS, Root, RootSet, boundary_mask, merge_points, newton_iterate
from .clusters import Cluster, ClusterSet
from .section import SectionSpec

logger = logging.getLogger(__name__)

MAX_RETRIES = 50
EPS_HAT_RATIO = 0.1


def smooth_step(r: np.ndarray, inner: float, outer: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    C∞ cutoff equal to 1 for r ≤ inner and 0 for r ≥ outer, with its r-derivative.
    """
    s = np.clip((np.asarray(r, dtype=float) - inner) / (outer - inner), 0.0, 1.0)
    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        h_in = np.where(s < 1, np.exp(-1.0 / (1 - s)), 0.0)
        h_out = np.where(s > 0, np.exp(-1.0 / s), 0.0)
        dh_in = np.where(s < 1, h_in / (1 - s) ** 2, 0.0)
        dh_out = np.where(s > 0, h_out / s ** 2, 0.0)
    total = h_in + h_out
    value = h_in / total
    slope = -(dh_in * h_out + h_in * dh_out) / total ** 2 / (outer - inner)
    return value, slope


@dataclass
class _Patch:
    """Per-cluster data of the surgery."""

    cluster: Cluster
    tree: cKDTree
    tail: Optional[ExpSum]
    bump_alpha: complex
    bump_exponent: complex


class SectionField:
    """
    Surgered section s̃ (no ε̂) or ŝ (with ε̂) in the Gaussian frame.

    Inside the 3R1 ball of cluster i the far terms (centers more than 2ε
    from q′_i) are cut off by ρ̃_i; inside the 2R1 ball the peak term at q′_i
    scaled by ε̂_i is added through ρ̂_i. Outside every 3R1 ball the field is
    the holomorphic section itself.
    """

    def __init__(
        self,
        base: ExpSum,
        centers: np.ndarray,
        k: float,
        epsilon: float,
        clusters: ClusterSet,
        eps_hat: Optional[np.ndarray] = None,
    ):
        if base.dim != 1:
            raise ValueError("Section fields are planar")
        self.base = base
        self.centers = np.asarray(centers, dtype=complex)
        self.k = float(k)
        self.epsilon = float(epsilon)
        self.scale = self.k * self.epsilon
        self.clusters = clusters
        self.eps_hat = None if eps_hat is None else np.asarray(eps_hat, dtype=complex)
        if self.eps_hat is not None and len(self.eps_hat) != len(clusters):
            raise ValueError(f"Expected {len(clusters)} eps_hat values, got {len(self.eps_hat)}")
        self._patches = [self._patch(c) for c in clusters]

    @classmethod
    def of(cls, spec: SectionSpec, clusters: ClusterSet, eps_hat=None) -> "SectionField":
        return cls(spec.global_sum, spec.centers, spec.k, spec.epsilon, clusters, eps_hat)

    def _patch(self, cluster: Cluster) -> _Patch:
        coords = np.stack([cluster.members.real, cluster.members.imag], axis=1)
        far = np.flatnonzero(np.abs(self.centers - cluster.center) > 2 * self.epsilon)
        tail = ExpSum(self.base.alphas[far], self.base.exponents[far]) if far.size else None
        q = cluster.center
        # peak term at q′ with modulus e^{b(q′)} at q′
        bump_alpha = self.base.b([q]) - self.k * abs(q) ** 2 / 2
        return _Patch(cluster, cKDTree(coords), tail, complex(bump_alpha), self.k * np.conj(q) / 2)

    def with_eps_hat(self, eps_hat) -> "SectionField":
        return SectionField(self.base, self.centers, self.k, self.epsilon, self.clusters, eps_hat)

    def jet(self, z) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """
        (b, e^{−b}f, e^{−b}∂f, e^{−b}∂̄f) at a batch of planar points.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        b, value, gradient, _ = self.base.log_jet(z, order=1)
        value = value.copy()
        d = gradient[:, 0].copy()
        dbar = np.zeros_like(value)
        R1 = self.clusters.R1

        for i, patch in enumerate(self._patches):
            dist, nearest = patch.tree.query(np.stack([z.real, z.imag], axis=1))
            r = self.scale * dist
            inside = np.flatnonzero(r < 3 * R1)
            if inside.size == 0:
                continue
            zi = z[inside]
            offset = zi - patch.cluster.members[nearest[inside]]
            safe = np.where(dist[inside] > 0, dist[inside], 1.0)
            dr = np.where(dist[inside] > 0, self.scale * np.conj(offset) / (2 * safe), 0)
            dbar_r = np.conj(dr)

            if patch.tail is not None:
                cut, slope = smooth_step(r[inside], 2 * R1, 3 * R1)
                bt, vt, gt, _ = patch.tail.log_jet(zi, order=1)
                factor = np.exp(bt - b[inside])
                vt, gt = vt * factor, gt[:, 0] * factor
                value[inside] -= cut * vt
                d[inside] -= cut * gt + slope * dr * vt
                dbar[inside] -= slope * dbar_r * vt

            if self.eps_hat is not None and self.eps_hat[i] != 0:
                cut, slope = smooth_step(r[inside], R1, 2 * R1)
                bump = np.exp(patch.bump_alpha + patch.bump_exponent * zi - b[inside])
                eps = self.eps_hat[i]
                value[inside] += eps * cut * bump
                d[inside] += eps * (cut * patch.bump_exponent + slope * dr) * bump
                dbar[inside] += eps * slope * dbar_r * bump

        return b, value, d, dbar

    def datum(self, z) -> np.ndarray:
        """Normalized C¹ datum e^{−b}(|f| + (|∇f| + |∂̄f|)/(εk))."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        _, value, d, dbar = self.jet(z)
        covariant = d - self.k * np.conj(z) / 2 * value
        return np.abs(value) + (np.abs(covariant) + np.abs(dbar)) / self.scale

    def log_modulus(self, z) -> np.ndarray:
        """log|f(z)| including the Gaussian frame factor."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        b, value, _, _ = self.jet(z)
        with np.errstate(divide='ignore'):
            return -self.k * np.abs(z) ** 2 / 4 + b + np.log(np.abs(value))

    def touched(self, z) -> np.ndarray:
        """Mask of points inside some 3R1 ball."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        mask = np.zeros(len(z), dtype=bool)
        for cluster in self.clusters:
            mask |= cluster.distance(z) < self.clusters.ball_radius(3)
        return mask


@dataclass
class SurgeryResult:
    s_tilde: SectionField
    s_hat: SectionField
    eps_hat: np.ndarray
    margins: List[float] = field(default_factory=list)
    attempts: List[int] = field(default_factory=list)

    @property
    def min_margin(self) -> float:
        return min(self.margins, default=float('inf'))


def ball_grid(cluster: Cluster, radius: float, density: int = 41) -> np.ndarray:
    """Grid points within `radius` of a cluster's member set."""
    lo = complex(cluster.members.real.min() - radius, cluster.members.imag.min() - radius)
    hi = complex(cluster.members.real.max() + radius, cluster.members.imag.max() + radius)
    box = as_box((lo.real, lo.imag, hi.real, hi.imag))
    grid = box.grid(density)
    return grid[cluster.distance(grid) <= radius]


def _choose_eps_hat(
    field_: SectionField,
    index: int,
    eps_hat: np.ndarray,
    rng: np.random.Generator,
    magnitude: float,
    check: np.ndarray,
    C4: float,
    retries: int,
) -> Tuple[complex, float, int]:
    best_margin, best = -np.inf, 0j
    for attempt in range(1, retries + 1):
        candidate = eps_hat.copy()
        candidate[index] = magnitude * np.exp(2j * np.pi * rng.uniform())
        margin = float(field_.with_eps_hat(candidate).datum(check).min())
        if margin >= C4:
            return complex(candidate[index]), margin, attempt
        if margin > best_margin:
            best_margin, best = margin, complex(candidate[index])
    raise SearchExhaustedError(
        f"No eps_hat for cluster {index} reached C4 = {C4:.3g} in {retries} tries (best {best_margin:.3g}); C3 may be too large",
        best_margin=best_margin,
        best=best,
    )


def _surgery(field_: SectionField, seed: int, retries: int, ratio: float, check_density: int) -> SurgeryResult:
    clusters = field_.clusters
    rng = np.random.default_rng(seed)
    eps_hat = np.zeros(len(clusters), dtype=complex)
    result = SurgeryResult(field_, field_.with_eps_hat(eps_hat), eps_hat)
    for i, cluster in enumerate(clusters):
        check = ball_grid(cluster, clusters.ball_radius(3), check_density)
        value, margin, attempts = _choose_eps_hat(
            field_, i, eps_hat, rng, ratio * clusters.C3, check, clusters.C4, retries
        )
        eps_hat[i] = value
        result.margins.append(margin)
        result.attempts.append(attempts)
        logger.debug(f"Cluster {i} at {cluster.center:.4g}: eps_hat = {value:.3g} after {attempts} tries, margin {margin:.3g}")
    result.eps_hat = eps_hat
    result.s_hat = field_.with_eps_hat(eps_hat)
    return result


def perturb_section(
    spec: SectionSpec,
    clusters: ClusterSet,
    seed: int = 0,
    retries: int = MAX_RETRIES,
    eps_hat_ratio: float = EPS_HAT_RATIO,
    check_density: int = 41,
) -> SurgeryResult:
    """
    Remove near-critical clusters of a section by local surgery.

    s̃ replaces the section by its local model near each cluster; ŝ adds a
    constant of modulus eps_hat_ratio·C3 and random phase, retried until the
    normalized C¹ datum on the cluster's 3R1 ball stays above C4.

    Raises:
        SearchExhaustedError: some cluster failed `retries` times
    """
    result = _surgery(SectionField.of(spec, clusters), seed, retries, eps_hat_ratio, check_density)
    if len(clusters):
        logger.info(f"Surgery on {len(clusters)} cluster(s): min margin {result.min_margin:.3g} (C4 = {clusters.C4:.3g})")
    return result


def perturb_pencil(
    spec: SectionSpec,
    pencil: PencilSpec,
    clusters: ClusterSet,
    t,
    eps_hat0=None,
    eps_hatinf=None,
    seed: int = 0,
) -> SectionField:
    """
    Surgered fiber ŝ_t of a colored section pencil with ε̂_t = ε̂_0 + t·ε̂_∞.

    Missing ε̂ ends are drawn at magnitude 0.1·C3 with random phase.
    """
    if pencil.size != len(spec.centers):
        raise ValueError("Pencil does not share the exponents of the section")
    rng = np.random.default_rng(seed)
    magnitude = EPS_HAT_RATIO * clusters.C3

    def draw():
        return magnitude * np.exp(2j * np.pi * rng.uniform(size=len(clusters)))

    eps_hat0 = draw() if eps_hat0 is None else np.asarray(eps_hat0, dtype=complex)
    eps_hatinf = draw() if eps_hatinf is None else np.asarray(eps_hatinf, dtype=complex)
    t = ExtendedComplex.of(t)
    eps_hat = eps_hatinf if t.infinite else eps_hat0 + t.value * eps_hatinf
    member = pencil_sum(pencil, t)
    kept = np.asarray(member.kept)
    return SectionField(member.sum, spec.centers[kept], spec.k, spec.epsilon, clusters, eps_hat)


def _field_step(field_: SectionField):
    def step(z: np.ndarray):
        _, value, d, dbar = field_.jet(z[:, 0])
        fx = d + dbar
        fy = 1j * (d - dbar)
        a, b_, c, e = fx.real, fx.imag, fy.real, fy.imag
        det = a * e - b_ * c
        with np.errstate(divide='ignore', invalid='ignore'):
            dx = (e * value.real - c * value.imag) / det
            dy = (-b_ * value.real + a * value.imag) / det
        return (dx + 1j * dy)[:, None], np.abs(value)

    return step


def field_zeros(
    field_: SectionField,
    window,
    grid_density: int = 100,
    seed_threshold: float = 0.5,
    merge_radius: float = MERGE_RADIUS,
    tol_newton: float = TOL_NEWTON,
    max_iter: int = 80,
) -> RootSet:
    """
    Zeros of a surgered field by real-Jacobian Newton from grid seeds.

    Multiplicities are the sign of the real Jacobian |∂f|² − |∂̄f|², so
    holomorphic zeros count +1.
    """
    window = as_box(window)
    grid = window.grid(grid_density)
    _, value, _, _ = field_.jet(grid)
    seeds = grid[np.abs(value) < seed_threshold][:, None]
    step = _field_step(field_)
    spacing = window.grid_spacing(grid_density)
    z, res = newton_iterate(step, seeds, 2 * spacing, max_iter, tol_newton, bound=window.diameter)
    ok = np.isfinite(res) & (res < tol_newton) & window.contains(z, tol=merge_radius)
    z, res = z[ok], res[ok]
    kept = merge_points(z, res, merge_radius)
    z, res = z[kept], res[kept]

    _, _, d, dbar = field_.jet(z[:, 0])
    signs = np.sign(np.abs(d) ** 2 - np.abs(dbar) ** 2).astype(int)
    boundary = boundary_mask(window, z, merge_radius)
    roots = [
        Root((complex(loc[0]),), int(sign), float(r), bool(bd))
        for loc, sign, r, bd in zip(z, signs, res, boundary)
    ]
    roots.sort(key=lambda r: (round(r.z.real, 9), round(r.z.imag, 9)))
    logger.debug(f"Field zeros: {len(roots)} from {len(seeds)} seeds")
    return RootSet(roots, ZEROS, window, grid_density)
