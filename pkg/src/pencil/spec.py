import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from ..core.expsum import ExpSum

logger = logging.getLogger(__name__)

# log-scale stand-in for τ = −∞ at a disk center
TAU_FLOOR = -1e308
CANCEL_TOL = 1e-12
WEIGHT_FLOOR = 1e-300
LEG_TOL = 1e-9


@dataclass(frozen=True)
class ExtendedComplex:
    """A point of ℂ ∪ {∞}."""

    value: complex = 0j
    infinite: bool = False

    @classmethod
    def of(cls, t) -> "ExtendedComplex":
        if isinstance(t, ExtendedComplex):
            return t
        if isinstance(t, str):
            if t.strip().lower() in ('inf', 'infinity', '∞'):
                return INFINITY
            t = complex(t.replace(' ', ''))
        t = complex(t)
        if np.isinf(t.real) or np.isinf(t.imag):
            return INFINITY
        if np.isnan(t.real) or np.isnan(t.imag):
            raise ValueError("Pencil parameter must not be NaN")
        return cls(t, False)

    def inverse(self) -> "ExtendedComplex":
        if self.infinite:
            return ExtendedComplex(0j)
        if self.value == 0:
            return INFINITY
        return ExtendedComplex(1 / self.value)

    def __repr__(self) -> str:
        return "∞" if self.infinite else f"{self.value:.6g}"


INFINITY = ExtendedComplex(0j, True)


@dataclass(frozen=True)
class TreeCoord:
    """Position τ_t on the tree Υ: the root vertex or a point of leg j."""

    leg: Optional[int]
    tau: float = 0.0

    def __post_init__(self):
        if self.leg is None and self.tau != 0.0:
            raise ValueError(f"Root coordinate must have tau = 0, got {self.tau}")
        if self.tau > 0:
            raise ValueError(f"tau must be nonpositive, got {self.tau}")

    @property
    def is_root(self) -> bool:
        return self.leg is None

    @property
    def at_limit(self) -> bool:
        """τ = −∞ (disk center)."""
        return self.tau <= TAU_FLOOR


ROOT = TreeCoord(None, 0.0)


@dataclass(frozen=True)
class PencilMember:
    """The fiber sum μ_t with the indices of cancelled terms."""

    sum: ExpSum
    dropped: Tuple[int, ...]
    kept: Tuple[int, ...]

    @property
    def flagged(self) -> bool:
        return bool(self.dropped)


@dataclass(frozen=True, eq=False)
class PencilSpec:
    """
    Pencil μ_t = μ_0 + tμ_∞ on a shared exponent set.

    Coefficients satisfy |e^{α_{0,j}}| = |e^{α_{∞,j}}|, so a_{t,j} =
    e^{α_{∞,j}}(ρ_j + t) with ρ_j = e^{α_{0,j} − α_{∞,j}} on the unit circle.
    Terms with a common ρ form one leg of the tree Υ (section pencils);
    otherwise every term is its own leg.
    """

    exponents: np.ndarray
    alpha0: np.ndarray
    alphainf: np.ndarray
    r0: float
    separation: float
    legs: Tuple[Tuple[int, ...], ...]
    section: bool = False
    N: Optional[int] = None

    @classmethod
    def build(
        cls,
        exponents,
        alpha0,
        alphainf,
        r0: Optional[float] = None,
        section: bool = False,
        N: Optional[int] = None,
        leg_tol: float = LEG_TOL,
    ) -> "PencilSpec":
        """
        Validate the pencil data and derive legs, separation and r0.

        Args:
            exponents: Shared exponents, shape (L,) or (L, n)
            alpha0: Log-coefficients of μ_0
            alphainf: Log-coefficients of μ_∞
            r0: Leg disk radius (default: half the minimal chord between leg centers)
            section: Use the colored-section form of τ_t
            N: Number of colors (section pencils)
            leg_tol: Tolerance for grouping equal ratios into one leg

        Raises:
            ValueError: shape mismatch, unequal moduli, overlapping leg disks
        """
        exponents = np.array(exponents, dtype=complex)
        if exponents.ndim == 1:
            exponents = exponents[:, None]
        alpha0 = np.atleast_1d(np.array(alpha0, dtype=complex))
        alphainf = np.atleast_1d(np.array(alphainf, dtype=complex))
        if not (alpha0.shape == alphainf.shape == (exponents.shape[0],)):
            raise ValueError(
                f"Dimension mismatch: {alpha0.shape[0]} / {alphainf.shape[0]} coefficients for {exponents.shape[0]} exponents"
            )
        if len(set(map(tuple, exponents.tolist()))) != exponents.shape[0]:
            raise ValueError("Pencil exponents must be distinct")
        moduli_gap = np.abs(alpha0.real - alphainf.real)
        if np.any(moduli_gap > 1e-9 * (1 + np.abs(alpha0.real))):
            raise ValueError("Only pencils with |e^{α_0,j}| = |e^{α_∞,j}| are supported")
        if section and (N is None or N < 1):
            raise ValueError("Section pencils need the color count N")

        rho = np.exp(1j * (alpha0.imag - alphainf.imag))
        legs = _group_legs(rho, leg_tol) if section else tuple((i,) for i in range(len(rho)))
        centers = np.array([rho[leg[0]] for leg in legs])

        separation = _min_arc(centers)
        if separation <= leg_tol:
            logger.warning("Pencil ratios e^{α_0−α_∞} are not separated; the pencil is not generic")

        chords = np.abs(centers[:, None] - centers[None, :])
        chords = chords[np.triu_indices(len(centers), k=1)]
        positive = chords[chords > leg_tol]
        half_chord = float(positive.min()) / 2 if positive.size else 0.5
        if r0 is None:
            r0 = half_chord
        elif r0 <= 0:
            raise ValueError(f"r0 must be positive, got {r0}")
        elif positive.size and r0 > half_chord * (1 + 1e-12):
            raise ValueError(f"r0 = {r0} exceeds half the minimal leg distance {half_chord:.6g}; disks overlap")

        for arr in (exponents, alpha0, alphainf):
            arr.setflags(write=False)
        return cls(exponents, alpha0, alphainf, float(r0), float(separation), legs, bool(section), N)

    @property
    def dim(self) -> int:
        return self.exponents.shape[1]

    @property
    def size(self) -> int:
        return self.exponents.shape[0]

    @property
    def rho(self) -> np.ndarray:
        """ρ_j = e^{α_{0,j} − α_{∞,j}} per term."""
        return np.exp(1j * (self.alpha0.imag - self.alphainf.imag))

    @property
    def leg_centers(self) -> np.ndarray:
        """Disk centers −ρ_j of the legs (the values of t cancelling leg j)."""
        rho = self.rho
        return np.array([-rho[leg[0]] for leg in self.legs])

    @property
    def mu0(self) -> ExpSum:
        return ExpSum(self.alpha0, self.exponents)

    @property
    def muinf(self) -> ExpSum:
        return ExpSum(self.alphainf, self.exponents)

    def leg_of(self, index: int) -> int:
        for j, leg in enumerate(self.legs):
            if index in leg:
                return j
        raise ValueError(f"Term {index} out of range")

    def log_coefficients(self, t) -> Tuple[np.ndarray, np.ndarray]:
        """
        log a_{t,j} in stable form and the mask of cancelled terms.

        Args:
            t: Pencil parameter (t = ∞ returns α_∞)

        Returns:
            (log-coefficients, dropped mask); dropped entries are −inf
        """
        t = ExtendedComplex.of(t)
        if t.infinite:
            return self.alphainf.copy(), np.zeros(self.size, dtype=bool)
        factor = self.rho + t.value
        modulus = np.abs(factor)
        dropped = modulus <= CANCEL_TOL * max(1.0, abs(t.value))
        with np.errstate(divide='ignore'):
            logs = self.alphainf + np.log(np.where(dropped, 1.0, factor))
        dropped |= logs.real <= np.log(WEIGHT_FLOOR)
        logs = np.where(dropped, -np.inf, logs)
        return logs, dropped

    def spread(self, t) -> float:
        """
        Range of log|a_{t,j}| − α̃_{τ_t,j} over the surviving terms.

        Fiber zeros lie in U_c of the τ_t skeleton for c = log l + 2·spread.
        """
        logs, dropped = self.log_coefficients(t)
        tilde = _tau_real_parts(self, tree_coordinate(self, t))
        keep = ~dropped & np.isfinite(tilde)
        if np.count_nonzero(keep) < 2:
            return 0.0
        offsets = logs.real[keep] - tilde[keep]
        return float(offsets.max() - offsets.min())

    def containment_constant(self, ts: Iterable) -> float:
        """Smallest c for which fiber containment follows from the coefficient spread at every t."""
        l = max(self.size - 1, 1)
        worst = max((self.spread(t) for t in ts), default=0.0)
        return float(np.log(l) + 2 * worst)


def _group_legs(rho: np.ndarray, tol: float) -> Tuple[Tuple[int, ...], ...]:
    legs: List[List[int]] = []
    centers: List[complex] = []
    for i, value in enumerate(rho):
        for j, center in enumerate(centers):
            if abs(value - center) <= tol:
                legs[j].append(i)
                break
        else:
            legs.append([i])
            centers.append(value)
    return tuple(tuple(leg) for leg in legs)


def _min_arc(points: np.ndarray) -> float:
    if len(points) < 2:
        return float(np.pi)
    angles = np.abs(np.angle(points[:, None] / points[None, :]))
    return float(angles[np.triu_indices(len(points), k=1)].min())


def swap_ends(p: PencilSpec) -> PencilSpec:
    """Relabel μ_0 ↔ μ_∞; the fiber at t becomes the fiber at 1/t up to the factor t."""
    return PencilSpec.build(p.exponents, p.alphainf, p.alpha0, r0=None, section=p.section, N=p.N)


def pencil_sum(p: PencilSpec, t) -> PencilMember:
    """
    Fiber μ_t with a_{t,j} = e^{α_{0,j}} + t·e^{α_{∞,j}} (μ_∞ at t = ∞).

    Raises:
        ValueError: every coefficient cancels
    """
    logs, dropped = p.log_coefficients(t)
    kept = np.flatnonzero(~dropped)
    if kept.size == 0:
        raise ValueError(f"All pencil coefficients vanish at t = {ExtendedComplex.of(t)!r}")
    if np.any(dropped):
        logger.debug(f"Pencil fiber at t = {ExtendedComplex.of(t)!r} drops terms {np.flatnonzero(dropped).tolist()}")
    member = ExpSum(logs[kept], p.exponents[kept])
    return PencilMember(member, tuple(int(i) for i in np.flatnonzero(dropped)), tuple(int(i) for i in kept))


def tree_coordinate(p: PencilSpec, t) -> TreeCoord:
    """
    Map t to the tree Υ.

    Generic pencils: t in the disk |t + ρ_j| ≤ r0 maps to leg j at
    τ = log(|t + ρ_j|/r0). Section pencils: t with |(N/π)log(t/ζ_j)| ≤ 1 maps
    to leg j at τ = log|(N/π)log(t/ζ_j)|. Everything else is the root.
    """
    t = ExtendedComplex.of(t)
    if t.infinite:
        return ROOT
    centers = p.leg_centers
    if p.section:
        if t.value == 0:
            return ROOT
        scaled = np.abs((p.N / np.pi) * np.log(t.value / centers))
        inside = np.flatnonzero(scaled <= 1.0)
    else:
        scaled = np.abs(t.value - centers) / p.r0
        inside = np.flatnonzero(scaled <= 1.0)
    if inside.size == 0:
        return ROOT
    leg = int(inside[np.argmin(scaled[inside])])
    value = float(scaled[leg])
    return TreeCoord(leg, float(np.log(value)) if value > 0 else TAU_FLOOR)


def _tau_real_parts(p: PencilSpec, coord: TreeCoord) -> np.ndarray:
    tilde = p.alphainf.real.copy()
    if not coord.is_root:
        members = list(p.legs[coord.leg])
        tilde[members] = -np.inf if coord.at_limit else tilde[members] + coord.tau
    return tilde


def tau_skeleton_sum(p: PencilSpec, coord: TreeCoord) -> ExpSum:
    """
    Real sum Σ e^{α̃_{τ,i} + m_i·z} whose skeleton is Γ̃_τ.

    α̃ = α° at the root; on leg j the leg's entries drop by |τ|, and the
    τ = −∞ sentinel removes them.
    """
    tilde = _tau_real_parts(p, coord)
    keep = np.isfinite(tilde)
    if not np.any(keep):
        raise ValueError("tau skeleton sum has no terms left")
    return ExpSum(tilde[keep].astype(complex), p.exponents[keep])


def t_samples(count: int = 64, radii=(0.5, 1.0, 2.0, 1e6)) -> List[ExtendedComplex]:
    """
    Sample parameters: t = 0, ∞ and points on circles |t| = r.

    Angles sit at half steps so the samples avoid the cancellation points
    of pencils with ratios at roots of unity.
    """
    per_circle = max(1, (count - 2) // len(radii))
    angles = 2 * np.pi * (np.arange(per_circle) + 0.5) / per_circle
    samples = [ExtendedComplex(0j)]
    for radius in radii:
        samples.extend(ExtendedComplex(complex(radius * np.exp(1j * a))) for a in angles)
    samples.append(INFINITY)
    return samples
