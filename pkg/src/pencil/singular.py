import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..core.box import as_box
from ..core.expsum import ExpSum
from ..solve.roots import MERGE_RADIUS, TOL_NEWTON, ZEROS, RootSet, find_roots
from .spec import INFINITY, ExtendedComplex, PencilSpec

logger = logging.getLogger(__name__)

# Both ends count as vanishing below this normalized modulus.
BASE_TOL = 1e-8


@dataclass(frozen=True)
class SingularPoint:
    """A point z where μ_t(z) = dμ_t(z) = 0 for the parameter t."""

    z: complex
    t: ExtendedComplex
    multiplicity: int
    at_base: bool = False


@dataclass
class SingularSet:
    """Singular points of the pencil and its base locus in a window."""

    points: List[SingularPoint] = field(default_factory=list)
    base_points: List[complex] = field(default_factory=list)
    wronskian: Optional[ExpSum] = None
    wronskian_roots: Optional[RootSet] = None

    def __len__(self) -> int:
        return len(self.points)

    @property
    def total_multiplicity(self) -> int:
        """Multiplicity-weighted count of Wronskian zeros."""
        return self.wronskian_roots.total if self.wronskian_roots is not None else 0


def wronskian(p: PencilSpec) -> Optional[ExpSum]:
    """
    W = μ_0·μ_∞′ − μ_0′·μ_∞ assembled on pairwise exponent sums.

    The coefficient of e^{(m_i+m_j)z}, i < j, is
    (m_j − m_i)(e^{α_{0,i}+α_{∞,j}} − e^{α_{0,j}+α_{∞,i}})
    = (m_j − m_i)e^{α_{0,i}+α_{∞,j}}(1 − ρ_j/ρ_i), evaluated in log form.

    Returns:
        W, or None when it vanishes identically (all ratios equal)
    """
    if p.dim != 1:
        raise ValueError("The pencil Wronskian is defined for one-variable pencils")
    m = p.exponents[:, 0]
    rho = p.rho
    i, j = np.triu_indices(p.size, k=1)
    factor = 1 - rho[j] / rho[i]
    keep = np.abs(factor) > 1e-15
    if not np.any(keep):
        return None
    i, j, factor = i[keep], j[keep], factor[keep]
    alphas = np.log(m[j] - m[i]) + p.alpha0[i] + p.alphainf[j] + np.log(factor)
    return ExpSum(alphas, (m[i] + m[j])[:, None])


def _refine_base_point(p: PencilSpec, z: complex, max_iter: int = 50) -> complex:
    """Gauss-Newton on (μ_0, μ_∞); both share b(z) since |e^{α_0}| = |e^{α_∞}|."""
    mu0, muinf = p.mu0, p.muinf
    for _ in range(max_iter):
        _, v0, g0, _ = mu0.log_jet([z], order=1)
        _, vi, gi, _ = muinf.log_jet([z], order=1)
        jac = np.array([g0[0, 0], gi[0, 0]])
        res = np.array([v0[0], vi[0]])
        denom = np.vdot(jac, jac).real
        if denom == 0:
            break
        step = np.vdot(jac, res) / denom
        z = z - step
        if abs(step) < 1e-15 * (1 + abs(z)):
            break
    return complex(z)


def find_pencil_singular(
    p: PencilSpec,
    window,
    grid_density: Optional[int] = None,
    seed: int = 0,
    merge_radius: float = MERGE_RADIUS,
    base_tol: float = BASE_TOL,
) -> SingularSet:
    """
    Singular points of the pencil {μ_t = 0} in a planar window.

    Zeros of the Wronskian W are exactly the points where some μ_t has a
    critical zero; there t = −μ_0(z)/μ_∞(z). Common zeros of μ_0 and μ_∞
    are base points: every fiber passes through them and the singular
    fiber there is t = −μ_0′(z)/μ_∞′(z).

    Raises:
        ValueError: n ≠ 1 (the general case characterizes singular points as
            zeros of (μ_t, dμ_t) over ℂP¹ × B_r, which is not solved here)
    """
    if p.dim != 1:
        raise ValueError(
            "Pencil singular points are computed for n = 1 only; for general n they are the zeros "
            "of (mu_t, d mu_t) over CP^1 x B_r"
        )
    window = as_box(window)
    w = wronskian(p)
    result = SingularSet(wronskian=w)
    if w is None:
        logger.warning("Wronskian vanishes identically; every fiber is a multiple of one sum")
        return result

    roots = find_roots(w, window, ZEROS, grid_density=grid_density, seed=seed, merge_radius=merge_radius)
    result.wronskian_roots = roots
    mu0, muinf = p.mu0, p.muinf
    for root in roots:
        z = root.z
        _, v0, g0, _ = mu0.log_jet([z], order=1)
        _, vi, gi, _ = muinf.log_jet([z], order=1)
        v0, vi, g0, gi = v0[0], vi[0], g0[0, 0], gi[0, 0]
        if abs(v0) < base_tol and abs(vi) < base_tol:
            z = _refine_base_point(p, z)
            _, v0, g0, _ = mu0.log_jet([z], order=1)
            _, vi, gi, _ = muinf.log_jet([z], order=1)
            residual = max(abs(v0[0]), abs(vi[0]))
            if residual >= TOL_NEWTON:
                logger.warning(f"Base point near {z:.6g} refined only to residual {residual:.2e}")
            result.base_points.append(z)
            t = INFINITY if gi[0, 0] == 0 else ExtendedComplex(complex(-g0[0, 0] / gi[0, 0]))
            result.points.append(SingularPoint(z, t, max(1, root.multiplicity - 1), at_base=True))
            continue
        # shared normalization: t is the plain ratio of normalized values
        t = INFINITY if abs(vi) < base_tol * max(1.0, abs(v0)) else ExtendedComplex(complex(-v0 / vi))
        result.points.append(SingularPoint(z, t, root.multiplicity))

    logger.info(
        f"Pencil singular set: {len(result.points)} point(s), {len(result.base_points)} base point(s), "
        f"Wronskian count {result.total_multiplicity}"
    )
    return result
