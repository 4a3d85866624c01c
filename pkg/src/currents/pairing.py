import logging
from typing import List, Optional, Tuple, Union

import numpy as np
import scipy.integrate as spyint

from ..core.box import Box, as_box
from ..section.net import Net
from ..section.section import SectionSpec
from ..section.surgery import SectionField, field_zeros, smooth_step
from ..section.voronoi import voronoi_segments
from ..solve.roots import ZEROS, RootSet, find_roots
from .testfunctions import TestFunction

logger = logging.getLogger(__name__)

# A simple zero of a holomorphic section carries weight 2π.
ZERO_WEIGHT = 2 * np.pi
# Width of the torus partition of unity, as a fraction of the period.
TORUS_BAND = 0.5


def beta_edges(net: Net, window=None) -> List[Tuple[float, complex, complex]]:
    """
    Edges of the Voronoi skeleton Γ with their β_Γ densities.

    Returns:
        List of (½|p_i − p_j|, start, end) clipped to the window (default:
        the net domain); periodic nets use lattice translates so every torus
        edge appears once
    """
    window = as_box(window) if window is not None else net.domain
    if net.periodic:
        positions, _ = net.replicated(3 * net.epsilon)
    else:
        positions = net.points
    edges = []
    for (i, j), start, end in voronoi_segments(positions, window):
        edges.append((abs(positions[i] - positions[j]) / 2, start, end))
    return edges


def beta_pairing(net: Net, psi: TestFunction, window=None) -> float:
    """
    ⟨[β_Γ], ψ⟩ = Σ over edges of ½|p_i − p_j|·∫_edge ψ ds.

    Each edge integral is computed by adaptive quadrature along the clipped edge.
    """
    total = 0.0
    for density, start, end in beta_edges(net, window):
        length = abs(end - start)
        value, _ = spyint.quad(lambda s: float(psi(start + s * (end - start))), 0.0, 1.0, epsabs=1e-12, limit=200)
        total += density * length * value
    return float(total)


def torus_weights(z, domain, band: float = TORUS_BAND) -> np.ndarray:
    """
    Smooth partition of unity over the lattice translates of a periodic domain.

    The weight is supported on the domain widened by band·period on each side
    and its translates sum to 1 everywhere in the plane.
    """
    if not 0 < band <= 0.5:
        raise ValueError(f"Torus band must lie in (0, 0.5], got {band}")
    domain = as_box(domain)
    z = np.asarray(z, dtype=complex)
    weights = np.ones(z.shape)
    for coord, lo, hi in ((z.real, domain.lower[0], domain.upper[0]), (z.imag, domain.lower[1], domain.upper[1])):
        delta = band * (hi - lo)
        rise = 1.0 - smooth_step(coord, lo - delta, lo + delta)[0]
        fall = smooth_step(coord, hi - delta, hi + delta)[0]
        weights = weights * rise * fall
    return weights


def unfolded_window(domain, band: float = TORUS_BAND) -> Box:
    """Support of torus_weights: the domain widened by band·period on each side."""
    domain = as_box(domain)
    margin = band * np.asarray(domain.widths, dtype=float)
    (x0, y0), (x1, y1) = domain.lower, domain.upper
    return Box.planar(x0 - margin[0], y0 - margin[1], x1 + margin[0], y1 + margin[1])


def wrap_to(z, domain) -> np.ndarray:
    """Representative of z in the half-open periodic domain."""
    domain = as_box(domain)
    z = np.asarray(z, dtype=complex)
    (x0, y0), (wx, wy) = domain.lower, domain.widths
    return (x0 + np.mod(z.real - x0, wx)) + 1j * (y0 + np.mod(z.imag - y0, wy))


def section_zeros(
    target: Union[SectionSpec, SectionField],
    window,
    grid_density: Optional[int] = None,
    seed: int = 0,
    workers: Optional[int] = None,
) -> RootSet:
    """Zeros of a section (holomorphic) or of a surgered field (signed)."""
    window = as_box(window)
    if isinstance(target, SectionField):
        return field_zeros(target, window, grid_density=grid_density or 100)
    return find_roots(target.global_sum, window, ZEROS, grid_density=grid_density, seed=seed, workers=workers)


def zero_pairing(
    target: Union[SectionSpec, SectionField, RootSet],
    psi: TestFunction,
    window=None,
    grid_density: Optional[int] = None,
    seed: int = 0,
    periodic: Optional[bool] = None,
    band: float = TORUS_BAND,
) -> float:
    """
    ⟨[X], ψ⟩ = 2π·Σ multiplicity·ψ(zero).

    Open windows count zeros half-open. Periodic domains (the default for
    sections over periodic nets) weight every zero of the unfolded window
    by torus_weights and evaluate ψ at its representative in the domain,
    so no zero is cut by the domain boundary.

    A RootSet may be passed to reuse zeros across test functions; with
    periodic=True it must cover unfolded_window(window, band).
    """
    if periodic is None:
        net = getattr(target, 'net', None)
        periodic = bool(net is not None and net.periodic)
    if isinstance(target, RootSet):
        roots = target
        window = as_box(window) if window is not None else roots.window
    else:
        if window is None:
            if not isinstance(target, SectionSpec):
                raise ValueError("A window is required for surgered fields")
            window = target.net.domain
        window = as_box(window)
        search = unfolded_window(window, band) if periodic else window
        roots = section_zeros(target, search, grid_density=grid_density, seed=seed)
    if not len(roots):
        return 0.0
    z = roots.planar
    weights = np.array([r.multiplicity for r in roots], dtype=float)
    if periodic:
        return float(ZERO_WEIGHT * np.sum(weights * torus_weights(z, window, band) * psi(wrap_to(z, window))))
    inside = window.contains(z[:, None], half_open=True)
    flagged = sum(r.boundary for r in roots)
    if flagged:
        logger.warning(f"{flagged} zero(s) on the window boundary; counted half-open")
    return float(ZERO_WEIGHT * np.sum(weights[inside] * psi(z[inside])))
