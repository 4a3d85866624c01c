import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..core.box import as_box
from ..core.expsum import ExpSum
from ..core.parallel import parallel_map
from ..skeleton.locate import SVD_RANK, affine_rank, locate
from ..skeleton.planar import build_skeleton_2d
from ..solve.roots import ZEROS, find_roots
from .singular import SingularSet, find_pencil_singular
from .spec import ROOT, ExtendedComplex, PencilSpec, TreeCoord, pencil_sum, t_samples, tau_skeleton_sum, tree_coordinate

logger = logging.getLogger(__name__)

TOL_VERTEX = 1e-7


@dataclass
class FiberCheck:
    """Zero containment of one fiber X_t in U_c(Γ̃_{τ_t})."""

    t: ExtendedComplex
    coord: TreeCoord
    zero_count: int
    violations: List[complex] = field(default_factory=list)
    max_gap: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass
class SingularCheck:
    z: complex
    t: ExtendedComplex
    c_needed: float
    ok: bool


@dataclass
class PencilVerification:
    """Report of the fiber, base-locus and singular-set checks."""

    c: float
    c_singular: float
    containment_constant: float
    fibers: List[FiberCheck] = field(default_factory=list)
    vertex_ok: Optional[bool] = None
    vertex_failures: List[complex] = field(default_factory=list)
    vertex_note: str = ''
    singular: List[SingularCheck] = field(default_factory=list)

    @property
    def fiber_ok(self) -> bool:
        return all(f.ok for f in self.fibers)

    @property
    def singular_ok(self) -> bool:
        return all(s.ok for s in self.singular)

    @property
    def passed(self) -> bool:
        return self.fiber_ok and self.vertex_ok is not False and self.singular_ok


def vertex_gap(sum_: ExpSum, z: complex, svd_rank: float = SVD_RANK) -> float:
    """Smallest c with z ∈ U_c(Γ^{(0)}): the gap at which the near set first spans ℂ."""
    real = sum_.real_parts([z])[0]
    order = np.argsort(-real)
    gaps = real[order[0]] - real[order]
    for count in range(3, len(order) + 1):
        if affine_rank(sum_.exponents[order[:count]], svd_rank) >= 2:
            return float(gaps[count - 1])
    return float('inf')


def _leg_coords(p: PencilSpec, taus: np.ndarray) -> List[TreeCoord]:
    coords = [ROOT]
    for leg in range(len(p.legs)):
        coords.extend(TreeCoord(leg, float(tau)) for tau in taus)
    return coords


def verify_pencil(
    p: PencilSpec,
    window,
    t_values: Optional[Sequence] = None,
    c: Optional[float] = None,
    c_singular: Optional[float] = None,
    tol_vertex: float = TOL_VERTEX,
    grid_density: Optional[int] = None,
    seed: int = 0,
    tau_range: float = 30.0,
    tau_steps: int = 121,
    workers: Optional[int] = None,
    singular: Optional[SingularSet] = None,
) -> PencilVerification:
    """
    Check a planar pencil against its tree of real skeletons.

    (a) zeros of every sampled fiber μ_t lie in U_c of the skeleton of the
        τ_t sum; (b) vertices of the root skeleton lie on every sampled Γ̃_τ;
    (c) every singular point lies within U_{c_singular} of the vertex set of
        some Γ̃_τ, τ scanned along each leg.

    Args:
        p: One-variable pencil
        window: Planar window
        t_values: Sampled parameters (default: t_samples())
        c: Fiber containment width (default: the provable containment constant)
        c_singular: Width for singular points (default: c)
        tol_vertex: Tie tolerance for check (b)
        tau_range: Depth of the τ scan along each leg
        tau_steps: Samples per leg for the τ scan
        singular: Singular set already found in this window (computed when None)

    Returns:
        PencilVerification report
    """
    if p.dim != 1:
        raise ValueError("verify_pencil supports one-variable pencils only")
    window = as_box(window)
    ts = [ExtendedComplex.of(t) for t in (t_values if t_values is not None else t_samples())]
    constant = p.containment_constant(ts)
    c = constant if c is None else float(c)
    c_singular = c if c_singular is None else float(c_singular)
    report = PencilVerification(c=c, c_singular=c_singular, containment_constant=constant)

    def check_fiber(t: ExtendedComplex) -> FiberCheck:
        member = pencil_sum(p, t).sum
        coord = tree_coordinate(p, t)
        check = FiberCheck(t, coord, 0)
        if member.size < 2:
            return check
        tau_sum = tau_skeleton_sum(p, coord)
        roots = find_roots(member, window, ZEROS, grid_density=grid_density, seed=seed, workers=1)
        check.zero_count = roots.total
        for root in roots:
            location = locate(tau_sum, root.z, c)
            real = np.sort(tau_sum.real_parts([root.z])[0])[::-1]
            if real.size > 1:
                check.max_gap = max(check.max_gap, float(real[0] - real[1]))
            if not location.in_U_c[1]:
                check.violations.append(root.z)
        return check

    report.fibers = parallel_map(check_fiber, ts, workers)
    bad = sum(not f.ok for f in report.fibers)
    if bad:
        logger.warning(f"{bad} of {len(ts)} fibers leave U_c for c = {c:.4g}")

    # (b) base locus of the real pencil
    if p.separation <= 1e-9:
        report.vertex_note = 'pencil ratios not separated; base locus check refused'
        logger.warning(report.vertex_note)
    else:
        root_skeleton = build_skeleton_2d(tau_skeleton_sum(p, ROOT), window)
        vertices = [v.point for v in root_skeleton.vertices]
        for t in ts:
            tau_sum = tau_skeleton_sum(p, tree_coordinate(p, t))
            for v in vertices:
                if not locate(tau_sum, v, tol_vertex).in_U_c[1]:
                    report.vertex_failures.append(v)
        report.vertex_ok = not report.vertex_failures
        report.vertex_note = f'{len(vertices)} root vertices checked on {len(ts)} fibers'

    # (c) singular points against the union of vertex sets
    if singular is None:
        singular = find_pencil_singular(p, window, grid_density=grid_density, seed=seed)
    taus = -np.linspace(0.0, tau_range, tau_steps)
    tau_sums = []
    for coord in _leg_coords(p, taus):
        try:
            tau_sums.append(tau_skeleton_sum(p, coord))
        except ValueError:
            continue
    for point in singular.points:
        needed = min(vertex_gap(s, point.z) for s in tau_sums)
        report.singular.append(SingularCheck(point.z, point.t, needed, needed < c_singular))

    logger.info(
        f"Pencil verification: fibers {'ok' if report.fiber_ok else 'FAILED'}, "
        f"vertices {report.vertex_ok}, singular {'ok' if report.singular_ok else 'FAILED'} "
        f"({len(report.singular)} point(s))"
    )
    return report
