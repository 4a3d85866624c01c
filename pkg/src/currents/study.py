import csv
import io
import logging
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from ..core.box import as_box
from ..core.parallel import parallel_map
from ..section.net import Net, generic_net
from ..section.section import build_section
from .pairing import TORUS_BAND, beta_pairing, section_zeros, unfolded_window, zero_pairing
from .testfunctions import TestFunction, catalog

logger = logging.getLogger(__name__)

FIXED = 'fixed'
SCHEDULE = 'schedule'
CSV_HEADER = ['k', 'epsilon', 'zero_pairing', 'beta_pairing', 'gap_over_k', 'psi', 'omega_pairing', 'zero_count', 'error']


@dataclass
class PairingRow:
    k: float
    epsilon: float
    zero_pairing: float
    beta_pairing: float
    gap_over_k: float
    psi: str = ''
    omega_pairing: float = float('nan')
    zero_count: int = 0
    error: str = ''

    @property
    def omega_gap(self) -> float:
        """|zero_pairing/k − ∫ψ|."""
        return abs(self.zero_pairing / self.k - self.omega_pairing)


@dataclass
class PairingTable:
    """Zero-set and β_Γ pairings along a sequence of k."""

    mode: str
    rows: List[PairingRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def for_psi(self, name: str) -> List[PairingRow]:
        return sorted((r for r in self.rows if r.psi == name), key=lambda r: r.k)

    @property
    def psi_names(self) -> List[str]:
        return list(dict.fromkeys(r.psi for r in self.rows))

    def consecutive_ratios(self, name: str, omega: bool = False) -> List[float]:
        """Ratios of consecutive gaps (gap_over_k, or the ω gap) along k."""
        gaps = [r.omega_gap if omega else r.gap_over_k for r in self.for_psi(name)]
        return [b / a if a > 0 else float('nan') for a, b in zip(gaps[:-1], gaps[1:])]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_HEADER, lineterminator='\n')
        writer.writeheader()
        for row in self.rows:
            record = asdict(row)
            writer.writerow({key: (f"{record[key]:.12g}" if isinstance(record[key], float) else record[key]) for key in CSV_HEADER})
        return buffer.getvalue()

    def to_records(self) -> List[dict]:
        return [asdict(r) for r in self.rows]


def power_schedule(exponent: float = 1 / 3) -> Callable[[float], float]:
    """ε_k = k^{−exponent}."""
    return lambda k: float(k ** -exponent)


def limit_study(
    domain,
    k_list: Sequence[float],
    epsilon: Optional[float] = 0.3,
    schedule: Optional[Union[Callable[[float], float], float]] = None,
    psi_catalog: Optional[Sequence[TestFunction]] = None,
    periodic: bool = True,
    seed: int = 0,
    c1: float = 0.2,
    c2_target: float = 0.05,
    grid_density: Optional[int] = None,
    workers: Optional[int] = None,
    band: float = TORUS_BAND,
) -> PairingTable:
    """
    Compare (1/k)·zero pairings of sections with the β_Γ and ω pairings.

    Fixed mode (schedule None) builds one generic net at `epsilon`;
    schedule mode builds a fresh net with ε_k = schedule(k) (a float is
    read as the exponent of k^{−x}). Per-k failures are recorded in the
    row instead of raised.

    Args:
        domain: Planar box (torus fundamental domain when periodic)
        k_list: Increasing tensor powers, at least three
        epsilon: Net scale in fixed mode
        schedule: ε_k rule for schedule mode
        psi_catalog: Test functions (default: catalog(domain))
        band: Width of the torus partition of unity (periodic nets), as a
            fraction of the period

    Returns:
        PairingTable sorted by k, then by test function
    """
    domain = as_box(domain)
    k_list = [float(k) for k in k_list]
    if len(k_list) < 3 or any(b <= a for a, b in zip(k_list[:-1], k_list[1:])):
        raise ValueError(f"k_list must be increasing with at least three values, got {k_list}")
    if isinstance(schedule, (int, float)):
        schedule = power_schedule(float(schedule))
    mode = FIXED if schedule is None else SCHEDULE
    if mode == FIXED and (epsilon is None or epsilon <= 0):
        raise ValueError("Fixed mode needs a positive epsilon")
    psis = list(psi_catalog) if psi_catalog is not None else catalog(domain)
    omegas = [psi.integral(domain) for psi in psis]

    fixed_net: Optional[Net] = None
    fixed_betas: List[float] = []
    if mode == FIXED:
        fixed_net = generic_net(domain, epsilon, c1=c1, c2_target=c2_target, periodic=periodic, seed=seed)
        fixed_betas = [beta_pairing(fixed_net, psi) for psi in psis]

    def run(k: float) -> List[PairingRow]:
        eps = epsilon if mode == FIXED else schedule(k)
        rows = []
        try:
            net = fixed_net if mode == FIXED else generic_net(
                domain, eps, c1=c1, c2_target=c2_target, periodic=periodic, seed=seed
            )
            betas = fixed_betas if mode == FIXED else [beta_pairing(net, psi) for psi in psis]
            spec = build_section(net, k=k)
            search = unfolded_window(domain, band) if periodic else domain
            roots = section_zeros(spec, search, grid_density=grid_density, seed=seed, workers=1)
            count = roots.count_inside(domain)
            for psi, beta, omega in zip(psis, betas, omegas):
                zero = zero_pairing(roots, psi, domain, periodic=periodic, band=band)
                rows.append(PairingRow(k, eps, zero, beta, abs(zero / k - beta), psi.name, omega, count))
        except Exception as e:
            logger.error(f"Limit study failed at k = {k:g}: {e}")
            nan = float('nan')
            rows = [PairingRow(k, eps, nan, nan, nan, psi.name, omega, 0, str(e)) for psi, omega in zip(psis, omegas)]
        return rows

    table = PairingTable(mode)
    for rows in parallel_map(run, k_list, workers):
        table.rows.extend(rows)
    for name in table.psi_names:
        ratios = table.consecutive_ratios(name, omega=mode == SCHEDULE)
        logger.info(f"{mode} study, psi = {name}: consecutive gap ratios {np.round(ratios, 3).tolist()}")
    return table
