from .testfunctions import BUMP, CONSTANT, TRIGONOMETRIC, TestFunction, bump, catalog, constant, trigonometric
from .pairing import ZERO_WEIGHT, beta_edges, beta_pairing, section_zeros, zero_pairing
from .study import CSV_HEADER, FIXED, SCHEDULE, PairingRow, PairingTable, limit_study, power_schedule

__all__ = [
    'BUMP',
    'CONSTANT',
    'TRIGONOMETRIC',
    'TestFunction',
    'bump',
    'catalog',
    'constant',
    'trigonometric',
    'ZERO_WEIGHT',
    'beta_edges',
    'beta_pairing',
    'section_zeros',
    'zero_pairing',
    'CSV_HEADER',
    'FIXED',
    'SCHEDULE',
    'PairingRow',
    'PairingTable',
    'limit_study',
    'power_schedule',
]
