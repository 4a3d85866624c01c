from .winding import DERIVATIVE, VALUE, Circle, count_winding
from .roots import CRITICAL, CRITICAL_ZEROS, ZEROS, Root, RootSet, derivative_sum, find_roots
from .bounds import C1_LOWER, ZERO_CONTAINMENT, BoundReport, c1_lower_bound, critical_count_bound, verify_bounds

__all__ = [
    'DERIVATIVE',
    'VALUE',
    'Circle',
    'count_winding',
    'CRITICAL',
    'CRITICAL_ZEROS',
    'ZEROS',
    'Root',
    'RootSet',
    'derivative_sum',
    'find_roots',
    'C1_LOWER',
    'ZERO_CONTAINMENT',
    'BoundReport',
    'c1_lower_bound',
    'critical_count_bound',
    'verify_bounds',
]
