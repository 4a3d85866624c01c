from .spec import (
    INFINITY,
    ROOT,
    TAU_FLOOR,
    ExtendedComplex,
    PencilMember,
    PencilSpec,
    TreeCoord,
    pencil_sum,
    swap_ends,
    t_samples,
    tau_skeleton_sum,
    tree_coordinate,
)
from .singular import SingularPoint, SingularSet, find_pencil_singular, wronskian
from .verify import FiberCheck, PencilVerification, SingularCheck, verify_pencil, vertex_gap

__all__ = [
    'INFINITY',
    'ROOT',
    'TAU_FLOOR',
    'ExtendedComplex',
    'PencilMember',
    'PencilSpec',
    'TreeCoord',
    'pencil_sum',
    'swap_ends',
    't_samples',
    'tau_skeleton_sum',
    'tree_coordinate',
    'SingularPoint',
    'SingularSet',
    'find_pencil_singular',
    'wronskian',
    'FiberCheck',
    'PencilVerification',
    'SingularCheck',
    'verify_pencil',
    'vertex_gap',
]
