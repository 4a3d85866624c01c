from .box import Box, as_box
from .errors import (
    ConsistencyError,
    ExpSkelError,
    ExpSumOverflowError,
    PreconditionError,
    RootOnContourError,
    SearchExhaustedError,
    VerificationError,
)
from .expsum import Dominance, ExpSum, dominance, evaluate_jet, normalized_c1, transform
from .genericity import (
    Classification,
    GenericityReport,
    SimplexCatalog,
    classify_sum,
    exponent_set_quality,
    find_shift,
    simplex_quality,
    simplex_volume,
)
from .parallel import parallel_map, worker_count

__all__ = [
    'Box',
    'as_box',
    'ConsistencyError',
    'ExpSkelError',
    'ExpSumOverflowError',
    'PreconditionError',
    'RootOnContourError',
    'SearchExhaustedError',
    'VerificationError',
    'Dominance',
    'ExpSum',
    'dominance',
    'evaluate_jet',
    'normalized_c1',
    'transform',
    'Classification',
    'GenericityReport',
    'SimplexCatalog',
    'classify_sum',
    'exponent_set_quality',
    'find_shift',
    'simplex_quality',
    'simplex_volume',
    'parallel_map',
    'worker_count',
]
