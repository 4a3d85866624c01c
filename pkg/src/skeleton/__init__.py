from .planar import Cell, Edge, Skeleton2D, Vertex, build_skeleton_2d
from .locate import StratumLocation, affine_rank, locate, second_gap, skeleton_distance

__all__ = [
    'Cell',
    'Edge',
    'Skeleton2D',
    'Vertex',
    'build_skeleton_2d',
    'StratumLocation',
    'affine_rank',
    'locate',
    'second_gap',
    'skeleton_distance',
]
