from .net import Net, generic_net, greedy_net
from .voronoi import voronoi_adjacency, voronoi_geometry, voronoi_segments
from .section import SectionSpec, build_section, error_scale, section_skeleton
from .local import LocalModel, local_model, pencil_local_model
from .clusters import Cluster, ClusterSet, c1_datum, detect_clusters
from .surgery import SectionField, SurgeryResult, field_zeros, perturb_pencil, perturb_section, smooth_step
from .coloring import Coloring, color_and_pencil, greedy_coloring

__all__ = [
    'Net',
    'generic_net',
    'greedy_net',
    'voronoi_adjacency',
    'voronoi_geometry',
    'voronoi_segments',
    'SectionSpec',
    'build_section',
    'error_scale',
    'section_skeleton',
    'LocalModel',
    'local_model',
    'pencil_local_model',
    'Cluster',
    'ClusterSet',
    'c1_datum',
    'detect_clusters',
    'SectionField',
    'SurgeryResult',
    'field_zeros',
    'perturb_pencil',
    'perturb_section',
    'smooth_step',
    'Coloring',
    'color_and_pencil',
    'greedy_coloring',
]
