from .render import RenderStyle, element_counts, render_svg
from .schemas import (
    COMMANDS,
    BoundReportModel,
    CertifyModel,
    ClassificationModel,
    ClusterSetModel,
    ExpSumModel,
    GenericityModel,
    LocalModelModel,
    NetModel,
    PairingTableModel,
    PencilInput,
    PencilReportModel,
    PencilVerificationModel,
    RootSetModel,
    RootsReportModel,
    RunConfig,
    SectionModel,
    SectionReportModel,
    SectionVerificationModel,
    SingularSetModel,
    SkeletonModel,
    SurgeryModel,
    emit,
    parse_json,
)

__all__ = [
    'RenderStyle',
    'element_counts',
    'render_svg',
    'COMMANDS',
    'BoundReportModel',
    'CertifyModel',
    'ClassificationModel',
    'ClusterSetModel',
    'ExpSumModel',
    'GenericityModel',
    'LocalModelModel',
    'NetModel',
    'PairingTableModel',
    'PencilInput',
    'PencilReportModel',
    'PencilVerificationModel',
    'RootSetModel',
    'RootsReportModel',
    'RunConfig',
    'SectionModel',
    'SectionReportModel',
    'SectionVerificationModel',
    'SingularSetModel',
    'SkeletonModel',
    'SurgeryModel',
    'emit',
    'parse_json',
]
