import json
import logging
from typing import Any, Dict, List, Literal, Optional, Tuple, Type, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from ..core.box import Box
from ..core.expsum import ExpSum
from ..core.genericity import Classification, GenericityReport
from ..currents.study import PairingTable
from ..pencil.singular import SingularSet
from ..pencil.spec import ExtendedComplex, PencilSpec
from ..pencil.verify import PencilVerification
from ..section.clusters import ClusterSet
from ..section.local import LocalModel
from ..section.net import Net
from ..section.section import SectionSpec
from ..section.surgery import SurgeryResult
from ..skeleton.planar import Skeleton2D
from ..solve.bounds import BoundReport
from ..solve.roots import RootSet

logger = logging.getLogger(__name__)

Complex = Tuple[float, float]
ExtendedValue = Union[Complex, Literal['inf']]

M = TypeVar('M', bound=BaseModel)

COMMANDS = ('certify', 'skeleton', 'roots', 'pencil', 'net', 'section', 'current')


def to_pair(z) -> Complex:
    z = complex(z)
    return (float(z.real), float(z.imag))


def from_pair(pair) -> complex:
    return complex(pair[0], pair[1])


def to_extended(t: ExtendedComplex) -> ExtendedValue:
    return 'inf' if t.infinite else to_pair(t.value)


def from_extended(value: ExtendedValue) -> ExtendedComplex:
    return ExtendedComplex.of('inf' if value == 'inf' else from_pair(value))


class Schema(BaseModel):
    """Base model; infinities and NaNs are emitted as JSON constants."""

    model_config = ConfigDict(ser_json_inf_nan='constants', extra='forbid')


class Term(Schema):
    alpha: Complex
    m: List[Complex]


class ExpSumModel(Schema):
    dim: int
    terms: List[Term]

    @model_validator(mode='after')
    def _check_dims(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if not self.terms:
            raise ValueError("An exponential sum needs at least one term")
        for term in self.terms:
            if len(term.m) != self.dim:
                raise ValueError(f"Term exponent has {len(term.m)} entries, expected dim = {self.dim}")
        return self

    @classmethod
    def from_sum(cls, sum_: ExpSum) -> "ExpSumModel":
        terms = [Term(alpha=to_pair(a), m=[to_pair(v) for v in row]) for a, row in zip(sum_.alphas, sum_.exponents)]
        return cls(dim=sum_.dim, terms=terms)

    def to_sum(self) -> ExpSum:
        alphas = [from_pair(t.alpha) for t in self.terms]
        exponents = [[from_pair(v) for v in t.m] for t in self.terms]
        return ExpSum(alphas, np.array(exponents, dtype=complex).reshape(len(alphas), self.dim))


class NetModel(Schema):
    epsilon: float
    periodic: bool = False
    domain: Tuple[float, float, float, float]
    points: List[Complex]
    delta: Optional[float] = None
    c1: float = 0.0
    flagged: bool = False

    @classmethod
    def from_net(cls, net: Net) -> "NetModel":
        delta = None if np.isnan(net.delta) else float(net.delta)
        return cls(
            epsilon=net.epsilon,
            periodic=net.periodic,
            domain=tuple(net.domain.to_list()),
            points=[to_pair(p) for p in net.points],
            delta=delta,
            c1=net.c1,
            flagged=net.flagged,
        )

    def to_net(self) -> Net:
        points = np.array([from_pair(p) for p in self.points], dtype=complex)
        delta = float('nan') if self.delta is None else self.delta
        return Net(points, self.epsilon, Box.planar(*self.domain), self.periodic, delta, self.c1, self.flagged)


class PencilInput(Schema):
    """Pencil input: shared exponents and the coefficients of μ_0 and μ_∞."""

    dim: int = 1
    exponents: List[List[Complex]]
    alpha0: List[Complex]
    alphainf: List[Complex]
    r0: Optional[float] = None
    section: bool = False
    N: Optional[int] = None

    def to_pencil(self) -> PencilSpec:
        exponents = np.array([[from_pair(v) for v in row] for row in self.exponents], dtype=complex)
        return PencilSpec.build(
            exponents.reshape(len(self.exponents), self.dim),
            [from_pair(a) for a in self.alpha0],
            [from_pair(a) for a in self.alphainf],
            r0=self.r0,
            section=self.section,
            N=self.N,
        )


class GenericityModel(Schema):
    delta_r: float
    delta_c: float
    delta_c_origin: float
    delta_set: float
    strongly_basic: bool
    witness: Optional[List[List[Complex]]] = None
    simplex_count: int = 0

    @classmethod
    def from_report(cls, report: GenericityReport) -> "GenericityModel":
        witness = None
        if report.witness is not None:
            witness = [[to_pair(v) for v in np.atleast_1d(row)] for row in report.witness]
        return cls(
            delta_r=report.delta_r,
            delta_c=report.delta_c,
            delta_c_origin=report.delta_c_origin,
            delta_set=report.delta_set,
            strongly_basic=report.strongly_basic,
            witness=witness,
            simplex_count=report.simplex_count,
        )


class ClassificationModel(Schema):
    strongly: bool
    basic: Optional[bool]
    strictly: Optional[bool]
    vacuous: bool
    catalog: List[List[int]]
    nongeneric: List[List[int]]
    report: GenericityModel

    @classmethod
    def from_classification(cls, result: Classification) -> "ClassificationModel":
        return cls(
            strongly=result.strongly,
            basic=result.basic,
            strictly=result.strictly,
            vacuous=result.vacuous,
            catalog=[list(idx) for idx in result.catalog.index_sets],
            nongeneric=[list(idx) for idx in result.catalog.nongeneric],
            report=GenericityModel.from_report(result.report),
        )


class CertifyModel(GenericityModel):
    """Genericity report, plus the skeleton-based classification of planar sums."""

    classification: Optional[ClassificationModel] = None


class CellModel(Schema):
    index: int
    area: float
    clipped: bool
    polygon: List[Complex]


class EdgeModel(Schema):
    cells: Tuple[int, int]
    active: List[int]
    start: Complex
    end: Complex
    clipped: bool


class VertexModel(Schema):
    point: Complex
    active: List[int]
    edges: List[int]


class SkeletonModel(Schema):
    window: List[float]
    cells: List[CellModel]
    edges: List[EdgeModel]
    vertices: List[VertexModel]

    @classmethod
    def from_skeleton(cls, skeleton: Skeleton2D) -> "SkeletonModel":
        return cls(
            window=skeleton.window.to_list(),
            cells=[
                CellModel(index=c.index, area=c.area, clipped=c.clipped, polygon=[(float(x), float(y)) for x, y in c.polygon])
                for c in skeleton.cells
            ],
            edges=[
                EdgeModel(cells=e.cells, active=list(e.active), start=to_pair(e.start), end=to_pair(e.end), clipped=e.clipped)
                for e in skeleton.edges
            ],
            vertices=[VertexModel(point=to_pair(v.point), active=list(v.active), edges=list(v.edges)) for v in skeleton.vertices],
        )


class RootModel(Schema):
    location: List[Complex]
    multiplicity: int
    residual: float
    boundary: bool = False


class RootSetModel(Schema):
    mode: str
    total: int
    boundary_count: Optional[int] = None
    grid_density: int = 0
    refinements: int = 0
    roots: List[RootModel]

    @classmethod
    def from_roots(cls, roots: RootSet) -> "RootSetModel":
        return cls(
            mode=roots.mode,
            total=roots.total,
            boundary_count=roots.boundary_count,
            grid_density=roots.grid_density,
            refinements=roots.refinements,
            roots=[
                RootModel(location=[to_pair(c) for c in r.location], multiplicity=r.multiplicity, residual=r.residual, boundary=r.boundary)
                for r in roots
            ],
        )


class BoundReportModel(Schema):
    mode: str
    c_used: float
    holds: bool
    min_margin: float
    checked: int
    empirical_c2: Optional[float] = None
    violations: List[List[Complex]]
    grid_spec: Dict[str, Any] = {}

    @classmethod
    def from_report(cls, report: BoundReport) -> "BoundReportModel":
        return cls(
            mode=report.mode,
            c_used=report.c_used,
            holds=report.holds,
            min_margin=report.min_margin,
            checked=report.checked,
            empirical_c2=report.empirical_c2,
            violations=[[to_pair(c) for c in v] for v in report.violations],
            grid_spec=dict(report.grid_spec),
        )


class RootsReportModel(Schema):
    roots: RootSetModel
    bounds: Optional[BoundReportModel] = None


class SingularPointModel(Schema):
    z: Complex
    t: ExtendedValue
    multiplicity: int
    at_base: bool = False


class SingularSetModel(Schema):
    total_multiplicity: int
    points: List[SingularPointModel]
    base_points: List[Complex]
    wronskian: Optional[ExpSumModel] = None

    @classmethod
    def from_set(cls, singular: SingularSet) -> "SingularSetModel":
        return cls(
            total_multiplicity=singular.total_multiplicity,
            points=[
                SingularPointModel(z=to_pair(p.z), t=to_extended(p.t), multiplicity=p.multiplicity, at_base=p.at_base)
                for p in singular.points
            ],
            base_points=[to_pair(b) for b in singular.base_points],
            wronskian=ExpSumModel.from_sum(singular.wronskian) if singular.wronskian is not None else None,
        )


class FiberModel(Schema):
    t: ExtendedValue
    leg: Optional[int]
    tau: float
    zero_count: int
    max_gap: float
    violations: List[Complex]


class SingularCheckModel(Schema):
    z: Complex
    t: ExtendedValue
    c_needed: float
    ok: bool


class PencilVerificationModel(Schema):
    passed: bool
    c: float
    c_singular: float
    containment_constant: float
    fiber_ok: bool
    vertex_ok: Optional[bool]
    vertex_note: str
    vertex_failures: List[Complex]
    singular: List[SingularCheckModel]
    fibers: List[FiberModel]

    @classmethod
    def from_report(cls, report: PencilVerification) -> "PencilVerificationModel":
        return cls(
            passed=report.passed,
            c=report.c,
            c_singular=report.c_singular,
            containment_constant=report.containment_constant,
            fiber_ok=report.fiber_ok,
            vertex_ok=report.vertex_ok,
            vertex_note=report.vertex_note,
            vertex_failures=[to_pair(v) for v in report.vertex_failures],
            singular=[
                SingularCheckModel(z=to_pair(s.z), t=to_extended(s.t), c_needed=s.c_needed, ok=s.ok)
                for s in report.singular
            ],
            fibers=[
                FiberModel(
                    t=to_extended(f.t),
                    leg=f.coord.leg,
                    tau=f.coord.tau,
                    zero_count=f.zero_count,
                    max_gap=f.max_gap,
                    violations=[to_pair(v) for v in f.violations],
                )
                for f in report.fibers
            ],
        )


class PencilReportModel(Schema):
    singular: SingularSetModel
    verification: PencilVerificationModel


class SectionModel(Schema):
    net: NetModel
    k: float
    R0: float
    terms: int
    amplitudes: List[Complex]

    @classmethod
    def from_spec(cls, spec: SectionSpec) -> "SectionModel":
        return cls(
            net=NetModel.from_net(spec.net),
            k=spec.k,
            R0=spec.R0,
            terms=spec.global_sum.size,
            amplitudes=[to_pair(a) for a in spec.amplitudes],
        )


class ClusterModel(Schema):
    center: Complex
    size: int
    datum: float
    flagged: bool


class ClusterSetModel(Schema):
    C3: float
    C4: float
    R1: float
    scale: float
    clusters: List[ClusterModel]

    @classmethod
    def from_clusters(cls, clusters: ClusterSet) -> "ClusterSetModel":
        return cls(
            C3=clusters.C3,
            C4=clusters.C4,
            R1=clusters.R1,
            scale=clusters.scale,
            clusters=[ClusterModel(center=to_pair(c.center), size=c.size, datum=c.datum, flagged=c.flagged) for c in clusters],
        )


class LocalModelModel(Schema):
    """Local model of the section at a cluster center."""

    p: Complex
    terms: int
    shift: Complex
    error_sup: float
    error_scale: float
    strict: Optional[bool] = None

    @classmethod
    def from_model(cls, model: LocalModel) -> "LocalModelModel":
        return cls(
            p=to_pair(model.p),
            terms=model.size,
            shift=to_pair(model.shift),
            error_sup=model.error_sup,
            error_scale=model.error_scale,
            strict=model.strict,
        )


class SurgeryModel(Schema):
    eps_hat: List[Complex]
    margins: List[float]
    attempts: List[int]
    min_margin: float

    @classmethod
    def from_result(cls, result: SurgeryResult) -> "SurgeryModel":
        return cls(
            eps_hat=[to_pair(e) for e in result.eps_hat],
            margins=list(result.margins),
            attempts=list(result.attempts),
            min_margin=result.min_margin,
        )


class SectionVerificationModel(Schema):
    """Zero containment of a section: zeros against the Voronoi skeleton."""

    skeleton_consistent: bool
    discrepancy: Optional[float] = None
    zero_count: int
    max_distance: float
    scaled_distance: float


class SectionReportModel(Schema):
    section: SectionModel
    clusters: ClusterSetModel
    surgery: Optional[SurgeryModel] = None
    local_models: List[LocalModelModel] = []
    verification: SectionVerificationModel
    error: Optional[str] = None


class PairingRowModel(Schema):
    k: float
    epsilon: float
    zero_pairing: float
    beta_pairing: float
    gap_over_k: float
    psi: str
    omega_pairing: float
    zero_count: int
    error: str = ''


class PairingTableModel(Schema):
    mode: str
    rows: List[PairingRowModel]

    @classmethod
    def from_table(cls, table: PairingTable) -> "PairingTableModel":
        return cls(mode=table.mode, rows=[PairingRowModel(**record) for record in table.to_records()])


class RunConfig(Schema):
    """Parameters of one CLI run."""

    command: Literal['certify', 'skeleton', 'roots', 'pencil', 'net', 'section', 'current']
    input: Optional[str] = None
    output: Optional[str] = None
    svg: Optional[str] = None
    window: Optional[str] = None
    mode: str = 'zeros'
    k: Optional[float] = None
    k_list: Optional[List[float]] = None
    epsilon: Optional[float] = None
    c: Optional[float] = None
    C3: Optional[float] = None
    R1: Optional[float] = None
    grid_density: Optional[int] = None
    seed: int = 0
    periodic: bool = False
    apply_shift: bool = False
    schedule: Optional[float] = None
    format: Literal['json', 'csv'] = 'json'

    @model_validator(mode='after')
    def _check_required(self):
        needs_input = {'certify', 'skeleton', 'roots', 'pencil', 'section'}
        needs_window = {'skeleton', 'roots', 'pencil', 'net', 'current'}
        if self.command in needs_input and not self.input:
            raise ValueError(f"'{self.command}' needs --input")
        if self.command in needs_window and not self.window:
            raise ValueError(f"'{self.command}' needs --window")
        if self.command == 'net' and self.epsilon is None:
            raise ValueError("'net' needs --epsilon")
        return self


def parse_json(text: str, model: Type[M]) -> M:
    """
    Parse a JSON document into a schema.

    Raises:
        ValueError: malformed JSON (with line and column) or schema violations
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"Malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise ValueError(f"Invalid {model.__name__}: {e}") from e


def emit(model: BaseModel) -> str:
    """Canonical JSON text of a schema."""
    return model.model_dump_json(indent=2)
