import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from pydantic import BaseModel

from ..api.render import RenderStyle, render_svg
from ..api.schemas import (
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
    BoundReportModel,
    parse_json,
)
from ..currents.study import limit_study
from ..currents.pairing import section_zeros
from ..pencil.singular import find_pencil_singular
from ..pencil.spec import t_samples
from ..pencil.verify import verify_pencil
from ..section.clusters import detect_clusters
from ..section.local import local_model
from ..section.net import generic_net
from ..section.section import build_section, section_skeleton
from ..section.surgery import perturb_section
from ..skeleton.planar import build_skeleton_2d
from ..solve.bounds import verify_bounds
from ..solve.roots import find_roots
from .box import as_box
from .errors import ConsistencyError, SearchExhaustedError, VerificationError
from .genericity import classify_sum, exponent_set_quality

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    """Output of one pipeline: the JSON document, optional CSV/SVG text."""

    document: Optional[BaseModel] = None
    csv: Optional[str] = None
    svg: Optional[str] = None


def _read_input(path: str) -> str:
    file = Path(path)
    if not file.exists():
        raise FileNotFoundError(f"Input file not found: {path}")
    return file.read_text(encoding='utf-8')


class Orchestrator:
    """Runs one CLI command against the configured library pipelines."""

    def __init__(self, config: Optional[dict] = None):
        """
        Initialize orchestrator.

        Args:
            config: Full configuration dict (sections are read with defaults)
        """
        self.config = config or {}
        self.style = RenderStyle.from_config(self.config.get('render'))

    def section_config(self, name: str) -> dict:
        return self.config.get(name) or {}

    def run(self, run: RunConfig) -> CommandResult:
        """
        Dispatch a validated RunConfig.

        Raises:
            VerificationError: the command's check failed (report attached)
        """
        handler = getattr(self, f"_{run.command}")
        logger.info(f"Running '{run.command}' (seed {run.seed})")
        return handler(run)

    def _density(self, run: RunConfig, section: str) -> Optional[int]:
        return run.grid_density or self.section_config(section).get('grid_density')

    def _certify(self, run: RunConfig) -> CommandResult:
        sum_ = parse_json(_read_input(run.input), ExpSumModel).to_sum()
        tolerances = self.section_config('tolerances')
        kwargs = {}
        if 'tol_rank' in tolerances:
            kwargs['tol_rank'] = float(tolerances['tol_rank'])
        report = exponent_set_quality(sum_.exponents, **kwargs)
        document = CertifyModel(**GenericityModel.from_report(report).model_dump())
        if run.window and sum_.dim == 1:
            classification = classify_sum(sum_, as_box(run.window), **kwargs)
            document.classification = ClassificationModel.from_classification(classification)
        logger.info(f"delta_set = {report.delta_set:.4g}, strongly basic: {report.strongly_basic}")
        return CommandResult(document)

    def _skeleton(self, run: RunConfig) -> CommandResult:
        sum_ = parse_json(_read_input(run.input), ExpSumModel).to_sum()
        window = as_box(run.window)
        skeleton = build_skeleton_2d(sum_, window)
        svg = render_svg(window, skeleton=skeleton, style=self.style) if run.svg else None
        return CommandResult(SkeletonModel.from_skeleton(skeleton), svg=svg)

    def _roots(self, run: RunConfig) -> CommandResult:
        sum_ = parse_json(_read_input(run.input), ExpSumModel).to_sum()
        window = as_box(run.window)
        roots_config = self.section_config('roots')
        roots = find_roots(
            sum_,
            window,
            run.mode,
            grid_density=self._density(run, 'roots'),
            seed=run.seed,
            merge_radius=float(roots_config.get('merge_radius', 1e-6)),
            tol_newton=float(roots_config.get('tol_newton', 1e-10)),
            max_iter=int(roots_config.get('max_iter', 80)),
            max_refine=int(roots_config.get('max_refine', 3)),
        )
        document = RootsReportModel(roots=RootSetModel.from_roots(roots))
        svg = None
        if run.svg and sum_.dim == 1:
            svg = render_svg(window, skeleton=build_skeleton_2d(sum_, window), roots=roots, style=self.style)
        if run.c is not None:
            bounds = verify_bounds(sum_, window, run.c, grid_density=self._density(run, 'roots'), seed=run.seed)
            document.bounds = BoundReportModel.from_report(bounds)
            if not bounds.holds:
                raise VerificationError(
                    f"{len(bounds.violations)} zero(s) outside U_c(Γ) for c = {run.c:g}", report=document
                )
        return CommandResult(document, svg=svg)

    def _pencil(self, run: RunConfig) -> CommandResult:
        pencil = parse_json(_read_input(run.input), PencilInput).to_pencil()
        window = as_box(run.window)
        pencil_config = self.section_config('pencil')
        density = self._density(run, 'pencil')
        singular = find_pencil_singular(pencil, window, grid_density=density, seed=run.seed)
        c = run.c if run.c is not None else pencil_config.get('c')
        verification = verify_pencil(
            pencil,
            window,
            t_values=t_samples(int(pencil_config.get('t_samples', 64))),
            c=c,
            grid_density=density,
            seed=run.seed,
            singular=singular,
        )
        document = PencilReportModel(
            singular=SingularSetModel.from_set(singular),
            verification=PencilVerificationModel.from_report(verification),
        )
        if not verification.passed:
            raise VerificationError("Pencil verification failed", report=document)
        return CommandResult(document)

    def _net(self, run: RunConfig) -> CommandResult:
        window = as_box(run.window)
        net_config = self.section_config('net')
        net = generic_net(
            window,
            run.epsilon,
            c1=float(net_config.get('c1', 0.2)),
            c2_target=float(net_config.get('c2_target', 0.05)),
            periodic=run.periodic,
            seed=run.seed,
            max_tries=int(net_config.get('max_tries', 200)),
        )
        svg = None
        if run.svg:
            skeleton = section_skeleton(build_section(net, k=self._k(run)), window)
            svg = render_svg(window, skeleton=skeleton, net=net, style=self.style)
        return CommandResult(NetModel.from_net(net), svg=svg)

    def _k(self, run: RunConfig) -> float:
        return float(run.k if run.k is not None else self.section_config('section').get('k', 100.0))

    def _section(self, run: RunConfig) -> CommandResult:
        net = parse_json(_read_input(run.input), NetModel).to_net()
        section_config = self.section_config('section')
        window = as_box(run.window) if run.window else net.domain
        spec = build_section(net, k=self._k(run))
        C3 = float(run.C3 if run.C3 is not None else section_config.get('C3', 0.05))
        R1 = float(run.R1 if run.R1 is not None else section_config.get('R1', 0.5))
        clusters = detect_clusters(
            spec,
            C3=C3,
            R1=R1,
            grid_density=run.grid_density or int(section_config.get('cluster_density', 200)),
            window=window,
            c4_ratio=float(section_config.get('c4_ratio', 0.05)),
        )

        local_models = []
        for cluster in clusters:
            try:
                model = local_model(spec, cluster.center, apply_shift=run.apply_shift, seed=run.seed)
            except ValueError as e:
                logger.debug(f"No local model at {cluster.center:.4g}: {e}")
                continue
            local_models.append(LocalModelModel.from_model(model))

        error = None
        surgery = None
        target = spec
        if len(clusters):
            try:
                surgery = perturb_section(
                    spec, clusters, seed=run.seed, retries=int(section_config.get('retries', 50))
                )
                target = surgery.s_hat
            except SearchExhaustedError as e:
                error = str(e)
                logger.warning(f"Surgery unresolved: {e}")

        consistent, discrepancy = True, None
        try:
            skeleton = section_skeleton(spec, window)
        except ConsistencyError as e:
            consistent, discrepancy = False, e.discrepancy
            error = error or str(e)
            skeleton = build_skeleton_2d(spec.global_sum, window)

        roots = section_zeros(target, window, grid_density=self._density(run, 'roots'), seed=run.seed)
        distances = [skeleton.distance(z) for z in roots.planar] if len(roots) else []
        max_distance = float(max(distances)) if distances else 0.0
        document = SectionReportModel(
            section=SectionModel.from_spec(spec),
            clusters=ClusterSetModel.from_clusters(clusters),
            surgery=SurgeryModel.from_result(surgery) if surgery is not None else None,
            local_models=local_models,
            verification=SectionVerificationModel(
                skeleton_consistent=consistent,
                discrepancy=discrepancy,
                zero_count=roots.total,
                max_distance=max_distance,
                scaled_distance=max_distance * spec.scale,
            ),
            error=error,
        )
        svg = render_svg(window, skeleton=skeleton, net=net, roots=roots, style=self.style) if run.svg else None
        logger.info(
            f"Section k = {spec.k:g}: {roots.total} zero(s), max distance to Γ times εk = {max_distance * spec.scale:.3g}"
        )
        if error is not None:
            raise VerificationError(error, report=document)
        return CommandResult(document, svg=svg)

    def _current(self, run: RunConfig) -> CommandResult:
        current_config = self.section_config('current')
        net_config = self.section_config('net')
        k_list = run.k_list or current_config.get('k_list', [100, 200, 400])
        schedule = run.schedule if run.schedule is not None else current_config.get('schedule')
        epsilon = run.epsilon if run.epsilon is not None else current_config.get('epsilon', 0.3)
        table = limit_study(
            as_box(run.window),
            k_list,
            epsilon=None if schedule is not None else epsilon,
            schedule=schedule,
            periodic=run.periodic,
            seed=run.seed,
            c1=float(net_config.get('c1', 0.2)),
            c2_target=float(net_config.get('c2_target', 0.05)),
            grid_density=run.grid_density,
            band=float(current_config.get('torus_band', 0.5)),
        )
        if run.format == 'csv':
            return CommandResult(csv=table.to_csv())
        return CommandResult(PairingTableModel.from_table(table))

