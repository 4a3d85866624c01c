import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..core.box import Box
from ..core.errors import SearchExhaustedError
from ..core.expsum import ExpSum
from ..core.genericity import classify_sum, find_shift
from ..pencil.spec import PencilSpec
from .section import SectionSpec, error_scale

logger = logging.getLogger(__name__)

# Local models are compared on |w| ≤ MODEL_RADIUS in the rescaled frame.
MODEL_RADIUS = 3.0


@dataclass(frozen=True, eq=False)
class LocalModel:
    """
    Local model μ°_p in the rescaled frame w = εk(z − p).

    Attributes:
        model: Sum over I_p = {i: |p_i − p| ≤ 2ε}
        full: All terms of the section in the same frame
        indices: Global term indices forming I_p
        shift: Exponent shift m_* applied to both sums
        error_sup: sup over |w| ≤ 3 of |μ_p − μ°_p| + |d(μ_p − μ°_p)|, normalized at w = 0
        error_scale: max(ε, 1/(εk), e^{−ε²k})
        strict: The shifted model met the strictness target (None when not requested)
    """

    p: complex
    model: ExpSum
    full: ExpSum
    indices: Tuple[int, ...]
    shift: complex
    error_sup: float
    error_scale: float
    strict: Optional[bool] = None

    @property
    def size(self) -> int:
        return self.model.size


def _frame_terms(spec: SectionSpec, log_coefficients: np.ndarray, p: complex) -> Tuple[np.ndarray, np.ndarray]:
    """Alphas and exponents of every term written in the frame w = εk(z − p)."""
    eps, k = spec.epsilon, spec.k
    offsets = spec.centers - p
    # e^{log a − k|c|²/4 + k c̄ z/2} at z = p + w/(εk), with the common factor e^{k|p|²/4} removed
    alphas = log_coefficients - k * np.abs(offsets) ** 2 / 4 + 0.5j * k * np.imag(np.conj(spec.centers) * p)
    exponents = np.conj(offsets) / (2 * eps)
    return alphas, exponents


def _model_grid(samples: int = 41) -> np.ndarray:
    axis = np.linspace(-MODEL_RADIUS, MODEL_RADIUS, samples)
    w = (axis[:, None] + 1j * axis[None, :]).ravel()
    return w[np.abs(w) <= MODEL_RADIUS]


def _tail_error(alphas: np.ndarray, exponents: np.ndarray, tail: np.ndarray, b0: float) -> float:
    if tail.size == 0:
        return 0.0
    tail_sum = ExpSum(alphas[tail], exponents[tail])
    b, value, gradient, _ = tail_sum.log_jet(_model_grid(), order=1)
    modulus = np.abs(value) + np.abs(gradient[:, 0])
    with np.errstate(over='ignore'):
        return float(np.max(np.exp(b - b0) * modulus))


def _build_local(
    spec: SectionSpec,
    log_coefficients: np.ndarray,
    p: complex,
    apply_shift: bool,
    seed: int,
    shift_radius: float,
    shift_target: float,
) -> LocalModel:
    log_coefficients = np.asarray(log_coefficients, dtype=complex)
    alive = np.isfinite(log_coefficients.real)
    near = alive & (np.abs(spec.centers - p) <= 2 * spec.epsilon)
    indices = np.flatnonzero(near)
    if indices.size == 0:
        raise ValueError(f"No net point within 2*epsilon of p = {p}")

    alphas, exponents = _frame_terms(spec, np.where(alive, log_coefficients, 0), p)
    full_idx = np.flatnonzero(alive)
    full = ExpSum(alphas[full_idx], exponents[full_idx])
    model = ExpSum(alphas[indices], exponents[indices])

    shift, strict = 0j, None
    if apply_shift:
        window = Box.planar(-MODEL_RADIUS, -MODEL_RADIUS, MODEL_RADIUS, MODEL_RADIUS)
        catalog = classify_sum(model, window).catalog
        try:
            shift = complex(find_shift(model, [0j], shift_radius, shift_target, seed=seed, catalog=catalog)[0])
            strict = True
        except SearchExhaustedError as e:
            logger.warning(f"No strict shift for the local model at {p:.4g}: best margin {e.best_margin:.3g}")
            shift, strict = complex(e.best[0]), False
        model = ExpSum(model.alphas, model.exponents - shift)
        full = ExpSum(full.alphas, full.exponents - shift)

    b0 = full.b([0j])
    tail = np.setdiff1d(full_idx, indices)
    tail_exponents = exponents - shift
    error = _tail_error(alphas, tail_exponents, tail, b0)
    scale = error_scale(spec.epsilon, spec.k)
    logger.debug(f"Local model at {p:.4g}: {indices.size} terms, error_sup = {error:.3e}, c_eps_k = {scale:.3g}")
    return LocalModel(complex(p), model, full, tuple(int(i) for i in indices), shift, error, scale, strict)


def local_model(
    spec: SectionSpec,
    p: complex,
    apply_shift: bool = False,
    seed: int = 0,
    shift_radius: float = 0.25,
    shift_target: float = 0.05,
) -> LocalModel:
    """
    Strictly basic local model of a section near p.

    Args:
        spec: Section
        p: Base point in the domain
        apply_shift: Shift the exponents by find_shift to make the model strictly basic
        seed: Seed for the shift search
        shift_radius: Sampling radius for the shift
        shift_target: Required margin δ^ℂ_m

    Raises:
        ValueError: no net point within 2ε of p
    """
    log_amplitudes = np.log(spec.amplitudes[spec.sources])
    return _build_local(spec, log_amplitudes, complex(p), apply_shift, seed, shift_radius, shift_target)


def pencil_local_model(spec: SectionSpec, pencil: PencilSpec, t, p: complex, apply_shift: bool = False, seed: int = 0) -> LocalModel:
    """
    Local model μ°_{t,p} of the fiber μ_t of a colored section pencil.

    Terms cancelled at t are left out of both the model and the full sum.
    """
    if pencil.size != len(spec.centers):
        raise ValueError("Pencil does not share the exponents of the section")
    log_coefficients, dropped = pencil.log_coefficients(t)
    log_coefficients = np.where(dropped, -np.inf, log_coefficients + spec.k * np.abs(spec.centers) ** 2 / 4)
    return _build_local(spec, log_coefficients, complex(p), apply_shift, seed, 0.25, 0.05)
