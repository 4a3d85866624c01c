import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..core.box import Box
from ..core.errors import ExpSkelError, RootOnContourError
from ..core.expsum import ExpSum

logger = logging.getLogger(__name__)

VALUE = 'value'
DERIVATIVE = 'derivative'

ROOT_TOL = 1e-9
MAX_SAMPLES = 1 << 20


@dataclass(frozen=True)
class Circle:
    """Positively oriented circle contour."""

    center: complex
    radius: float

    def path(self, samples: int) -> np.ndarray:
        theta = 2 * np.pi * np.arange(samples) / samples
        return self.center + self.radius * np.exp(1j * theta)

    def contains(self, points) -> np.ndarray:
        return np.abs(np.asarray(points, dtype=complex) - self.center) < self.radius


Contour = Union[Circle, Box]


def contour_path(contour: Contour, samples: int) -> np.ndarray:
    if isinstance(contour, Circle):
        return contour.path(samples)
    if isinstance(contour, Box):
        if contour.dim != 1:
            raise ValueError("Winding contours must be planar")
        return contour.boundary_path(samples)
    raise ValueError(f"Unsupported contour: {contour!r}")


def target_values(sum_: ExpSum, points: np.ndarray, target: str) -> np.ndarray:
    """Normalized values of μ or μ′ along planar points (argument is scale free)."""
    if target not in (VALUE, DERIVATIVE):
        raise ValueError(f"Invalid winding target: {target}")
    _, value, gradient, _ = sum_.log_jet(points, order=0 if target == VALUE else 1)
    return value if target == VALUE else gradient[:, 0]


def count_winding(
    sum_: ExpSum,
    target: str,
    contour: Contour,
    samples: int = 256,
    root_tol: float = ROOT_TOL,
    max_samples: int = MAX_SAMPLES,
) -> int:
    """
    Winding number of μ (or μ′) along a closed contour.

    The argument variation is accumulated from wrapped phase differences
    between consecutive samples; the sample count doubles until every step
    stays below π/2 and two successive estimates agree.

    Args:
        sum_: One-variable exponential sum
        target: 'value' or 'derivative'
        contour: Circle or planar Box
        samples: Initial sample count
        root_tol: Minimal normalized modulus allowed on the contour
        max_samples: Upper bound for the adaptive sampling

    Returns:
        Number of zeros of the target enclosed (with multiplicity)

    Raises:
        RootOnContourError: the target (numerically) vanishes on the contour
    """
    if sum_.dim != 1:
        raise ValueError(f"Winding numbers need a one-variable sum, got dim {sum_.dim}")

    previous = None
    while True:
        path = contour_path(contour, samples)
        values = target_values(sum_, path, target)
        smallest = float(np.abs(values).min())
        if smallest < root_tol:
            raise RootOnContourError(
                f"Target vanishes on the contour (|f| = {smallest:.2e}); perturb the contour",
                min_modulus=smallest,
            )
        steps = np.angle(np.roll(values, -1) / values)
        estimate = int(round(steps.sum() / (2 * np.pi)))
        resolved = float(np.abs(steps).max()) < np.pi / 2
        if resolved and estimate == previous:
            return estimate
        previous = estimate if resolved else None
        samples *= 2
        if samples > max_samples:
            raise ExpSkelError(f"Winding number not resolved with {max_samples} samples")
