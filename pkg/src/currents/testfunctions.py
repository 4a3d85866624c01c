import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np
import scipy.integrate as spyint

from ..core.box import Box, as_box

logger = logging.getLogger(__name__)

CONSTANT = 'constant'
BUMP = 'bump'
TRIGONOMETRIC = 'trigonometric'


@dataclass(frozen=True)
class TestFunction:
    """
    Smooth scalar test function ψ on a planar domain.

    Attributes:
        name: Catalog label
        func: Vectorized map from complex points to real values
        c0, c1, c2: Bounds on |ψ|, |dψ| and |d²ψ|
        params: Construction parameters
    """

    __test__ = False

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    c0: float
    c1: float
    c2: float
    params: Dict[str, float] = field(default_factory=dict, compare=False)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.asarray(self.func(z), dtype=float) * np.ones(z.shape)

    def __add__(self, other: "TestFunction") -> "TestFunction":
        first, second = self.func, other.func
        return TestFunction(
            f"{self.name}+{other.name}",
            lambda z: first(z) + second(z),
            self.c0 + other.c0,
            self.c1 + other.c1,
            self.c2 + other.c2,
        )

    def scaled(self, factor: float) -> "TestFunction":
        inner = self.func
        a = abs(factor)
        return TestFunction(f"{factor:g}*{self.name}", lambda z: factor * inner(z), a * self.c0, a * self.c1, a * self.c2)

    def integral(self, domain) -> float:
        """∫ψ over a planar box (the ω pairing)."""
        domain = as_box(domain)
        (x0, y0), (x1, y1) = domain.lower, domain.upper
        if self.c1 == 0 and self.c2 == 0:
            return float(self(complex(x0, y0))) * domain.area
        value, _ = spyint.dblquad(
            lambda y, x: float(self(complex(x, y))), x0, x1, y0, y1, epsabs=1e-10, epsrel=1e-9
        )
        return float(value)


def constant(value: float = 1.0) -> TestFunction:
    return TestFunction(CONSTANT, lambda z: np.full(np.shape(z), value, dtype=float), abs(value), 0.0, 0.0, {'value': value})


def bump(center: complex, radius: float, height: float = 1.0) -> TestFunction:
    """C∞ bump height·e^{1 − 1/(1 − |z − c|²/r²)} supported in the disk of radius r."""
    if radius <= 0:
        raise ValueError(f"Bump radius must be positive, got {radius}")
    center = complex(center)

    def func(z):
        s = np.abs(np.asarray(z) - center) ** 2 / radius ** 2
        with np.errstate(divide='ignore', over='ignore'):
            return np.where(s < 1, height * np.exp(1 - 1 / (1 - np.minimum(s, 1 - 1e-300))), 0.0)

    # sup of the profile derivatives, sampled on a fine radial grid
    s = np.linspace(0, 1, 20001)[:-1]
    profile = height * np.exp(1 - 1 / (1 - s ** 2))
    d1 = np.abs(np.gradient(profile, s)) / radius
    d2 = np.abs(np.gradient(np.gradient(profile, s), s)) / radius ** 2
    return TestFunction(
        BUMP, func, abs(height), float(d1.max()), float(2 * d2.max()),
        {'center_re': center.real, 'center_im': center.imag, 'radius': radius, 'height': height},
    )


def trigonometric(domain, kx: int = 1, ky: int = 1, amplitude: float = 0.5, offset: float = 1.0) -> TestFunction:
    """offset + amplitude·cos(2πkx·x/wx)·cos(2πky·y/wy), periodic on the domain."""
    domain = as_box(domain)
    (x0, y0) = domain.lower
    wx, wy = domain.widths
    fx, fy = 2 * np.pi * kx / wx, 2 * np.pi * ky / wy

    def func(z):
        z = np.asarray(z)
        return offset + amplitude * np.cos(fx * (z.real - x0)) * np.cos(fy * (z.imag - y0))

    a = abs(amplitude)
    return TestFunction(
        TRIGONOMETRIC, func, abs(offset) + a, a * float(np.hypot(fx, fy)), a * (fx ** 2 + fy ** 2),
        {'kx': kx, 'ky': ky, 'amplitude': amplitude, 'offset': offset},
    )


def catalog(domain: Box) -> List[TestFunction]:
    """Constant, centered bump and trigonometric test functions for a domain."""
    domain = as_box(domain)
    center = complex(domain.center[0])
    radius = float(np.min(domain.widths)) / 3
    return [constant(1.0), bump(center, radius), trigonometric(domain)]
