import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Box:
    """Axis-aligned window in ℂⁿ ≅ ℝ^{2n}.

    Coordinates are ordered (Re z_1, ..., Re z_n, Im z_1, ..., Im z_n), so a
    planar window is simply (x0, y0) - (x1, y1).
    """

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper) or len(self.lower) % 2 != 0 or not self.lower:
            raise ValueError(f"Invalid box bounds: {self.lower} / {self.upper}")
        for lo, hi in zip(self.lower, self.upper):
            if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
                raise ValueError(f"Invalid box extent: [{lo}, {hi}]")

    @classmethod
    def planar(cls, x0: float, y0: float, x1: float, y1: float) -> "Box":
        return cls((float(x0), float(y0)), (float(x1), float(y1)))

    @classmethod
    def from_config(cls, config: dict) -> "Box":
        """Create a Box from a config dict with x0/y0/x1/y1 or lower/upper keys."""
        if 'lower' in config:
            return cls(tuple(float(v) for v in config['lower']), tuple(float(v) for v in config['upper']))
        return cls.planar(config['x0'], config['y0'], config['x1'], config['y1'])

    @classmethod
    def from_string(cls, text: str) -> "Box":
        """
        Parse a window given as comma separated bounds.

        Args:
            text: "x0,y0,x1,y1" for planar windows, or 4n numbers
                  (lower bounds followed by upper bounds) in general

        Returns:
            Box instance
        """
        try:
            values = [float(v) for v in text.split(',')]
        except ValueError:
            raise ValueError(f"Invalid window: {text}")
        if len(values) < 4 or len(values) % 4 != 0:
            raise ValueError(f"Invalid window: {text}")
        half = len(values) // 2
        return cls(tuple(values[:half]), tuple(values[half:]))

    @property
    def dim(self) -> int:
        """Complex dimension n."""
        return len(self.lower) // 2

    @property
    def widths(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.widths))

    @property
    def area(self) -> float:
        return float(np.prod(self.widths))

    @property
    def center(self) -> np.ndarray:
        return self.to_complex((np.asarray(self.lower) + np.asarray(self.upper)) / 2)

    def to_list(self) -> list:
        return [*self.lower, *self.upper]

    def to_complex(self, real_coords: np.ndarray) -> np.ndarray:
        """Map real coordinates (..., 2n) to complex points (..., n)."""
        n = self.dim
        real_coords = np.asarray(real_coords, dtype=float)
        return real_coords[..., :n] + 1j * real_coords[..., n:]

    def to_real(self, points: np.ndarray) -> np.ndarray:
        """Map complex points (..., n) to real coordinates (..., 2n)."""
        points = np.asarray(points, dtype=complex)
        return np.concatenate([points.real, points.imag], axis=-1)

    def contains(self, points, tol: float = 0.0, half_open: bool = False) -> np.ndarray:
        """
        Check which points lie inside the box.

        Args:
            points: Complex array of shape (..., n); planar points may be a flat array
            tol: Slack added on every side
            half_open: Use [lower, upper) instead of the closed box

        Returns:
            Boolean array over the leading axes
        """
        points = np.asarray(points, dtype=complex)
        if self.dim == 1 and (points.ndim == 0 or points.shape[-1] != 1):
            points = points[..., None]
        coords = self.to_real(points)
        lo = np.asarray(self.lower) - tol
        hi = np.asarray(self.upper) + tol
        upper_ok = coords < hi if half_open else coords <= hi
        return np.all((coords >= lo) & upper_ok, axis=-1)

    def boundary_distance(self, points) -> np.ndarray:
        """Distance of planar points to the box boundary (0 outside)."""
        z = np.asarray(points, dtype=complex)
        (x0, y0), (x1, y1) = self.lower, self.upper
        d = np.minimum.reduce([z.real - x0, x1 - z.real, z.imag - y0, y1 - z.imag])
        return np.maximum(d, 0.0)

    def grid(self, density: int) -> np.ndarray:
        """
        Regular grid of complex points covering the box.

        Args:
            density: Samples per real axis

        Returns:
            Array of shape (density**(2n), n); planar grids are returned flat
        """
        if density < 2:
            raise ValueError(f"Grid density must be at least 2, got {density}")
        axes = [np.linspace(lo, hi, density) for lo, hi in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing='ij')
        coords = np.stack([m.ravel() for m in mesh], axis=-1)
        points = self.to_complex(coords)
        return points[:, 0] if self.dim == 1 else points

    def grid_spacing(self, density: int) -> float:
        return float(np.max(self.widths) / (density - 1))

    def corners(self) -> np.ndarray:
        """Planar corners in counter-clockwise order starting at (x0, y0)."""
        (x0, y0), (x1, y1) = self.lower, self.upper
        return np.array([x0 + 1j * y0, x1 + 1j * y0, x1 + 1j * y1, x0 + 1j * y1])

    def boundary_path(self, samples: int) -> np.ndarray:
        """Counter-clockwise closed sample path along a planar box boundary (last point omitted)."""
        corners = self.corners()
        lengths = np.abs(np.roll(corners, -1) - corners)
        per_side = np.maximum(1, np.round(samples * lengths / lengths.sum()).astype(int))
        pieces = []
        for start, end, count in zip(corners, np.roll(corners, -1), per_side):
            t = np.arange(count) / count
            pieces.append(start + t * (end - start))
        return np.concatenate(pieces)

    def expanded(self, margin: float) -> "Box":
        return Box(tuple(v - margin for v in self.lower), tuple(v + margin for v in self.upper))

    def shapely(self):
        """Planar box as a shapely polygon."""
        from shapely.geometry import box as shapely_box
        (x0, y0), (x1, y1) = self.lower, self.upper
        return shapely_box(x0, y0, x1, y1)


def as_box(window) -> Box:
    """Accept a Box, a config dict, a 4-sequence or a comma separated string."""
    if isinstance(window, Box):
        return window
    if isinstance(window, dict):
        return Box.from_config(window)
    if isinstance(window, str):
        return Box.from_string(window)
    values: Sequence[float] = list(window)
    if len(values) == 4:
        return Box.planar(*values)
    raise ValueError(f"Invalid window: {window}")
