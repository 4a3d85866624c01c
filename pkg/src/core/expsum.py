import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

# Terms whose real exponent part falls this far below b(z) are dropped.
UNDERFLOW_CUT = 700.0
# log of the largest double; unnormalized values beyond it overflow.
MAX_LOG = 709.0
TOL_TIE = 1e-9


def as_vector(z, dim: int) -> np.ndarray:
    """
    Coerce a point of ℂⁿ to a 1-d complex array.

    Args:
        z: Complex scalar (n = 1) or sequence of n complex numbers
        dim: Expected dimension n

    Returns:
        Complex array of shape (n,)
    """
    vec = np.atleast_1d(np.asarray(z, dtype=complex))
    if vec.shape != (dim,):
        raise ValueError(f"Dimension mismatch: expected a point of C^{dim}, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValueError(f"Non-finite point: {vec}")
    return vec


@dataclass(frozen=True, eq=False)
class ExpSum:
    """
    Finite exponential sum μ(z) = Σ e^{α_i + m_i·z} on ℂⁿ.

    Duplicate exponents are merged at construction by adding the
    coefficients in linear scale; terms that cancel exactly are dropped.

    Attributes:
        alphas: Complex log-coefficients, shape (L,)
        exponents: Complex exponent vectors, shape (L, n)
    """

    alphas: np.ndarray
    exponents: np.ndarray
    merged: int = field(default=0, compare=False)

    def __post_init__(self):
        alphas = np.atleast_1d(np.asarray(self.alphas, dtype=complex))
        exponents = np.asarray(self.exponents, dtype=complex)
        if exponents.ndim == 1:
            exponents = exponents[:, None]
        if exponents.ndim != 2 or exponents.shape[0] != alphas.shape[0]:
            raise ValueError(
                f"Dimension mismatch: {alphas.shape[0]} coefficients for exponents of shape {exponents.shape}"
            )
        if alphas.size == 0:
            raise ValueError("Exponential sum needs at least one term")
        if not (np.all(np.isfinite(alphas)) and np.all(np.isfinite(exponents))):
            raise ValueError("Exponential sum terms must be finite")

        alphas, exponents, merged = _merge_duplicates(alphas, exponents)
        alphas.setflags(write=False)
        exponents.setflags(write=False)
        object.__setattr__(self, 'alphas', alphas)
        object.__setattr__(self, 'exponents', exponents)
        object.__setattr__(self, 'merged', merged)
        if merged:
            logger.debug(f"Merged {merged} duplicate exponent(s)")

    @classmethod
    def from_coefficients(cls, coefficients, exponents, floor: float = 1e-300) -> "ExpSum":
        """
        Build a sum from linear coefficients a_i = e^{α_i}.

        Coefficients with modulus at most `floor` are dropped.
        """
        coefficients = np.atleast_1d(np.asarray(coefficients, dtype=complex))
        exponents = np.asarray(exponents, dtype=complex)
        if exponents.ndim == 1:
            exponents = exponents[:, None]
        keep = np.abs(coefficients) > floor
        if not np.any(keep):
            raise ValueError("All coefficients vanish")
        return cls(np.log(coefficients[keep]), exponents[keep])

    @property
    def dim(self) -> int:
        return self.exponents.shape[1]

    @property
    def size(self) -> int:
        """Number of terms l + 1."""
        return self.alphas.shape[0]

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"ExpSum(dim={self.dim}, terms={self.size})"

    def restrict(self, indices: Sequence[int]) -> "ExpSum":
        """Sub-sum over the given term indices."""
        idx = np.asarray(sorted(set(int(i) for i in indices)), dtype=int)
        if idx.size == 0:
            raise ValueError("Cannot restrict to an empty index set")
        return ExpSum(self.alphas[idx], self.exponents[idx])

    def with_alphas(self, alphas) -> "ExpSum":
        return ExpSum(np.asarray(alphas, dtype=complex), self.exponents)

    def as_points(self, points) -> np.ndarray:
        """Coerce one point or a batch of points to shape (N, n)."""
        pts = np.asarray(points, dtype=complex)
        if pts.ndim == 0:
            pts = pts.reshape(1, 1)
        elif self.dim == 1 and (pts.ndim == 1 or pts.shape[-1] != 1):
            pts = pts.reshape(-1, 1)
        elif pts.ndim == 1:
            pts = pts.reshape(1, -1)
        if pts.shape[-1] != self.dim:
            raise ValueError(f"Dimension mismatch: expected points of C^{self.dim}, got shape {pts.shape}")
        return pts.reshape(-1, self.dim)

    def exponent_values(self, points) -> np.ndarray:
        """α_i + m_i·z for a batch of points, shape (N, L)."""
        pts = self.as_points(points)
        return self.alphas[None, :] + pts @ self.exponents.T

    def real_parts(self, points) -> np.ndarray:
        """f_i(z) = Re(α_i + m_i·z), shape (N, L)."""
        return self.exponent_values(points).real

    def b(self, z) -> float:
        """b(z) = max_i Re(α_i + m_i·z) at a single point."""
        return float(self.real_parts(as_vector(z, self.dim)[None, :]).max())

    def log_jet(
        self,
        points,
        order: int = 1,
        chunk: int = 4096,
        underflow_cut: float = UNDERFLOW_CUT,
    ) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray], Optional[np.ndarray]]:
        """
        Normalized jets e^{−b(z)}·(μ, dμ, d²μ) at a batch of points.

        Args:
            points: Points of shape (N, n) (planar points may be flat)
            order: Highest derivative order (0, 1 or 2)
            chunk: Points processed per block
            underflow_cut: Terms below b(z) − underflow_cut are dropped

        Returns:
            (b, value, gradient, hessian) with shapes (N,), (N,), (N, n), (N, n, n);
            gradient/hessian are None when not requested
        """
        if order not in (0, 1, 2):
            raise ValueError(f"Invalid jet order: {order}")
        pts = self.as_points(points)
        count, n = pts.shape
        b = np.empty(count)
        value = np.empty(count, dtype=complex)
        gradient = np.empty((count, n), dtype=complex) if order >= 1 else None
        hessian = np.empty((count, n, n), dtype=complex) if order >= 2 else None
        m = self.exponents

        for start in range(0, count, chunk):
            block = slice(start, start + chunk)
            values = self.alphas[None, :] + pts[block] @ m.T
            top = values.real.max(axis=1)
            shifted = values - top[:, None]
            weights = np.exp(shifted)
            weights[shifted.real < -underflow_cut] = 0.0
            b[block] = top
            value[block] = weights.sum(axis=1)
            if gradient is not None:
                gradient[block] = weights @ m
            if hessian is not None:
                hessian[block] = np.einsum('sl,li,lj->sij', weights, m, m)

        return b, value, gradient, hessian


def _merge_duplicates(alphas: np.ndarray, exponents: np.ndarray):
    groups = {}
    for i, row in enumerate(exponents):
        groups.setdefault(tuple(row.tolist()), []).append(i)
    if len(groups) == len(alphas):
        return alphas.copy(), exponents.copy(), 0

    new_alphas, new_exponents = [], []
    for key, members in groups.items():
        if len(members) == 1:
            new_alphas.append(alphas[members[0]])
        else:
            # log-sum-exp in linear scale
            group = alphas[members]
            top = group.real.max()
            total = np.exp(group - top).sum()
            if abs(total) <= 1e-15 * len(members):
                logger.debug(f"Duplicate exponent {key} cancelled exactly; term dropped")
                continue
            new_alphas.append(top + np.log(total))
        new_exponents.append(exponents[members[0]])
    if not new_alphas:
        raise ValueError("All terms cancelled while merging duplicate exponents")
    return np.array(new_alphas, dtype=complex), np.array(new_exponents, dtype=complex), len(alphas) - len(new_alphas)


def evaluate_jet(sum_: ExpSum, z, order: int = 2, normalized: bool = False):
    """
    Value, gradient and Hessian of μ at z.

    Args:
        sum_: Exponential sum
        z: Point of ℂⁿ
        order: 0, 1 or 2
        normalized: Return (b, e^{−b}μ, e^{−b}dμ, e^{−b}d²μ) instead of raw values

    Returns:
        (value, gradient, hessian); missing orders are None

    Raises:
        ExpSumOverflowError: b(z) exceeds the double range and normalized is False
    """
    from .errors import ExpSumOverflowError

    vec = as_vector(z, sum_.dim)
    b, value, gradient, hessian = sum_.log_jet(vec[None, :], order=order)
    b = float(b[0])
    gradient = gradient[0] if gradient is not None else None
    hessian = hessian[0] if hessian is not None else None
    if normalized:
        return b, value[0], gradient, hessian
    if b > MAX_LOG:
        raise ExpSumOverflowError(f"b(z) = {b:.1f} exceeds the double exponent range; use normalized evaluation")
    scale = np.exp(b)
    return (
        value[0] * scale,
        gradient * scale if gradient is not None else None,
        hessian * scale if hessian is not None else None,
    )


@dataclass(frozen=True)
class Dominance:
    """Dominance data b(z), I_z and I_{z,c} at a point."""

    b: float
    argmax_set: Tuple[int, ...]
    near_set: Tuple[int, ...]
    gaps: np.ndarray
    c: float

    @property
    def gap_list(self) -> np.ndarray:
        """Gaps b − f_i(z) in increasing order."""
        return np.sort(self.gaps)

    @property
    def region(self) -> int:
        return self.argmax_set[0]


def dominance(sum_: ExpSum, z, c: float, tol_tie: float = TOL_TIE) -> Dominance:
    """
    Compute b(z), the argmax set I_z and the c-near set I_{z,c}.

    Args:
        sum_: Exponential sum
        z: Point of ℂⁿ
        c: Nonnegative width of the near set
        tol_tie: Absolute tolerance for ties on real exponent parts

    Returns:
        Dominance record
    """
    if c < 0:
        raise ValueError(f"Near-set width must be nonnegative, got {c}")
    vec = as_vector(z, sum_.dim)
    real = sum_.real_parts(vec[None, :])[0]
    top = float(real.max())
    gaps = top - real
    argmax = np.flatnonzero(gaps <= tol_tie)
    near = np.flatnonzero((gaps < c) | (gaps <= tol_tie))
    return Dominance(
        b=top,
        argmax_set=tuple(int(i) for i in argmax),
        near_set=tuple(int(i) for i in near),
        gaps=gaps,
        c=float(c),
    )


def normalized_c1(sum_: ExpSum, z, base) -> float:
    """
    Normalized C¹ datum e^{−b(base)}(|μ(z)| + |dμ(z)|).

    Evaluation is shifted by b(z) first, so no intermediate value overflows.
    """
    vec = as_vector(z, sum_.dim)
    b_base = sum_.b(base)
    b_z, value, gradient, _ = sum_.log_jet(vec[None, :], order=1)
    modulus = abs(value[0]) + float(np.linalg.norm(gradient[0]))
    return float(np.exp(b_z[0] - b_base) * modulus)


def transform(sum_: ExpSum, shift=None, recenter=None) -> ExpSum:
    """
    Recenter at q and/or shift exponents by m_* (recenter first).

    Recentering replaces α_i by α_i + m_i·q − b(q), so the result evaluated
    at z equals e^{−b(q)}μ(q + z). Shifting replaces m_i by m_i − m_*,
    which multiplies μ by e^{−m_*·z}.
    """
    if shift is None and recenter is None:
        raise ValueError("transform needs a shift or a recenter point")

    alphas = sum_.alphas
    exponents = sum_.exponents
    if recenter is not None:
        q = as_vector(recenter, sum_.dim)
        values = alphas + exponents @ q
        alphas = values - values.real.max()
    if shift is not None:
        m_star = as_vector(shift, sum_.dim)
        exponents = exponents - m_star[None, :]
    return ExpSum(alphas, exponents)
