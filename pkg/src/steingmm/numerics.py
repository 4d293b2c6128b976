"""Small dense linear algebra, special functions, seeded RNG streams and summary statistics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, DomainError, EmptyInput, SingularSystem

PIVOT_TOLERANCE = 1e-12
DEFAULT_RIDGE_SCALE = 1e-8


def as_vector(values, name: str = "vector") -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=np.float64))
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 1-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr


# --------------------------------------------------------------------------- #
# Linear solves
# --------------------------------------------------------------------------- #


class LinearSolution(NamedTuple):
    x: np.ndarray
    condition: float
    ridge: float


def default_ridge(A) -> float:
    """Scale-aware ridge: ``1e-8 * trace(A) / p``."""
    A = np.asarray(A, dtype=np.float64)
    p = A.shape[0]
    tr = float(np.trace(A))
    if tr <= 0.0:
        # trace can vanish or go negative for indefinite matrices; fall back to entry scale
        tr = float(np.max(np.abs(A))) * p
    if tr == 0.0:
        tr = float(p)
    return DEFAULT_RIDGE_SCALE * tr / p


def solve_linear(A, b, ridge: float = 0.0) -> LinearSolution:
    """Solve ``(A + ridge*I) x = b`` by LU with partial pivoting.

    ``b`` may be a vector or a matrix of right-hand sides. With ``ridge == 0`` a
    pivot smaller than ``1e-12 * max|A|`` raises :class:`SingularSystem` so the
    caller can retry with a positive ridge.
    """
    A = as_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"b has leading dimension {b.shape[0]}, expected {A.shape[0]}")
    if ridge < 0 or not math.isfinite(ridge):
        raise DomainError(f"ridge must be a finite non-negative number, got {ridge}")

    p = A.shape[0]
    M = A + ridge * np.eye(p) if ridge > 0 else A
    scale = float(np.max(np.abs(M)))
    if scale == 0.0:
        raise SingularSystem("matrix is identically zero")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if np.min(pivots) <= PIVOT_TOLERANCE * scale:
        raise SingularSystem(
            f"pivot {np.min(pivots):.3e} below {PIVOT_TOLERANCE:g} x max|entry| ({scale:.3e})"
        )
    x = sla.lu_solve((lu, piv), b, check_finite=False)
    return LinearSolution(x=x, condition=float(np.linalg.cond(M)), ridge=float(ridge))


def solve_with_ridge_retry(A, b, ridge: float | None = None) -> LinearSolution:
    """Try an exact solve; on rank deficiency retry once with :func:`default_ridge`."""
    if ridge:
        return solve_linear(A, b, ridge)
    try:
        return solve_linear(A, b, 0.0)
    except SingularSystem:
        return solve_linear(A, b, default_ridge(A))


# --------------------------------------------------------------------------- #
# Special functions
# --------------------------------------------------------------------------- #

_ASYMPTOTIC_THRESHOLD = 10.0
# B_{2k} / (2k) for k = 1..7
_DIGAMMA_COEFFS = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
# B_{2k} for k = 1..7
_BERNOULLI = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0)


def digamma(z: float) -> float:
    """psi(z) for z > 0, via upward recurrence to z >= 10 then the asymptotic series."""
    z = float(z)
    if not z > 0.0 or not math.isfinite(z):
        raise DomainError(f"digamma is defined here for finite z > 0, got {z}")
    acc = 0.0
    while z < _ASYMPTOTIC_THRESHOLD:
        acc -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    series = 0.0
    term = 1.0
    for coeff in _DIGAMMA_COEFFS:
        term *= inv2
        series += coeff * term
    return acc + math.log(z) - 0.5 / z - series


def trigamma(z: float) -> float:
    """psi'(z) for z > 0; used as the Newton derivative when inverting digamma."""
    z = float(z)
    if not z > 0.0 or not math.isfinite(z):
        raise DomainError(f"trigamma is defined here for finite z > 0, got {z}")
    acc = 0.0
    while z < _ASYMPTOTIC_THRESHOLD:
        acc += 1.0 / (z * z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    series = 0.0
    power = inv
    for b in _BERNOULLI:
        power *= inv2
        series += b * power
    return acc + inv + 0.5 * inv2 + series


# --------------------------------------------------------------------------- #
# Random streams and gamma variates
# --------------------------------------------------------------------------- #


@dataclass
class RngStream:
    """A PCG64 substream keyed by ``(master_seed, stream_index)``.

    Substreams are derived with numpy's ``SeedSequence`` using ``stream_index``
    as the spawn key, so stream ``r`` never depends on how many other streams
    exist.
    """

    master_seed: int
    stream_index: int = 0
    algorithm_id: str = field(default="PCG64", init=False)
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise DomainError("master_seed must be a 64-bit unsigned integer")
        if self.stream_index < 0:
            raise DomainError("stream_index must be non-negative")
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_index,))
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def uniform(self, size) -> np.ndarray:
        return self.generator.random(size)

    def normal(self, size) -> np.ndarray:
        return self.generator.standard_normal(size)


def _marsaglia_tsang(rng: RngStream, shape: float, count: int) -> np.ndarray:
    # shape >= 1 here
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(count)
    filled = 0
    while filled < count:
        need = count - filled
        batch = need + need // 20 + 16
        z = rng.normal(batch)
        u = rng.uniform(batch)
        v = (1.0 + c * z) ** 3
        positive = v > 0
        safe_v = np.where(positive, v, 1.0)
        squeeze = u < 1.0 - 0.0331 * z**4
        with np.errstate(divide="ignore"):
            full = np.log(u) < 0.5 * z * z + d * (1.0 - safe_v + np.log(safe_v))
        accepted = (d * safe_v)[positive & (squeeze | full)]
        take = min(accepted.size, need)
        out[filled : filled + take] = accepted[:take]
        filled += take
    return out


def sample_gamma(rng: RngStream, shape: float, rate: float, count: int) -> np.ndarray:
    """Draw ``count`` Gamma(shape, rate) variates with the Marsaglia-Tsang squeeze method."""
    if not (shape > 0 and math.isfinite(shape)):
        raise DomainError(f"shape must be positive, got {shape}")
    if not (rate > 0 and math.isfinite(rate)):
        raise DomainError(f"rate must be positive, got {rate}")
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    if shape >= 1.0:
        draws = _marsaglia_tsang(rng, shape, count)
    else:
        # boost: X_a = X_{a+1} * U^{1/a}
        draws = _marsaglia_tsang(rng, shape + 1.0, count)
        draws *= rng.uniform(count) ** (1.0 / shape)
    return draws / rate


# --------------------------------------------------------------------------- #
# Summary statistics
# --------------------------------------------------------------------------- #


class SummaryStats(NamedTuple):
    mean: float
    bias: float
    variance: float
    mse: float


def summary_stats(samples, true_value: float) -> SummaryStats:
    """Mean, bias, population variance and MSE of ``samples`` against ``true_value``."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptyInput("summary_stats needs at least one sample")
    mean = math.fsum(x) / x.size
    variance = math.fsum((x - mean) ** 2) / x.size
    mse = math.fsum((x - true_value) ** 2) / x.size
    return SummaryStats(mean=mean, bias=mean - true_value, variance=variance, mse=mse)
