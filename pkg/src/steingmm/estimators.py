"""Closed-form single-weight estimators, baselines and the empirical-objective oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateProblem, EmptyInput, NonPositiveData, SingularSystem, SupportError
from .models import BasisModel, ScoreModel, score, score_x_derivative
from .moments import blocks
from .numerics import default_ridge, digamma, solve_linear, trigamma
from .weights import WeightSpec

MAX_CONDITION = 1e12


@dataclass
class EstimatorResult:
    theta_hat: np.ndarray
    estimator_label: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.theta_hat = np.atleast_1d(np.asarray(self.theta_hat, dtype=np.float64))
        if not np.all(np.isfinite(self.theta_hat)):
            raise DegenerateProblem(f"{self.estimator_label}: estimate is not finite")


def _solve_estimating_equations(M: np.ndarray, rhs: np.ndarray, label: str):
    try:
        sol = solve_linear(M, rhs, 0.0)
        if sol.condition > MAX_CONDITION:
            raise SingularSystem("ill-conditioned")
    except SingularSystem:
        if not np.any(M):
            raise DegenerateProblem(f"{label}: estimating equations vanish identically") from None
        # default_ridge is based on the trace, which is negative for -B_bar; ridge the PSD side
        sign = -1.0 if np.trace(M) < 0 else 1.0
        try:
            sol = solve_linear(sign * M, sign * rhs, default_ridge(sign * M))
        except SingularSystem as exc:
            raise DegenerateProblem(f"{label}: {exc}") from None
        if sol.condition > MAX_CONDITION:
            raise DegenerateProblem(f"{label}: condition number {sol.condition:.3e} after ridge")
    return sol


def single_weight_estimate(model: ScoreModel, weight: WeightSpec, sample) -> EstimatorResult:
    """Solve B_bar theta = A_bar for one weight function."""
    blk = blocks(model, weight, sample)
    sol = _solve_estimating_equations(blk.B_bar, blk.A_bar, weight.label)
    return EstimatorResult(
        sol.x, weight.label, {"condition_number": sol.condition, "ridge": sol.ridge}
    )


def basis_estimate(basis: BasisModel, weight: WeightSpec, sample) -> EstimatorResult:
    """theta = M^{-1} v with M_jk = sum w phi_j' phi_k' and v_j = -sum (w phi_j')'."""
    xs = np.atleast_1d(np.asarray(sample, dtype=np.float64)).ravel()
    if xs.size == 0:
        raise EmptyInput("basis estimate needs at least one observation")
    lower, upper = basis.support
    if not np.all((xs > lower) & (xs < upper)):
        raise SupportError(f"sample leaves the support {basis.support}")
    d1 = np.column_stack([np.broadcast_to(f(xs), xs.shape) for f in basis.basis_derivatives])
    d2 = np.column_stack([np.broadcast_to(f(xs), xs.shape) for f in basis.basis_second_derivatives])
    w = weight.w(xs)
    wp = weight.w_prime(xs)
    M = (d1 * w[:, None]).T @ d1
    v = -(wp @ d1 + w @ d2)
    sol = _solve_estimating_equations(M, v, f"basis/{weight.label}")
    return EstimatorResult(sol.x, f"basis/{weight.label}", {"condition_number": sol.condition})


def _positive_sample(sample, minimum: int = 1) -> np.ndarray:
    xs = np.atleast_1d(np.asarray(sample, dtype=np.float64)).ravel()
    if xs.size < minimum:
        raise EmptyInput(f"need at least {minimum} observations, got {xs.size}")
    if not np.all(xs > 0):
        raise NonPositiveData("gamma likelihood needs strictly positive data")
    return xs


def _newton_increasing(f, fprime, target: float, x0: float, lo: float = 1e-8, hi: float = 1e6, tol: float = 1e-10):
    """Root of the increasing function f(x) = target on [lo, hi]; Newton with a bisection fallback."""
    if not (f(lo) < target < f(hi)):
        raise DegenerateProblem(f"target {target} is not bracketed on [{lo}, {hi}]")
    x = min(max(x0, lo), hi)
    for it in range(200):
        r = f(x) - target
        if r > 0:
            hi = x
        else:
            lo = x
        step = r / fprime(x)
        nxt = x - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= tol * max(1.0, abs(nxt)):
            return nxt, it + 1
        x = nxt
    raise DegenerateProblem("Newton iteration did not converge")


def inverse_digamma(y: float) -> tuple[float, int]:
    # Minka's starting point
    x0 = math.exp(y) + 0.5 if y >= -2.22 else -1.0 / (y - digamma(1.0))
    return _newton_increasing(digamma, trigamma, y, x0)


def gamma_mle(sample, known_rate: float = 1.0) -> EstimatorResult:
    """Shape MLE for a gamma with known rate, reported as theta = alpha - 1."""
    xs = _positive_sample(sample)
    target = math.fsum(np.log(xs)) / xs.size + math.log(known_rate)
    alpha, iters = inverse_digamma(target)
    return EstimatorResult(np.array([alpha - 1.0]), "mle", {"iterations": iters})


def gamma_mle_two_param(sample) -> EstimatorResult:
    """Joint (alpha, beta) MLE, reported as theta = (alpha - 1, beta)."""
    xs = _positive_sample(sample, minimum=2)
    mean = math.fsum(xs) / xs.size
    s = math.log(mean) - math.fsum(np.log(xs)) / xs.size
    if not s > 0:
        raise DegenerateProblem("sample has no spread; the gamma MLE does not exist")
    x0 = (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    # log(a) - psi(a) is decreasing, so solve psi(a) - log(a) = -s
    alpha, iters = _newton_increasing(
        lambda a: digamma(a) - math.log(a), lambda a: trigamma(a) - 1.0 / a, -s, x0
    )
    return EstimatorResult(np.array([alpha - 1.0, alpha / mean]), "mle", {"iterations": iters})


def classical_moments(model: ScoreModel, sample) -> EstimatorResult:
    """Textbook gamma moment matching: unit-rate shape for gamma1, (mean^2/var, mean/var) for gamma2."""
    xs = _positive_sample(sample, minimum=1 if model.p == 1 else 2)
    mean = math.fsum(xs) / xs.size
    if model.name == "gamma1":
        return EstimatorResult(np.array([mean - 1.0]), "classical-moments")
    if model.name == "gamma2":
        var = math.fsum((xs - mean) ** 2) / xs.size
        if var == 0:
            raise DegenerateProblem("zero sample variance")
        return EstimatorResult(np.array([mean**2 / var - 1.0, mean / var]), "classical-moments")
    raise ValueError(f"classical moments are only defined for the gamma models, not {model.name}")


def empirical_objective(model: ScoreModel, weight: WeightSpec, sample, theta) -> float:
    """n^-1 sum [w s^2 + 2 (w' s + w s')], the sample weighted score-matching objective."""
    xs = np.atleast_1d(np.asarray(sample, dtype=np.float64)).ravel()
    s = np.atleast_1d(score(model, theta, xs))
    ds = np.atleast_1d(score_x_derivative(model, theta, xs))
    w = weight.w(xs)
    wp = weight.w_prime(xs)
    return float(np.mean(w * s * s + 2.0 * (wp * s + w * ds)))


def minimize_empirical_objective(model: ScoreModel, weight: WeightSpec, sample, init=None) -> EstimatorResult:
    """Exact minimiser of the empirical weighted score objective.

    The objective is quadratic in theta, so its gradient and Hessian are
    recovered exactly from objective values on a unit stencil around ``init``
    and the stationary point is solved for directly. Only the score and its
    x-derivative are used, never the moment blocks.
    """
    xs = np.atleast_1d(np.asarray(sample, dtype=np.float64)).ravel()
    if xs.size == 0:
        raise EmptyInput("objective needs at least one observation")
    p = model.p
    centre = np.zeros(p) if init is None else model.check_theta(init)
    eye = np.eye(p)

    def D(t):
        return empirical_objective(model, weight, xs, t)

    d0 = D(centre)
    plus = [D(centre + eye[i]) for i in range(p)]
    minus = [D(centre - eye[i]) for i in range(p)]
    grad = np.array([(plus[i] - minus[i]) / 2.0 for i in range(p)])
    hess = np.empty((p, p))
    for i in range(p):
        hess[i, i] = plus[i] + minus[i] - 2.0 * d0
        for j in range(i + 1, p):
            hess[i, j] = hess[j, i] = D(centre + eye[i] + eye[j]) - plus[i] - plus[j] + d0
    if not np.any(hess) or np.linalg.cond(hess) > MAX_CONDITION:
        raise DegenerateProblem(f"{weight.label}: objective is not strictly convex in theta")
    theta = centre - np.linalg.solve(hess, grad)
    return EstimatorResult(theta, f"oracle-minimizer/{weight.label}", {"hessian": hess})
