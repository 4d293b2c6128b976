"""Generalized method of moments over several weight functions.

Each weight contributes p linear moment conditions ``A_bar_k - B_bar_k theta = 0``.
Stacking them gives ``(B theta - a)^T W (B theta - a)``, minimised in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateProblem, DimensionMismatch, DomainError, EmptyInput, SingularSystem
from .models import ScoreModel
from .moments import pointwise_blocks
from .numerics import as_matrix, as_vector, default_ridge, solve_linear
from .weights import WeightSpec

MAX_CONDITION = 1e12


@dataclass
class GmmProblem:
    B_stack: np.ndarray  # (m*p, p)
    a_stack: np.ndarray  # (m*p,)
    W: np.ndarray  # (m*p, m*p)
    m: int
    p: int
    W_ridge: float = 0.0
    # R with W = R^T R; derived from W when not supplied
    W_root: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.B_stack = as_matrix(self.B_stack, "B_stack")
        self.a_stack = as_vector(self.a_stack, "a_stack")
        self.W = as_matrix(self.W, "W")
        q = self.m * self.p
        if self.B_stack.shape != (q, self.p) or self.a_stack.shape != (q,) or self.W.shape != (q, q):
            raise DimensionMismatch(
                f"inconsistent GMM shapes: B {self.B_stack.shape}, a {self.a_stack.shape}, "
                f"W {self.W.shape} for m={self.m}, p={self.p}"
            )
        scale = float(np.max(np.abs(self.W)))
        if np.max(np.abs(self.W - self.W.T)) > 1e-10 * max(scale, 1.0):
            raise DomainError("weighting matrix must be symmetric")
        self.W = 0.5 * (self.W + self.W.T)
        try:
            np.linalg.cholesky(self.W)
        except np.linalg.LinAlgError:
            ridge = default_ridge(self.W)
            self.W = self.W + ridge * np.eye(q)
            self.W_ridge += ridge
            try:
                np.linalg.cholesky(self.W)
            except np.linalg.LinAlgError:
                raise DomainError("weighting matrix is not positive definite, even after ridge repair") from None
        if self.W_root is None:
            evals, evecs = np.linalg.eigh(self.W)
            self.W_root = np.sqrt(np.clip(evals, 0.0, None))[:, None] * evecs.T

    def scaled(self, factor: float) -> "GmmProblem":
        """Same problem with W multiplied by ``factor`` (> 0); the square root is scaled alongside."""
        if not factor > 0:
            raise DomainError("W can only be rescaled by a positive factor")
        return GmmProblem(
            self.B_stack, self.a_stack, factor * self.W, self.m, self.p,
            W_ridge=self.W_ridge, W_root=np.sqrt(factor) * self.W_root,
        )


@dataclass
class GmmEstimate:
    theta_hat: np.ndarray
    objective_value: float
    condition_number: float
    ridge_used: float
    steps: int
    first_step: np.ndarray | None = field(default=None, repr=False)
    W: np.ndarray | None = field(default=None, repr=False)
    problem: GmmProblem | None = field(default=None, repr=False)


@dataclass(frozen=True)
class StackedSample:
    """Per-observation stacked A (n, m*p) and B (n, m*p, p) for a set of weights."""

    A: np.ndarray
    B: np.ndarray
    m: int
    p: int

    @property
    def a_stack(self) -> np.ndarray:
        return self.A.mean(axis=0)

    @property
    def B_stack(self) -> np.ndarray:
        return self.B.mean(axis=0)

    def contributions(self, theta) -> np.ndarray:
        """Stacked moment contributions l_i(theta) = A(x_i) - B(x_i) theta, shape (n, m*p)."""
        return self.A - self.B @ np.asarray(theta, dtype=np.float64)


def stack_sample(model: ScoreModel, weights: Sequence[WeightSpec], sample) -> StackedSample:
    xs = np.atleast_1d(np.asarray(sample, dtype=np.float64)).ravel()
    if xs.size == 0:
        raise EmptyInput("GMM needs at least one observation")
    if len(weights) == 0:
        raise EmptyInput("GMM needs at least one weight function")
    As, Bs = zip(*(pointwise_blocks(model, w, xs) for w in weights))
    return StackedSample(A=np.concatenate(As, axis=1), B=np.concatenate(Bs, axis=1), m=len(weights), p=model.p)


def build_problem(model: ScoreModel, weights: Sequence[WeightSpec], sample, W=None) -> GmmProblem:
    st = stack_sample(model, weights, sample)
    q = st.m * st.p
    return GmmProblem(st.B_stack, st.a_stack, np.eye(q) if W is None else W, st.m, st.p)


def objective(problem: GmmProblem, theta) -> float:
    """(B theta - a)^T W (B theta - a)."""
    t = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    if t.shape != (problem.p,):
        raise DimensionMismatch(f"theta must have length {problem.p}, got shape {t.shape}")
    r = problem.B_stack @ t - problem.a_stack
    return max(0.0, float(r @ problem.W @ r))


def solve_gmm(problem: GmmProblem) -> GmmEstimate:
    """Closed-form minimiser (B^T W B)^{-1} B^T W a, with a ridge retry when singular.

    The normal equations are formed from the whitened system R B, R a with
    W = R^T R, which avoids cancellation when W is badly conditioned.
    """
    C = problem.W_root @ problem.B_stack
    d = problem.W_root @ problem.a_stack
    H = C.T @ C
    g = C.T @ d
    try:
        sol = solve_linear(H, g, 0.0)
        if sol.condition > MAX_CONDITION:
            raise SingularSystem(f"condition number {sol.condition:.3e}")
    except SingularSystem:
        try:
            sol = solve_linear(H, g, default_ridge(H))
        except SingularSystem as exc:
            raise DegenerateProblem(f"GMM normal equations are singular: {exc}") from None
        if sol.condition > MAX_CONDITION:
            raise DegenerateProblem(f"ridged GMM system has condition number {sol.condition:.3e}")
    theta = np.asarray(sol.x, dtype=np.float64)
    if not np.all(np.isfinite(theta)):
        raise DegenerateProblem("GMM solution is not finite")
    return GmmEstimate(
        theta_hat=theta,
        objective_value=objective(problem, theta),
        condition_number=sol.condition,
        ridge_used=sol.ridge,
        steps=1,
        W=problem.W,
        problem=problem,
    )


def _inverse_moment_covariance(L: np.ndarray, ridge: float | None) -> tuple[np.ndarray, np.ndarray, float]:
    n, q = L.shape
    S = L.T @ L / n
    S = 0.5 * (S + S.T)
    if ridge:
        used = float(ridge)
    else:
        try:
            solve_linear(S, np.ones(q), 0.0)
            used = 0.0
        except SingularSystem:
            used = default_ridge(S)
    # eigen-inverse keeps near-null directions of S decoupled from the rest;
    # an LU inverse leaks O(eps * cond) error between them
    evals, evecs = np.linalg.eigh(S)
    evals = np.clip(evals, 0.0, None) + used
    if evals.min() <= 0.0:
        used = max(used, default_ridge(S))
        evals = evals + used
    W = (evecs / evals) @ evecs.T
    root = evecs.T / np.sqrt(evals)[:, None]
    return 0.5 * (W + W.T), root, used


def estimate_optimal_weight(
    model: ScoreModel, weights: Sequence[WeightSpec], sample, theta_ref, ridge: float | None = None
) -> np.ndarray:
    """Inverse of the uncentred moment covariance S = n^-1 sum l_i l_i^T at ``theta_ref``.

    When S is rank deficient it is inverted as ``S + ridge I`` with the default
    scale-aware ridge, unless ``ridge`` is given explicitly.
    """
    st = stack_sample(model, weights, sample)
    theta_ref = model.check_theta(theta_ref)
    W, _, _ = _inverse_moment_covariance(st.contributions(theta_ref), ridge)
    return W


def two_step_from_stack(st: StackedSample, ridge: float | None = None) -> GmmEstimate:
    q = st.m * st.p
    first = solve_gmm(GmmProblem(st.B_stack, st.a_stack, np.eye(q), st.m, st.p))
    W, root, used = _inverse_moment_covariance(st.contributions(first.theta_hat), ridge)
    problem = GmmProblem(st.B_stack, st.a_stack, W, st.m, st.p, W_ridge=used, W_root=root)
    second = solve_gmm(problem)
    second.steps = 2
    second.first_step = first.theta_hat
    second.problem = problem
    return second


def one_step_gmm(model: ScoreModel, weights: Sequence[WeightSpec], sample) -> GmmEstimate:
    """GMM with the identity weighting matrix."""
    return solve_gmm(build_problem(model, weights, sample))


def two_step_gmm(model: ScoreModel, weights: Sequence[WeightSpec], sample, ridge: float | None = None) -> GmmEstimate:
    """Identity-weighted first step, then re-solve with the inverse moment covariance at that estimate."""
    return two_step_from_stack(stack_sample(model, weights, sample), ridge)
