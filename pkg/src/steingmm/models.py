"""Exponential-family score models with score affine in the parameter.

A model is described by the x-derivative of its log density,

    s_theta(x) = theta . v(x) + c(x),

so only ``v``, ``c`` and their x-derivatives are needed. Evaluators are
vectorised: they take a 1-d array of points and return ``(n, p)`` arrays for
``v`` / ``v_prime`` and ``(n,)`` arrays for ``c`` / ``c_prime``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, DomainError, EmptyBasis, SupportError

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ScoreModel:
    name: str
    p: int
    v: Evaluator
    v_prime: Evaluator
    c: Evaluator
    c_prime: Evaluator
    support: tuple[float, float] = (0.0, math.inf)

    def check_support(self, x) -> np.ndarray:
        """Return ``x`` as a float array, raising if any point is outside the open support."""
        arr = np.asarray(x, dtype=np.float64)
        lower, upper = self.support
        inside = (arr > lower) & (arr < upper)
        if not np.all(inside):
            bad = np.atleast_1d(arr)[~np.atleast_1d(inside)][0]
            raise SupportError(f"x = {bad!r} is outside the open support {self.support} of {self.name}")
        return arr

    def check_theta(self, theta) -> np.ndarray:
        t = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        if t.shape != (self.p,):
            raise DimensionMismatch(f"{self.name} expects theta of length {self.p}, got shape {t.shape}")
        return t

    def evaluate(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """``(v, v', c, c')`` at the points ``x`` (1-d), shapes ``(n,p), (n,p), (n,), (n,)``."""
        xs = np.atleast_1d(self.check_support(x)).ravel()
        return self.v(xs), self.v_prime(xs), self.c(xs), self.c_prime(xs)


def _unwrap(x, out: np.ndarray):
    return float(out[0]) if np.ndim(x) == 0 else out


def score(model: ScoreModel, theta, x):
    """s_theta(x) = theta . v(x) + c(x); scalar in, scalar out."""
    t = model.check_theta(theta)
    v, _, c, _ = model.evaluate(x)
    return _unwrap(x, v @ t + c)


def score_x_derivative(model: ScoreModel, theta, x):
    """d/dx s_theta(x) = theta . v'(x) + c'(x)."""
    t = model.check_theta(theta)
    _, vp, _, cp = model.evaluate(x)
    return _unwrap(x, vp @ t + cp)


@dataclass(frozen=True)
class GammaParams:
    """Gamma(shape=alpha, rate=beta); theta coordinates are ``(alpha - 1, beta)``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError(f"gamma parameters must be positive, got alpha={self.alpha}, beta={self.beta}")

    def to_theta(self) -> np.ndarray:
        return np.array([self.alpha - 1.0, self.beta])

    @classmethod
    def from_theta(cls, theta) -> "GammaParams":
        t = np.asarray(theta, dtype=np.float64)
        return cls(alpha=float(t[0]) + 1.0, beta=float(t[1]))


def _column(x: np.ndarray) -> np.ndarray:
    return x.reshape(-1, 1)


def gamma_one_param_model() -> ScoreModel:
    """Gamma with unit rate and unknown shape theta + 1: s_theta(x) = theta / x - 1."""
    return ScoreModel(
        name="gamma1",
        p=1,
        v=lambda x: _column(1.0 / x),
        v_prime=lambda x: _column(-1.0 / x**2),
        c=lambda x: -np.ones_like(x),
        c_prime=lambda x: np.zeros_like(x),
    )


def gamma_two_param_model() -> ScoreModel:
    """Gamma(alpha, beta) with theta = (alpha - 1, beta): s_theta(x) = theta_1 / x - theta_2."""
    return ScoreModel(
        name="gamma2",
        p=2,
        v=lambda x: np.column_stack([1.0 / x, -np.ones_like(x)]),
        v_prime=lambda x: np.column_stack([-1.0 / x**2, np.zeros_like(x)]),
        c=lambda x: np.zeros_like(x),
        c_prime=lambda x: np.zeros_like(x),
    )


@dataclass(frozen=True)
class BasisModel:
    """Density proportional to exp(sum_j theta_j phi_j(x)), given phi_j' and phi_j''.

    Each evaluator maps a 1-d array of points to a 1-d array.
    """

    basis_derivatives: Sequence[Evaluator]
    basis_second_derivatives: Sequence[Evaluator]
    support: tuple[float, float] = (-math.inf, math.inf)
    name: str = "basis"

    def __post_init__(self):
        if len(self.basis_derivatives) == 0:
            raise EmptyBasis("basis model needs at least one function")
        if len(self.basis_derivatives) != len(self.basis_second_derivatives):
            raise DimensionMismatch("need one second derivative per basis derivative")

    @property
    def p(self) -> int:
        return len(self.basis_derivatives)


def model_from_basis(basis: BasisModel) -> ScoreModel:
    """Score model with v_j = phi_j' and c = 0."""
    first = tuple(basis.basis_derivatives)
    second = tuple(basis.basis_second_derivatives)
    if not first:
        raise EmptyBasis("basis model needs at least one function")

    def stack(fns):
        return lambda x: np.column_stack([np.broadcast_to(f(x), x.shape) for f in fns])

    return ScoreModel(
        name=basis.name,
        p=len(first),
        v=stack(first),
        v_prime=stack(second),
        c=np.zeros_like,
        c_prime=np.zeros_like,
        support=basis.support,
    )


MODELS = {"gamma1": gamma_one_param_model, "gamma2": gamma_two_param_model}


def get_model(name: str) -> ScoreModel:
    try:
        return MODELS[name]()
    except KeyError:
        raise ValueError(
            f"unknown model {name!r}; choose from {sorted(MODELS)} (basis models are built programmatically)"
        ) from None
