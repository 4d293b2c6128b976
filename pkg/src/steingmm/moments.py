"""Stein moment functions with tau = grad_theta s_theta, and their Monte Carlo blocks.

For an affine score the moment function for weight w is

    lambda(x, theta) = w v s_theta + (w v)' = A(x) - B(x) theta,
    A(x) = (w v)' + w c v,    B(x) = -w v v^T.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyInput
from .models import ScoreModel
from .weights import WeightSpec


@dataclass(frozen=True)
class MomentBlocks:
    A_bar: np.ndarray
    B_bar: np.ndarray
    weight_label: str
    n: int


def pointwise_blocks(model: ScoreModel, weight: WeightSpec, x) -> tuple[np.ndarray, np.ndarray]:
    """Per-observation ``A(x_i)`` with shape ``(n, p)`` and ``B(x_i)`` with shape ``(n, p, p)``."""
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel()
    v, vp, c, _ = model.evaluate(xs)
    w = weight.w(xs)
    wp = weight.w_prime(xs)
    A = wp[:, None] * v + w[:, None] * vp + (w * c)[:, None] * v
    B = -w[:, None, None] * v[:, :, None] * v[:, None, :]
    return A, B


def lambda_at(model: ScoreModel, weight: WeightSpec, theta, x) -> np.ndarray:
    """lambda(x, theta); shape ``(p,)`` for scalar ``x`` and ``(n, p)`` for an array."""
    t = model.check_theta(theta)
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel()
    v, vp, c, _ = model.evaluate(xs)
    w = weight.w(xs)
    wp = weight.w_prime(xs)
    s = v @ t + c
    out = (w * s)[:, None] * v + wp[:, None] * v + w[:, None] * vp
    return out[0] if np.ndim(x) == 0 else out


def blocks(model: ScoreModel, weight: WeightSpec, sample) -> MomentBlocks:
    """Sample averages of A(x) and B(x) over ``sample``."""
    xs = np.atleast_1d(np.asarray(sample, dtype=np.float64)).ravel()
    if xs.size == 0:
        raise EmptyInput("moment blocks need at least one observation")
    A, B = pointwise_blocks(model, weight, xs)
    # numpy's pairwise summation keeps rounding error O(log n) for large samples
    return MomentBlocks(A_bar=A.mean(axis=0), B_bar=B.mean(axis=0), weight_label=weight.label, n=xs.size)


def stacked_contribution(model: ScoreModel, weights: Sequence[WeightSpec], theta, x) -> np.ndarray:
    """Concatenate lambda_at over ``weights`` in order: ``(m*p,)`` or ``(n, m*p)``."""
    parts = [lambda_at(model, w, theta, x) for w in weights]
    return np.concatenate(parts, axis=-1)
