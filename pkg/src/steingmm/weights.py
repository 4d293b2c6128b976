"""Weight functions w(x) for the weighted Fisher divergence, and a numeric boundary check."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DomainError
from .models import ScoreModel


class BoundaryConditionWarning(UserWarning):
    """w v f does not appear to vanish at the edges of the support."""


@dataclass(frozen=True)
class WeightSpec:
    w: Callable[[np.ndarray], np.ndarray]
    w_prime: Callable[[np.ndarray], np.ndarray]
    label: str


def power_weight(xi: float) -> WeightSpec:
    """w(x) = x**xi with w'(x) = xi * x**(xi - 1); xi = 0 is the constant weight."""
    xi = float(xi)
    if not (xi >= 0 and math.isfinite(xi)):
        raise DomainError(f"power weights need a finite exponent xi >= 0, got {xi}")
    if xi == 0.0:
        return WeightSpec(w=np.ones_like, w_prime=np.zeros_like, label="power:0")
    return WeightSpec(
        w=lambda x: np.power(x, xi),
        w_prime=lambda x: xi * np.power(x, xi - 1.0),
        label=f"power:{xi:g}",
    )


def zero_weight() -> WeightSpec:
    return WeightSpec(w=np.zeros_like, w_prime=np.zeros_like, label="zero")


def parse_xi_list(text: str) -> list[float]:
    """Parse ``"0,0.3,0.5"`` into floats."""
    items = [s.strip() for s in str(text).split(",") if s.strip()]
    if not items:
        raise ValueError("empty xi list")
    return [float(s) for s in items]


@dataclass
class BoundaryReport:
    passed: bool
    # (boundary, component) -> (passed, log10 of last probe relative to interior max)
    details: dict = field(default_factory=dict)


def _probe_grid(support, scale: float, decades: int, per_decade: int):
    lower, upper = support
    exps = np.linspace(0.0, decades, decades * per_decade + 1)[1:]
    if math.isfinite(lower) and math.isfinite(upper):
        centre = 0.5 * (lower + upper)
        half = 0.5 * (upper - lower)
        lo = lower + half * 10.0**-exps
        hi = upper - half * 10.0**-exps
    else:
        if math.isfinite(lower):
            centre = lower + scale
            lo = lower + scale * 10.0**-exps
        else:
            centre = (upper - scale) if math.isfinite(upper) else 0.0
            lo = centre - scale * 10.0**exps
        if math.isfinite(upper):
            hi = upper - (upper - centre) * 10.0**-exps
        else:
            hi = centre + scale * 10.0**exps
    return centre, lo, hi


def _log_density(model: ScoreModel, theta: np.ndarray, centre: float, points: np.ndarray) -> np.ndarray:
    # integrate the score outward from the centre, segment by segment
    def s(t):
        v = model.v(np.array([t]))[0]
        return float(v @ theta + model.c(np.array([t]))[0])

    out = np.empty(points.size)
    acc, prev = 0.0, centre
    for i, x in enumerate(points):
        piece, _ = integrate.quad(s, prev, x, limit=200)
        acc += piece
        out[i] = acc
        prev = x
    return out


def check_boundary_vanishing(
    model: ScoreModel,
    weight: WeightSpec,
    theta,
    scale: float = 1.0,
    decades: int = 6,
    per_decade: int = 4,
    warn: bool = False,
) -> BoundaryReport:
    """Check numerically that w(x) v_j(x) f(x|theta) vanishes at both ends of the support.

    The unnormalised density comes from integrating the score. Along each
    geometric probe sequence the last three values must be strictly decreasing
    and below 1e-8 times the interior maximum. A failure is returned in the
    report (and optionally warned about); it is never raised.
    """
    theta = model.check_theta(theta)
    centre, lo, hi = _probe_grid(model.support, scale, decades, per_decade)
    grid = np.concatenate([lo[::-1], [centre], hi])
    logf = np.concatenate(
        [
            _log_density(model, theta, centre, lo)[::-1],
            [0.0],
            _log_density(model, theta, centre, hi),
        ]
    )
    with np.errstate(divide="ignore"):
        magnitude = np.log(np.abs(weight.w(grid)))[:, None] + np.log(np.abs(model.v(grid))) + logf[:, None]

    threshold = math.log(1e-8)
    report = BoundaryReport(passed=True)
    n_lo = lo.size
    for j in range(model.p):
        col = magnitude[:, j]
        finite = col[np.isfinite(col)]
        if finite.size == 0:
            # identically zero component
            for side in ("lower", "upper"):
                report.details[(side, j)] = (True, -math.inf)
            continue
        peak = finite.max()
        sequences = {"lower": col[:n_lo][:3][::-1], "upper": col[-3:]}
        for side, tail in sequences.items():
            decreasing = bool(np.all(np.diff(tail) < 0) or np.all(np.isneginf(tail)))
            small = bool(tail[-1] - peak < threshold)
            ok = decreasing and small
            report.details[(side, j)] = (ok, float((tail[-1] - peak) / math.log(10)))
            report.passed &= ok
    if warn and not report.passed:
        warnings.warn(
            f"{weight.label}: w v f does not vanish at the support boundary for {model.name} at theta={theta}",
            BoundaryConditionWarning,
            stacklevel=2,
        )
    return report
