"""Seeded Monte Carlo harness comparing estimators on paired gamma samples."""

from __future__ import annotations

import hashlib
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateProblem, DomainError, EmptyInput
from .estimators import classical_moments, gamma_mle, gamma_mle_two_param, minimize_empirical_objective, single_weight_estimate
from .gmm import one_step_gmm, two_step_gmm
from .models import ScoreModel, get_model
from .numerics import RngStream, sample_gamma, summary_stats
from .weights import power_weight

log = logging.getLogger(__name__)

DEFAULT_SEED = 20240501
TABLE1_XI = (0.0, 2.0)
FIGURE1_XI = (0.0, 0.3, 0.4, 0.5, 0.8, 1.0, 1.2, 1.5, 1.8, 2.0)
FAILURE_LIMIT = 0.01


@dataclass
class SimulationConfig:
    model_name: str = "gamma2"
    true_params: dict = field(default_factory=lambda: {"alpha": 5.0, "beta": 1.0})
    n: int = 500
    replications: int = 1000
    master_seed: int = DEFAULT_SEED
    xi_list: list = field(default_factory=lambda: list(FIGURE1_XI))
    estimator_roster: list = field(default_factory=lambda: ["gmm2step"])

    def validate(self):
        if self.n < 2:
            raise DomainError("n must be at least 2")
        if self.replications < 1:
            raise DomainError("replications must be at least 1")
        needs_xi = any(name.startswith("gmm") for name in self.estimator_roster)
        if needs_xi and not self.xi_list:
            raise DomainError("GMM estimators need a non-empty xi list")
        if not self.estimator_roster:
            raise DomainError("estimator roster is empty")
        get_model(self.model_name)
        for name in self.estimator_roster:
            resolve_estimator(name, get_model(self.model_name), self.xi_list)

    def to_dict(self) -> dict:
        return asdict(self)


def table1_config(seed: int = DEFAULT_SEED, replications: int = 1000) -> SimulationConfig:
    return SimulationConfig(
        model_name="gamma1",
        true_params={"alpha": 5.0, "beta": 1.0},
        n=50,
        replications=replications,
        master_seed=seed,
        xi_list=list(TABLE1_XI),
        estimator_roster=["hyvarinen", "power:2", "gmm2step", "mle"],
    )


def figure1_config(seed: int = DEFAULT_SEED, replications: int = 1000) -> SimulationConfig:
    return SimulationConfig(
        model_name="gamma2",
        true_params={"alpha": 5.0, "beta": 1.0},
        n=500,
        replications=replications,
        master_seed=seed,
        xi_list=list(FIGURE1_XI),
        estimator_roster=[f"power:{xi:g}" for xi in FIGURE1_XI] + ["gmm1step", "gmm2step"],
    )


# --------------------------------------------------------------------------- #
# Estimator roster
# --------------------------------------------------------------------------- #


def resolve_estimator(name: str, model: ScoreModel, xi_list) -> Callable[[np.ndarray], np.ndarray]:
    """Map a roster string to ``sample -> theta``.

    Recognised names: ``hyvarinen``, ``power:<xi>``, ``gmm1step``, ``gmm2step``,
    ``mle``, ``classical-moments``, ``oracle-minimizer`` and
    ``oracle-minimizer:<xi>`` (default weight 1).
    """
    weights = [power_weight(xi) for xi in xi_list]
    if name == "hyvarinen":
        w = power_weight(0.0)
        return lambda x: single_weight_estimate(model, w, x).theta_hat
    if name.startswith("power:"):
        w = power_weight(float(name.split(":", 1)[1]))
        return lambda x: single_weight_estimate(model, w, x).theta_hat
    if name == "gmm1step":
        return lambda x: one_step_gmm(model, weights, x).theta_hat
    if name == "gmm2step":
        return lambda x: two_step_gmm(model, weights, x).theta_hat
    if name == "mle":
        if model.name == "gamma1":
            return lambda x: gamma_mle(x).theta_hat
        if model.name == "gamma2":
            return lambda x: gamma_mle_two_param(x).theta_hat
        raise ValueError(f"no MLE available for model {model.name}")
    if name == "classical-moments":
        return lambda x: classical_moments(model, x).theta_hat
    if name == "oracle-minimizer" or name.startswith("oracle-minimizer:"):
        xi = float(name.split(":", 1)[1]) if ":" in name else 0.0
        w = power_weight(xi)
        return lambda x: minimize_empirical_objective(model, w, x).theta_hat
    raise ValueError(f"unknown estimator {name!r}")


def parameter_names(model: ScoreModel) -> list[str]:
    return ["theta"] if model.name == "gamma1" else ["alpha", "beta"]


def to_reported(model: ScoreModel, theta: np.ndarray) -> np.ndarray:
    """theta coordinates -> reported parameters (theta for gamma1, (alpha, beta) for gamma2)."""
    if model.name == "gamma2":
        return np.array([theta[0] + 1.0, theta[1]])
    return np.asarray(theta, dtype=np.float64)


def true_reported(config: SimulationConfig) -> np.ndarray:
    alpha = float(config.true_params["alpha"])
    beta = float(config.true_params.get("beta", 1.0))
    if config.model_name == "gamma1":
        return np.array([alpha - 1.0])
    return np.array([alpha, beta])


def draw_sample(config: SimulationConfig, replication: int) -> np.ndarray:
    rate = 1.0 if config.model_name == "gamma1" else float(config.true_params.get("beta", 1.0))
    rng = RngStream(config.master_seed, replication)
    return sample_gamma(rng, float(config.true_params["alpha"]), rate, config.n)


def fingerprint(sample: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(sample, dtype="<f8").tobytes()).hexdigest()[:16]


# --------------------------------------------------------------------------- #
# Running
# --------------------------------------------------------------------------- #


@dataclass
class SummaryRow:
    estimator: str
    parameter: str
    true_value: float
    mean: float
    bias: float
    variance: float
    mse: float
    mc_standard_error_of_mse: float
    failures: int


@dataclass
class SimulationReport:
    config: SimulationConfig
    estimators: list
    parameters: list
    # estimates[e, r, j]; NaN marks a failed replication
    estimates: np.ndarray
    fingerprints: list
    summary: list
    failures: dict

    def per_replication(self):
        """Rows ``(replication, estimator, parameter, estimate)`` ordered by replication."""
        for r in range(self.estimates.shape[1]):
            for e, name in enumerate(self.estimators):
                for j, par in enumerate(self.parameters):
                    yield r, name, par, float(self.estimates[e, r, j])

    def column(self, estimator: str, parameter: str) -> np.ndarray:
        e = self.estimators.index(estimator)
        j = self.parameters.index(parameter)
        return self.estimates[e, :, j]

    def row(self, estimator: str, parameter: str) -> SummaryRow:
        for row in self.summary:
            if row.estimator == estimator and row.parameter == parameter:
                return row
        raise KeyError((estimator, parameter))


def _run_chunk(config: SimulationConfig, indices) -> list:
    model = get_model(config.model_name)
    fns = [resolve_estimator(name, model, config.xi_list) for name in config.estimator_roster]
    out = []
    for r in indices:
        x = draw_sample(config, r)
        fp = fingerprint(x)
        log.debug("replication %d sample %s", r, fp)
        row = np.full((len(fns), model.p), np.nan)
        for e, fn in enumerate(fns):
            try:
                row[e] = to_reported(model, fn(x))
            except DegenerateProblem as exc:
                log.debug("replication %d: %s failed: %s", r, config.estimator_roster[e], exc)
        out.append((r, fp, row))
    return out


def mse_standard_error(estimates, true_value: float) -> float:
    """Standard error of the mean squared error: sd of squared errors over sqrt(R)."""
    x = np.asarray(estimates, dtype=np.float64).ravel()
    if x.size < 2:
        raise EmptyInput("need at least two estimates for a standard error")
    sq = (x - true_value) ** 2
    return float(np.std(sq, ddof=1) / math.sqrt(x.size))


def _summarise(config, names, params, truth, estimates):
    summary, failures = [], {}
    for e, name in enumerate(names):
        col = estimates[e]
        failed = int(np.sum(np.any(np.isnan(col), axis=1)))
        failures[name] = failed
        if failed > FAILURE_LIMIT * config.replications:
            log.warning("%s failed on %d/%d replications; summary suppressed", name, failed, config.replications)
            continue
        ok = col[~np.any(np.isnan(col), axis=1)]
        if ok.shape[0] == 0:
            continue
        for j, par in enumerate(params):
            st = summary_stats(ok[:, j], truth[j])
            se = mse_standard_error(ok[:, j], truth[j]) if ok.shape[0] >= 2 else float("nan")
            summary.append(SummaryRow(name, par, float(truth[j]), st.mean, st.bias, st.variance, st.mse, se, failed))
    return summary, failures


def run_simulation(config: SimulationConfig, workers: int | None = 1) -> SimulationReport:
    """Run every roster estimator on the same seeded sample per replication and aggregate.

    Replication ``r`` draws from substream ``(master_seed, r)``, so results do not
    depend on ``workers`` or on scheduling.
    """
    config.validate()
    model = get_model(config.model_name)
    names = list(config.estimator_roster)
    params = parameter_names(model)
    truth = true_reported(config)
    R = config.replications
    workers = workers or os.cpu_count() or 1

    if workers <= 1 or R < 2:
        results = _run_chunk(config, range(R))
    else:
        chunks = [list(range(R))[k::workers] for k in range(workers)]
        chunks = [c for c in chunks if c]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            parts = pool.map(_run_chunk, [config] * len(chunks), chunks)
            results = [item for part in parts for item in part]
    results.sort(key=lambda item: item[0])

    estimates = np.empty((len(names), R, model.p))
    fingerprints = []
    for r, fp, row in results:
        estimates[:, r, :] = row
        fingerprints.append(fp)
    summary, failures = _summarise(config, names, params, truth, estimates)
    return SimulationReport(config, names, params, estimates, fingerprints, summary, failures)
