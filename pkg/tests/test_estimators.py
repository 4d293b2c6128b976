import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steingmm.errors import DegenerateProblem, NonPositiveData
from steingmm.estimators import (
    basis_estimate,
    classical_moments,
    gamma_mle,
    gamma_mle_two_param,
    inverse_digamma,
    minimize_empirical_objective,
    single_weight_estimate,
)
from steingmm.models import BasisModel, gamma_one_param_model, gamma_two_param_model
from steingmm.moments import lambda_at
from steingmm.numerics import RngStream, digamma, sample_gamma, trigamma
from steingmm.weights import power_weight, zero_weight

GAMMA1 = gamma_one_param_model()
GAMMA2 = gamma_two_param_model()
GAMMA2_BASIS = BasisModel(
    [lambda x: 1.0 / x, lambda x: -np.ones_like(x)],
    [lambda x: -1.0 / x**2, lambda x: np.zeros_like(x)],
    support=(0.0, math.inf),
)


def ratio_oracle(w, wp, xs):
    """Hand formula for the one-parameter gamma: sum(w/x - w'/x + w/x^2) / sum(w/x^2)."""
    xs = np.asarray(xs, float)
    return np.sum(w(xs) / xs - wp(xs) / xs + w(xs) / xs**2) / np.sum(w(xs) / xs**2)


def test_hyvarinen_hand_value():
    assert single_weight_estimate(GAMMA1, power_weight(0), [1.0, 2.0]).theta_hat[0] == pytest.approx(2.2, rel=1e-14)


def test_gamma2_x_squared_hand_value():
    np.testing.assert_allclose(single_weight_estimate(GAMMA2, power_weight(2), [1.0, 2.0, 3.0]).theta_hat, [5.0, 3.0])


@given(st.lists(st.floats(0.05, 40.0), min_size=1, max_size=40))
def test_sample_mean_identity(xs):
    got = single_weight_estimate(GAMMA1, power_weight(2), xs).theta_hat[0]
    assert got == pytest.approx(np.mean(xs) - 1.0, rel=1e-12, abs=1e-12)


@given(st.lists(st.floats(0.05, 40.0), min_size=1, max_size=40), st.floats(0.0, 3.0))
def test_one_param_matches_ratio_formula(xs, xi):
    w = power_weight(xi)
    got = single_weight_estimate(GAMMA1, w, xs).theta_hat[0]
    assert got == pytest.approx(ratio_oracle(w.w, w.w_prime, xs), rel=1e-10)


@given(st.integers(0, 2**31 - 1))
def test_classical_moments_identity(seed):
    x = np.random.default_rng(seed).gamma(3.0, 2.0, size=30)
    m, v = x.mean(), x.var()
    got = single_weight_estimate(GAMMA2, power_weight(2), x).theta_hat
    np.testing.assert_allclose(got, [m**2 / v - 1.0, m / v], rtol=1e-12)
    np.testing.assert_allclose(classical_moments(GAMMA2, x).theta_hat, got, rtol=1e-12)


def test_basis_estimate_matches_gamma2():
    xs = [1.0, 2.0, 3.0]
    got = basis_estimate(GAMMA2_BASIS, power_weight(2), xs).theta_hat
    np.testing.assert_allclose(got, [5.0, 3.0], rtol=1e-12)


def test_basis_estimate_one_dimensional():
    basis = BasisModel([lambda x: 1.0 / x], [lambda x: -1.0 / x**2], support=(0.0, math.inf))
    got = basis_estimate(basis, power_weight(0), [0.5, 1.0, 4.0]).theta_hat
    assert got[0] == pytest.approx(1.0, rel=1e-14)


def test_basis_estimate_zero_weight():
    with pytest.raises(DegenerateProblem):
        basis_estimate(GAMMA2_BASIS, zero_weight(), [1.0, 2.0, 3.0])


def test_single_weight_zero_weight():
    with pytest.raises(DegenerateProblem):
        single_weight_estimate(GAMMA2, zero_weight(), [1.0, 2.0, 3.0])


def test_inverse_digamma():
    for alpha in (1e-3, 0.2, 1.0, 5.0, 250.0):
        got, _ = inverse_digamma(digamma(alpha))
        assert got == pytest.approx(alpha, rel=1e-9)


def test_gamma_mle_fixed_point():
    x0 = math.exp(digamma(5.0))
    assert gamma_mle([x0, x0, x0]).theta_hat[0] == pytest.approx(4.0, abs=1e-9)
    # geometric mean is what matters
    assert gamma_mle([x0 / 2, x0 * 2]).theta_hat[0] == pytest.approx(4.0, abs=1e-9)


def test_gamma_mle_known_rate():
    # psi(alpha) = mean log x + log rate
    x0 = math.exp(digamma(3.0)) / 2.0
    assert gamma_mle([x0], known_rate=2.0).theta_hat[0] == pytest.approx(2.0, abs=1e-9)


def test_gamma_mle_rejects_zero():
    with pytest.raises(NonPositiveData):
        gamma_mle([1.0, 0.0, 2.0])


def test_gamma_mle_two_param_round_trip():
    # the two-parameter MLE only depends on log(mean) - mean(log); choose data accordingly
    x = np.array([1.0, 4.0])
    got = gamma_mle_two_param(x).theta_hat
    alpha = got[0] + 1
    s = math.log(x.mean()) - np.log(x).mean()
    assert math.log(alpha) - digamma(alpha) == pytest.approx(s, rel=1e-10)
    assert got[1] == pytest.approx(alpha / x.mean())


def test_gamma_mle_two_param_consistency():
    n = 10**5
    x = sample_gamma(RngStream(31337, 0), 5.0, 1.0, n)
    got = gamma_mle_two_param(x).theta_hat
    alpha, beta = got[0] + 1.0, got[1]
    info = np.array([[trigamma(5.0), -1.0], [-1.0, 5.0]])
    se = np.sqrt(np.diag(np.linalg.inv(info)) / n)
    assert abs(alpha - 5.0) <= 4 * se[0]
    assert abs(beta - 1.0) <= 4 * se[1]


def test_gamma_mle_two_param_constant_sample():
    with pytest.raises(DegenerateProblem):
        gamma_mle_two_param([2.0, 2.0, 2.0])


def test_oracle_examples():
    assert minimize_empirical_objective(GAMMA1, power_weight(0), [1.0, 2.0]).theta_hat[0] == pytest.approx(2.2, rel=1e-12)
    np.testing.assert_allclose(
        minimize_empirical_objective(GAMMA2, power_weight(2), [1.0, 2.0, 3.0]).theta_hat, [5.0, 3.0], rtol=1e-12
    )
    with pytest.raises(DegenerateProblem):
        minimize_empirical_objective(GAMMA2, zero_weight(), [1.0, 2.0, 3.0])


def test_oracle_independent_of_centre():
    x = np.random.default_rng(4).gamma(5.0, 1.0, size=50)
    a = minimize_empirical_objective(GAMMA2, power_weight(0.5), x).theta_hat
    b = minimize_empirical_objective(GAMMA2, power_weight(0.5), x, init=[3.0, 0.5]).theta_hat
    np.testing.assert_allclose(a, b, rtol=1e-9)


@pytest.mark.parametrize("xi", [0.0, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("model", [GAMMA1, GAMMA2], ids=lambda m: m.name)
def test_first_order_condition(model, xi, gamma_sample):
    w = power_weight(xi)
    theta = single_weight_estimate(model, w, gamma_sample).theta_hat
    total = lambda_at(model, w, theta, gamma_sample).sum(axis=0)
    scale = np.abs(lambda_at(model, w, theta, gamma_sample)).max()
    assert np.all(np.abs(total) <= 1e-10 * len(gamma_sample) * max(1.0, scale))


@pytest.mark.parametrize("xi", [0.0, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("model", [GAMMA1, GAMMA2], ids=lambda m: m.name)
@given(seed=st.integers(0, 2**31 - 1))
def test_moment_estimator_minimises_score_objective(model, xi, seed):
    x = np.random.default_rng(seed).gamma(5.0, 1.0, size=100)
    w = power_weight(xi)
    closed = single_weight_estimate(model, w, x).theta_hat
    oracle = minimize_empirical_objective(model, w, x).theta_hat
    assert np.linalg.norm(oracle - closed) <= 1e-8 * (1 + np.linalg.norm(closed))
