import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steingmm.errors import EmptyInput, SupportError
from steingmm.models import gamma_one_param_model, gamma_two_param_model
from steingmm.moments import blocks, lambda_at, pointwise_blocks, stacked_contribution
from steingmm.weights import WeightSpec, power_weight, zero_weight

GAMMA1 = gamma_one_param_model()
GAMMA2 = gamma_two_param_model()


def test_lambda_examples():
    np.testing.assert_allclose(lambda_at(GAMMA1, power_weight(0), [4.0], 2.0), [0.25])  # (1/2)(4/2 - 1) - 1/4
    np.testing.assert_allclose(lambda_at(GAMMA2, power_weight(2), [4.0, 1.0], 2.0), [3.0, -8.0])
    np.testing.assert_array_equal(lambda_at(GAMMA2, zero_weight(), [4.0, 1.0], 2.0), [0.0, 0.0])


def test_lambda_support():
    with pytest.raises(SupportError):
        lambda_at(GAMMA1, power_weight(1), [4.0], -1.0)


def test_blocks_gamma2_x_squared():
    blk = blocks(GAMMA2, power_weight(2), [1.0, 2.0, 3.0])
    np.testing.assert_allclose(blk.B_bar, [[-1.0, 2.0], [2.0, -14.0 / 3.0]], rtol=1e-15)
    np.testing.assert_allclose(blk.A_bar, [1.0, -4.0], rtol=1e-15)
    assert blk.n == 3


def test_blocks_single_point():
    blk = blocks(GAMMA1, power_weight(0), [1.0])
    np.testing.assert_allclose(blk.A_bar, [-2.0])
    np.testing.assert_allclose(blk.B_bar, [[-1.0]])


def test_blocks_repetition_invariance():
    one = blocks(GAMMA2, power_weight(0.7), [2.5])
    many = blocks(GAMMA2, power_weight(0.7), [2.5] * 9)
    np.testing.assert_allclose(many.A_bar, one.A_bar, rtol=1e-15)
    np.testing.assert_allclose(many.B_bar, one.B_bar, rtol=1e-15)


def test_blocks_empty():
    with pytest.raises(EmptyInput):
        blocks(GAMMA2, power_weight(1), [])


def test_stacked_contribution():
    np.testing.assert_allclose(
        stacked_contribution(GAMMA1, [power_weight(0), power_weight(2)], [4.0], 2.0), [0.25, 3.0]
    )
    single = stacked_contribution(GAMMA2, [power_weight(1)], [4.0, 1.0], 2.0)
    np.testing.assert_array_equal(single, lambda_at(GAMMA2, power_weight(1), [4.0, 1.0], 2.0))
    zeroed = stacked_contribution(GAMMA2, [power_weight(1), zero_weight(), power_weight(2)], [4.0, 1.0], 2.0)
    np.testing.assert_array_equal(zeroed[2:4], 0.0)
    assert np.all(zeroed[:2] != 0)


xs_strategy = st.lists(st.floats(0.05, 30.0), min_size=1, max_size=30)
theta_strategy = st.lists(st.floats(-5, 10), min_size=2, max_size=2)
xi_strategy = st.floats(0.0, 3.0)


@given(xs=xs_strategy, theta=theta_strategy, xi=xi_strategy)
def test_decomposition(xs, theta, xi):
    w = power_weight(xi)
    A, B = pointwise_blocks(GAMMA2, w, xs)
    lam = lambda_at(GAMMA2, w, theta, np.array(xs))
    expected = A - B @ np.array(theta)
    np.testing.assert_allclose(lam, expected, rtol=1e-12, atol=1e-12 * np.abs(expected).max())


@given(xs=xs_strategy, theta=theta_strategy, xi=xi_strategy)
def test_mean_identity(xs, theta, xi):
    w = power_weight(xi)
    blk = blocks(GAMMA2, w, xs)
    avg = lambda_at(GAMMA2, w, theta, np.array(xs)).mean(axis=0)
    expected = blk.A_bar - blk.B_bar @ np.array(theta)
    np.testing.assert_allclose(avg, expected, rtol=1e-12, atol=1e-12 * (np.abs(avg).max() + 1))


@given(xs=xs_strategy, theta=theta_strategy, xi1=xi_strategy, xi2=xi_strategy)
def test_linear_in_weight(xs, theta, xi1, xi2):
    w1, w2 = power_weight(xi1), power_weight(xi2)
    wsum = WeightSpec(lambda x: w1.w(x) + w2.w(x), lambda x: w1.w_prime(x) + w2.w_prime(x), "sum")
    x = np.array(xs)
    lhs = lambda_at(GAMMA2, wsum, theta, x)
    rhs = lambda_at(GAMMA2, w1, theta, x) + lambda_at(GAMMA2, w2, theta, x)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * (np.abs(rhs).max() + 1))


@given(xs=xs_strategy, xi=xi_strategy)
def test_minus_B_bar_psd_and_symmetric(xs, xi):
    blk = blocks(GAMMA2, power_weight(xi), xs)
    np.testing.assert_allclose(blk.B_bar, blk.B_bar.T, atol=1e-12)
    scale = max(1.0, np.abs(blk.B_bar).max())
    assert np.linalg.eigvalsh(-blk.B_bar).min() >= -1e-10 * scale
