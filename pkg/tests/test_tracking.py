"""Tracking law: error dynamics, feedforward, reduction to regulation."""

import math

import numpy as np
import pytest

from hjbcontrol import (
    CostConfig,
    IllPosedFeedforwardError,
    ReferenceTrajectory,
    error_augmented_matrix,
    eval_drift,
    eval_input_matrix,
    feasible_sinusoid_reference,
    feedforward,
    feedforward_residual,
    regulation_control,
    sinusoid_reference,
    tracking_control,
    tracking_control_error_part,
    zero_reference,
)
from hjbcontrol.dynamics import DynamicsModel
from hjbcontrol.tracking import check_reference_consistency

from conftest import all_builtin_models


# ------------------------------------------------------------ error dynamics

def test_error_matrix_zero_error_column(model_i, rng):
    for _ in range(20):
        x = rng.uniform(-3, 3, size=2)
        p = error_augmented_matrix(model_i, x, x)
        assert np.all(p[:, 0] == 0.0)


def test_error_matrix_zero_reference_is_drift(model_i):
    p = error_augmented_matrix(model_i, [1.0, 0.0], [0.0, 0.0])
    assert np.allclose(p[:, 0], [-1.0, -0.5], atol=1e-15)


def test_error_matrix_g_at_actual_state(model_i, rng):
    for _ in range(50):
        x = rng.uniform(-3, 3, size=2)
        x_d = rng.uniform(-3, 3, size=2)
        p = error_augmented_matrix(model_i, x, x_d)
        assert np.array_equal(p[:, 1:], eval_input_matrix(model_i, x))


# ------------------------------------------------------------ error-part law

def test_error_part_degenerate_at_zero_error(model_i, rng):
    cfg = CostConfig.identity(model_i, 1.0)
    x = rng.uniform(-3, 3, size=2)
    dec = tracking_control_error_part(model_i, cfg, x, x)
    assert dec.degenerate
    assert np.all(dec.tau == 0.0)


def test_error_part_reduces_to_regulation(rng):
    for model in all_builtin_models():
        cfg = CostConfig.identity(model, 0.8)
        zero = np.zeros(model.state_dim)
        for _ in range(100):
            x = rng.uniform(-4, 4, size=model.state_dim)
            dec_t = tracking_control_error_part(model, cfg, x, zero)
            dec_r = regulation_control(model, cfg, x)
            assert np.array_equal(dec_t.u_aug, dec_r.u_aug)
            assert np.array_equal(dec_t.tau, dec_r.tau)
            assert dec_t.state_penalty == dec_r.state_penalty


def test_error_part_hand_value(model_i):
    cfg = CostConfig.identity(model_i, 1.0)
    dec = tracking_control_error_part(model_i, cfg, [1.0, 0.0], [0.0, 0.0])
    assert np.allclose(dec.tau, [0.0], atol=1e-15)


def test_error_lyapunov_decrease(rng):
    for model in all_builtin_models():
        cfg = CostConfig.identity(model, 0.5)
        for _ in range(100):
            x = rng.uniform(-4, 4, size=model.state_dim)
            x_d = rng.uniform(-2, 2, size=model.state_dim)
            dec = tracking_control_error_part(model, cfg, x, x_d)
            if dec.degenerate or dec.state_penalty == 0.0:
                continue
            e = x - x_d
            p = error_augmented_matrix(model, x, x_d)
            assert float(e @ p @ dec.u_aug) < 0.0


# ------------------------------------------------------------ feedforward

def test_feedforward_zero_when_reference_follows_drift(model_i, rng):
    for _ in range(20):
        x_d = rng.uniform(-2, 2, size=2)
        tau_d = feedforward(model_i, x_d, x_d, eval_drift(model_i, x_d))
        assert np.allclose(tau_d, [0.0], atol=1e-12)


def test_feedforward_plant_ii_selects_second_component(model_ii_case1, rng):
    # g = [0,1]': the pseudoinverse picks out the second component
    for _ in range(20):
        x_d = rng.uniform(-2, 2, size=2)
        x_d_dot = rng.uniform(-2, 2, size=2)
        expected = x_d_dot[1] - eval_drift(model_ii_case1, x_d)[1]
        tau_d = feedforward(model_ii_case1, x_d, x_d, x_d_dot)
        assert math.isclose(tau_d[0], expected, rel_tol=1e-12, abs_tol=1e-14)


def test_feedforward_plant_i_hand_value(model_i):
    # at x = 0, g = [0,3]': tau_d = (x_d_dot_2 - f_2(x_d)) / 3
    x_d = np.array([0.2, -0.1])
    x_d_dot = np.array([0.5, 1.0])
    expected = (x_d_dot[1] - eval_drift(model_i, x_d)[1]) / 3.0
    tau_d = feedforward(model_i, [0.0, 0.0], x_d, x_d_dot)
    assert math.isclose(tau_d[0], expected, rel_tol=1e-12)


def test_pseudoinverse_property(rng):
    for model in all_builtin_models():
        for _ in range(50):
            x = rng.uniform(-4, 4, size=model.state_dim)
            g = eval_input_matrix(model, x)
            from hjbcontrol.tracking import _checked_pinv
            g_pinv = _checked_pinv(g)
            assert np.allclose(g @ g_pinv @ g, g, rtol=0.0, atol=1e-10)


def test_rank_deficient_g_raises():
    flat = DynamicsModel(
        name="no-authority", state_dim=2, input_dim=1,
        drift=lambda x: np.array([x[1], 0.0]),
        input_matrix=lambda x: np.array([[0.0], [0.0]]),
    )
    with pytest.raises(IllPosedFeedforwardError):
        feedforward(flat, [1.0, 1.0], [0.0, 0.0], [1.0, 0.0])


def test_feedforward_residual_feasible_vs_infeasible(model_i):
    ref = feasible_sinusoid_reference(0.5, 1.0)
    t = 0.7
    r_feasible = feedforward_residual(
        model_i, ref.x_d(t), ref.x_d(t), ref.x_d_dot(t)
    )
    assert r_feasible < 1e-12

    bad = sinusoid_reference(model_i, 1.0, 1.0)  # [sin t, cos t]: infeasible
    r_bad = feedforward_residual(model_i, bad.x_d(t), bad.x_d(t), bad.x_d_dot(t))
    assert r_bad > 1e-2


# ------------------------------------------------------------ total law

def test_total_law_zero_on_drift_following_reference(model_i):
    x_d = np.array([0.4, -0.3])
    ref = ReferenceTrajectory(
        x_d=lambda t: x_d, x_d_dot=lambda t: eval_drift(model_i, x_d)
    )
    cfg = CostConfig.identity(model_i, 1.0)
    tau = tracking_control(model_i, cfg, x_d, ref, 0.0)
    assert np.allclose(tau, [0.0], atol=1e-12)


def test_total_law_feedforward_only_at_zero_error(model_i):
    ref = feasible_sinusoid_reference(0.5, 1.0)
    cfg = CostConfig.identity(model_i, 1.0)
    t = 1.3
    x = np.asarray(ref.x_d(t))
    tau = tracking_control(model_i, cfg, x, ref, t)
    expected = feedforward(model_i, x, ref.x_d(t), ref.x_d_dot(t))
    assert np.array_equal(tau, expected)


def test_total_law_against_scalar_rederivation(model_i):
    # independent re-derivation with plain floats for plant I at t=0,
    # x=[0,1], reference [sin t, cos t]
    cfg = CostConfig.identity(model_i, 1.0)
    ref = sinusoid_reference(model_i, 1.0, 1.0)
    x1, x2 = 0.0, 1.0
    xd1, xd2 = math.sin(0.0), math.cos(0.0)
    e1, e2 = x1 - xd1, x2 - xd2

    def f(a, b):
        c = math.cos(2.0 * a) + 2.0
        return (-a + b, -0.5 * a - 0.5 * b * (1.0 - c * c))

    f1, f2 = f(x1, x2)
    fd1, fd2 = f(xd1, xd2)
    fe1, fe2 = f1 - fd1, f2 - fd2
    g2 = math.cos(2.0 * x1) + 2.0
    pte = (fe1 * e1 + fe2 * e2, g2 * e2)
    nrm = math.hypot(*pte)
    q = e1 * e1 + e2 * e2 + 1.0 * nrm * nrm
    tau_e = -(pte[1] / nrm) * math.sqrt(q) if nrm > 1e-10 else 0.0
    xd_dot2 = -math.sin(0.0)
    tau_d = (xd_dot2 - fd2) / g2  # pinv of [0, g2]'
    expected = tau_e + tau_d

    tau = tracking_control(model_i, cfg, [x1, x2], ref, 0.0)
    assert math.isclose(tau[0], expected, rel_tol=1e-12)


def test_reference_consistency_check():
    good = feasible_sinusoid_reference(1.0, 2.0)
    check_reference_consistency(good, [0.5, 1.0, 2.0])

    lying = ReferenceTrajectory(
        x_d=lambda t: np.array([math.sin(t), math.cos(t)]),
        x_d_dot=lambda t: np.array([math.cos(t), math.sin(t)]),  # wrong sign
    )
    from hjbcontrol import ConfigurationError
    with pytest.raises(ConfigurationError):
        check_reference_consistency(lying, [1.0])


def test_zero_reference_is_consistent(model_i):
    ref = zero_reference(model_i)
    check_reference_consistency(ref, [0.1, 5.0])
    assert np.all(ref.x_d(3.0) == 0.0) and np.all(ref.x_d_dot(3.0) == 0.0)
