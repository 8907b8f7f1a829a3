"""Closed-form tracking control with pseudoinverse feedforward.

Given a reference x_d(t) with known derivative, the tracking error
e = x - x_d obeys

    edot = f_e(e) + g(x) tau_e,    f_e = f(x) - f(x_d),  tau_e = tau - tau_d,

which has the same augmented structure as the regulation problem with
P_e(x) = [f_e | g(x)]. The error part of the input therefore reuses the
closed form from :mod:`hjbcontrol.regulation` with (P_e, e) in place of
(P, x), and the total input adds a feedforward solved by pseudoinverse:

    tau*(t) = D u_e*(t) + g(x)^+ [xdot_d - f(x_d)].

Note that g is evaluated at the actual state x in both the error dynamics
and the feedforward; tau_d is therefore state dependent. When
xdot_d - f(x_d) leaves range(g) the reference is not exactly trackable;
:func:`feedforward_residual` reports the unreachable component so callers
can detect that instead of silently chasing an infeasible reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import DynamicsModel, eval_drift, eval_input_matrix, _as_state
from .exceptions import ConfigurationError, IllPosedFeedforwardError
from .regulation import ControlDecision, CostConfig, _check_cfg_dims, _closed_form_decision

__all__ = [
    "ReferenceTrajectory",
    "zero_reference",
    "sinusoid_reference",
    "feasible_sinusoid_reference",
    "error_augmented_matrix",
    "tracking_control_error_part",
    "feedforward",
    "feedforward_residual",
    "tracking_control",
]

# Relative singular-value cutoff for the pseudoinverse and the rank check.
_PINV_RCOND = 1e-10


@dataclass(frozen=True)
class ReferenceTrajectory:
    """A desired trajectory x_d(t) and its claimed derivative xdot_d(t).

    Both callables must return length-m vectors on the whole simulation
    horizon. The derivative is taken on trust; use
    :func:`check_reference_consistency` to spot-check it against a central
    difference of x_d.
    """

    x_d: Callable[[float], np.ndarray]
    x_d_dot: Callable[[float], np.ndarray]
    name: str = "reference"


def zero_reference(model: DynamicsModel) -> ReferenceTrajectory:
    """The origin as a (trivially feasible) reference."""
    zero = np.zeros(model.state_dim)

    def x_d(t):
        return zero

    def x_d_dot(t):
        return zero

    return ReferenceTrajectory(x_d, x_d_dot, name="zero")


def sinusoid_reference(model: DynamicsModel, amplitude: float, omega: float) -> ReferenceTrajectory:
    """x_d(t) = A [sin wt, cos wt, sin wt, ...] over the state dimensions.

    Generic preset; not feasible for every plant (the first-order
    consistency between components is not enforced).
    """
    m = model.state_dim

    def x_d(t):
        return np.array([
            amplitude * (math.sin(omega * t) if i % 2 == 0 else math.cos(omega * t))
            for i in range(m)
        ])

    def x_d_dot(t):
        return np.array([
            amplitude * omega * (math.cos(omega * t) if i % 2 == 0 else -math.sin(omega * t))
            for i in range(m)
        ])

    return ReferenceTrajectory(x_d, x_d_dot, name=f"sinusoid(A={amplitude},w={omega})")


def feasible_sinusoid_reference(amplitude: float, omega: float) -> ReferenceTrajectory:
    """A sinusoid that plant I can track exactly.

    Plant I has g(x) = [0, *]', so a trackable reference must satisfy the
    first drift equation xdot_d1 = -x_d1 + x_d2 identically. Choosing
    x_d1 = A sin(wt) forces x_d2 = A sin(wt) + A w cos(wt); the second
    component is then handled entirely by the feedforward channel.
    """

    def x_d(t):
        s = math.sin(omega * t)
        c = math.cos(omega * t)
        return np.array([amplitude * s, amplitude * s + amplitude * omega * c])

    def x_d_dot(t):
        s = math.sin(omega * t)
        c = math.cos(omega * t)
        return np.array([
            amplitude * omega * c,
            amplitude * omega * c - amplitude * omega * omega * s,
        ])

    return ReferenceTrajectory(
        x_d, x_d_dot, name=f"feasible-sinusoid(A={amplitude},w={omega})"
    )


def check_reference_consistency(
    ref: ReferenceTrajectory, times, h: float = 1e-5, tol: float = 1e-4
):
    """Spot-check that x_d_dot matches a central difference of x_d.

    Raises :class:`ConfigurationError` at the first sampled time where the
    claimed derivative is off by more than ``tol`` (absolute, per
    component).
    """
    for t in times:
        approx = (np.asarray(ref.x_d(t + h)) - np.asarray(ref.x_d(t - h))) / (2.0 * h)
        err = np.max(np.abs(approx - np.asarray(ref.x_d_dot(t))))
        if not err < tol:
            raise ConfigurationError(
                f"reference '{ref.name}': claimed derivative off by {err:.3e} "
                f"at t={t} (tolerance {tol})"
            )


def error_augmented_matrix(model: DynamicsModel, x, x_d) -> np.ndarray:
    """P_e(x) = [f(x) - f(x_d) | g(x)], shape m x (n+1)."""
    x = _as_state(model, x)
    x_d = _as_state(model, x_d)
    out = np.empty((model.state_dim, model.input_dim + 1))
    out[:, 0] = eval_drift(model, x) - eval_drift(model, x_d)
    out[:, 1:] = eval_input_matrix(model, x)
    return out


def tracking_control_error_part(
    model: DynamicsModel, cfg: CostConfig, x, x_d
) -> ControlDecision:
    """Closed-form u_e* on the error system; same algebra as regulation.

    With x_d = 0 this reproduces :func:`regulation_control` exactly
    (f(0) = 0 makes P_e = P and e = x).
    """
    _check_cfg_dims(model, cfg)
    x = _as_state(model, x)
    x_d = _as_state(model, x_d)
    e = x - x_d
    fe = eval_drift(model, x) - eval_drift(model, x_d)
    gx = eval_input_matrix(model, x)
    pte = np.empty(model.input_dim + 1)
    pte[0] = fe @ e
    pte[1:] = gx.T @ e
    return _closed_form_decision(pte, float(e @ cfg.Q0 @ e), cfg, e)


def _checked_pinv(gx: np.ndarray) -> np.ndarray:
    """SVD pseudoinverse; rank-deficient matrices (at the 1e-10 relative
    singular-value cutoff) raise instead of silently projecting."""
    u, s, vt = np.linalg.svd(gx, full_matrices=False)
    if s[0] == 0.0 or s[-1] <= _PINV_RCOND * s[0]:
        raise IllPosedFeedforwardError(
            f"input matrix effectively rank deficient (singular values {s})"
        )
    return (vt.T * (1.0 / s)) @ u.T


def feedforward(model: DynamicsModel, x, x_d, x_d_dot) -> np.ndarray:
    """tau_d = g(x)^+ [xdot_d - f(x_d)], the reference-following input.

    The pseudoinverse is the SVD one with singular values below
    1e-10 * sigma_max treated as zero; a matrix that is rank deficient at
    that tolerance raises :class:`IllPosedFeedforwardError`.
    """
    x = _as_state(model, x)
    x_d = _as_state(model, x_d)
    x_d_dot = np.asarray(x_d_dot, dtype=float)
    gx = eval_input_matrix(model, x)
    return _checked_pinv(gx) @ (x_d_dot - eval_drift(model, x_d))


def feedforward_residual(model: DynamicsModel, x, x_d, x_d_dot) -> float:
    """Norm of the component of xdot_d - f(x_d) outside range(g(x)).

    Zero for exactly trackable references; positive values quantify how
    infeasible the reference is at this state.
    """
    x = _as_state(model, x)
    x_d = _as_state(model, x_d)
    v = np.asarray(x_d_dot, dtype=float) - eval_drift(model, x_d)
    gx = eval_input_matrix(model, x)
    return float(np.linalg.norm(v - gx @ (_checked_pinv(gx) @ v)))


def tracking_control(
    model: DynamicsModel, cfg: CostConfig, x, ref: ReferenceTrajectory, t: float
) -> np.ndarray:
    """Total tracking input tau*(t) = D u_e* + tau_d at time t.

    Inside the error deadzone (perfect tracking) only the feedforward is
    applied, which is the continuous limit of the sum.
    """
    x_d = np.asarray(ref.x_d(t), dtype=float)
    x_d_dot = np.asarray(ref.x_d_dot(t), dtype=float)
    decision = tracking_control_error_part(model, cfg, x, x_d)
    return decision.tau + feedforward(model, x, x_d, x_d_dot)
