"""Single-online-approximator (SOLA) adaptive-critic baseline.

The baseline approximates the value function with one linear-in-weights
critic V_hat(x) = w' phi(x) over a fixed basis phi, derives the actor from
it,

    tau = -1/2 R^{-1} g(x)' (grad_phi(x)' w),

and adapts the weights online by normalized gradient descent on the
instantaneous optimality residual

    sigma = grad_phi(x) xdot,
    e_hjb = sigma' w + Q(x) + tau' R tau,
    wdot  = -alpha1 * sigma * e_hjb / (sigma'sigma + 1)^2
            + (alpha2 / 2) * grad_phi(x) g(x) R^{-1} g(x)' x,

where the alpha2 term is the usual state-feedback stabilizer that keeps
the early transient bounded while the critic is still uninformative. This
is a reconstruction of the standard scheme from the adaptive-critic
literature, configured here only as a comparison baseline: its absolute
numbers depend on details the configuration does not fix, so benchmark
comparisons should treat them as indicative. Weights start at zero and no
probing noise is injected.

A run is flagged diverged (and reports as N/C) when the state leaves the
simulation guard ball or the weight norm exceeds 1e6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dynamics import DynamicsModel, _as_state
from .exceptions import ConfigurationError, DimensionError
from .simulate import BLOWUP_NORM, IntegratorConfig, Trajectory

__all__ = [
    "BasisSet",
    "SolaConfig",
    "CriticWeights",
    "builtin_basis",
    "builtin_sola_config",
    "eval_basis",
    "eval_basis_gradient",
    "sola_control",
    "sola_weight_update",
    "simulate_sola",
]


@dataclass(frozen=True)
class BasisSet:
    """Critic features phi: R^m -> R^N and their Jacobian grad_phi (N x m)."""

    size: int
    phi: Callable[[np.ndarray], np.ndarray]
    grad_phi: Callable[[np.ndarray], np.ndarray]
    name: str = "basis"


@dataclass
class SolaConfig:
    """Gains and cost pieces of the critic update.

    ``Q_b`` maps the state to the (nonnegative) state cost used in the
    optimality residual; ``R_b`` is the input weight of the baseline's own
    stage cost. ``weight_init`` defaults to zeros.
    """

    alpha1: float
    alpha2: float
    R_b: np.ndarray
    Q_b: Callable[[np.ndarray], float]
    weight_init: np.ndarray | None = None
    R_b_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        # zero gains are allowed so the critic can be frozen (open-loop runs)
        if self.alpha1 < 0.0 or self.alpha2 < 0.0:
            raise ConfigurationError("alpha1 and alpha2 must be nonnegative")
        R = np.atleast_2d(np.asarray(self.R_b, dtype=float))
        w = np.linalg.eigvalsh(0.5 * (R + R.T))
        if w.min() <= 0.0:
            raise ConfigurationError("R_b must be positive definite")
        self.R_b = R
        self.R_b_inv = np.linalg.inv(R)


@dataclass(frozen=True)
class CriticWeights:
    """Critic weight vector; norm is tracked per step during simulation."""

    w: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.w))


def builtin_basis(example_id: str) -> BasisSet:
    """The 7-term polynomial bases used with the benchmark plants.

    Plants I and II share [x1, x2, x1 x2, x1^2, x2^2, x1^2 cos^2(2 x1),
    x1^3]; plant III swaps the trigonometric term for x1^2 x2^2.
    """
    if example_id in ("I", "II"):

        def phi(x):
            x1, x2 = x[0], x[1]
            c = math.cos(2.0 * x1)
            return np.array([x1, x2, x1 * x2, x1 * x1, x2 * x2,
                             x1 * x1 * c * c, x1**3])

        def grad_phi(x):
            x1, x2 = x[0], x[1]
            c = math.cos(2.0 * x1)
            s = math.sin(2.0 * x1)
            return np.array([
                [1.0, 0.0],
                [0.0, 1.0],
                [x2, x1],
                [2.0 * x1, 0.0],
                [0.0, 2.0 * x2],
                [2.0 * x1 * c * c - 4.0 * x1 * x1 * c * s, 0.0],
                [3.0 * x1 * x1, 0.0],
            ])

        return BasisSet(7, phi, grad_phi, name="poly-cos2")

    if example_id == "III":

        def phi(x):
            x1, x2 = x[0], x[1]
            return np.array([x1, x2, x1 * x2, x1 * x1, x2 * x2,
                             x1 * x1 * x2 * x2, x1**3])

        def grad_phi(x):
            x1, x2 = x[0], x[1]
            return np.array([
                [1.0, 0.0],
                [0.0, 1.0],
                [x2, x1],
                [2.0 * x1, 0.0],
                [0.0, 2.0 * x2],
                [2.0 * x1 * x2 * x2, 2.0 * x1 * x1 * x2],
                [3.0 * x1 * x1, 0.0],
            ])

        return BasisSet(7, phi, grad_phi, name="poly-cross")

    raise ConfigurationError(f"no built-in basis for plant {example_id!r}")


def builtin_sola_config(example_id: str) -> SolaConfig:
    """Baseline gains and costs matched to each benchmark plant.

    Plants I and II: alpha1 = 25, alpha2 = 0.01, Q(x) = x'x, scalar R = 1.
    Plant III: alpha1 = 200, alpha2 = 0.01, R = I_3 over (u1, u2, d), and
    the quartic state cost
    Q(x) = 2 [(2 x1 + 6 x1 x2^2)^2 + (4 x2 + 6 x1^2 x2)^2].
    """
    if example_id in ("I", "II"):
        return SolaConfig(
            alpha1=25.0, alpha2=0.01, R_b=np.eye(1),
            Q_b=lambda x: float(x @ x),
        )
    if example_id == "III":

        def q_quartic(x):
            x1, x2 = x[0], x[1]
            a = 2.0 * x1 + 6.0 * x1 * x2 * x2
            b = 4.0 * x2 + 6.0 * x1 * x1 * x2
            return 2.0 * (a * a + b * b)

        return SolaConfig(alpha1=200.0, alpha2=0.01, R_b=np.eye(3), Q_b=q_quartic)
    raise ConfigurationError(f"no built-in baseline config for plant {example_id!r}")


def eval_basis(basis: BasisSet, x) -> np.ndarray:
    """phi(x) with shape validation."""
    x = np.asarray(x, dtype=float)
    out = np.asarray(basis.phi(x), dtype=float)
    if out.shape != (basis.size,):
        raise DimensionError(
            f"basis '{basis.name}' returned shape {out.shape}, expected ({basis.size},)"
        )
    return out


def eval_basis_gradient(basis: BasisSet, x) -> np.ndarray:
    """grad_phi(x) with shape validation (N x m)."""
    x = np.asarray(x, dtype=float)
    out = np.asarray(basis.grad_phi(x), dtype=float)
    if out.ndim != 2 or out.shape[0] != basis.size or out.shape[1] != len(x):
        raise DimensionError(
            f"basis gradient '{basis.name}' returned shape {out.shape}, "
            f"expected ({basis.size}, {len(x)})"
        )
    return out


def sola_control(model: DynamicsModel, basis: BasisSet, w, R_b, x) -> np.ndarray:
    """Actor tau = -1/2 R^{-1} g' (grad_phi' w); linear in the weights."""
    x = _as_state(model, x)
    w = np.asarray(w, dtype=float)
    R_b = np.atleast_2d(np.asarray(R_b, dtype=float))
    grad_v = eval_basis_gradient(basis, x).T @ w
    return -0.5 * np.linalg.solve(R_b, model.input_matrix(x).T @ grad_v)


def sola_weight_update(
    model: DynamicsModel, basis: BasisSet, w, cfg: SolaConfig, x, dt: float
) -> CriticWeights:
    """One explicit-Euler critic step at state x (see module docstring)."""
    if not dt > 0.0:
        raise ConfigurationError("dt must be positive")
    x = _as_state(model, x)
    w = np.asarray(w, dtype=float)
    gx = model.input_matrix(x)
    grad = eval_basis_gradient(basis, x)
    tau = -0.5 * (cfg.R_b_inv @ (gx.T @ (grad.T @ w)))
    xdot = model.drift(x) + gx @ tau
    sigma = grad @ xdot
    ms = float(sigma @ sigma) + 1.0
    e_hjb = float(sigma @ w) + cfg.Q_b(x) + float(tau @ (cfg.R_b @ tau))
    wdot = (-cfg.alpha1 / (ms * ms)) * sigma * e_hjb
    wdot = wdot + (0.5 * cfg.alpha2) * (grad @ (gx @ (cfg.R_b_inv @ (gx.T @ x))))
    return CriticWeights(w + dt * wdot)


def simulate_sola(
    model: DynamicsModel,
    basis: BasisSet,
    cfg: SolaConfig,
    x0,
    icfg: IntegratorConfig,
) -> Trajectory:
    """Co-integrate plant and critic with the same fixed step.

    Within a step the weights are frozen: the actor is re-evaluated at
    every plant integration stage with the current weights, then one
    critic update is applied at the step's start state. The per-step
    weight norm history lands in ``meta["weight_norms"]`` and the final
    weights in ``meta["final_weights"]``.
    """
    x = _as_state(model, x0)
    n = model.input_dim
    if cfg.R_b.shape != (n, n):
        raise DimensionError(
            f"R_b shape {cfg.R_b.shape} does not match input dim {n}"
        )
    w = (
        np.zeros(basis.size)
        if cfg.weight_init is None
        else np.array(cfg.weight_init, dtype=float)
    )
    if w.shape != (basis.size,):
        raise DimensionError("weight_init length must match basis size")

    dt = icfg.dt
    n_steps = icfg.n_steps
    drift = model.drift
    gmat = model.input_matrix
    grad_phi = basis.grad_phi
    R_inv = cfg.R_b_inv

    times = np.arange(n_steps + 1) * dt
    states = np.empty((n_steps + 1, model.state_dim))
    controls = np.empty((n_steps + 1, n))
    costs = np.zeros(n_steps + 1)
    weight_norms = np.zeros(n_steps + 1)
    states[0] = x

    def actor(xx, ww):
        return -0.5 * (R_inv @ (gmat(xx).T @ (grad_phi(xx).T @ ww)))

    use_rk4 = icfg.method == "rk4"
    half = 0.5 * dt
    diverged = False
    last = n_steps + 1
    # overflow mid-divergence is expected; the guards below catch it
    saved_err = np.seterr(over="ignore", invalid="ignore")
    try:
        for k in range(n_steps):
            tau = actor(x, w)
            controls[k] = tau
            costs[k] = cfg.Q_b(x) + float(tau @ (cfg.R_b @ tau))
            weight_norms[k] = math.sqrt(float(w @ w))

            if use_rk4:
                k1 = drift(x) + gmat(x) @ tau
                xa = x + half * k1
                k2 = drift(xa) + gmat(xa) @ actor(xa, w)
                xb = x + half * k2
                k3 = drift(xb) + gmat(xb) @ actor(xb, w)
                xc = x + dt * k3
                k4 = drift(xc) + gmat(xc) @ actor(xc, w)
                x_next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            else:
                x_next = x + dt * (drift(x) + gmat(x) @ tau)

            grad = grad_phi(x)
            xdot = drift(x) + gmat(x) @ tau
            sigma = grad @ xdot
            ms = float(sigma @ sigma) + 1.0
            e_hjb = float(sigma @ w) + cfg.Q_b(x) + float(tau @ (cfg.R_b @ tau))
            wdot = (-cfg.alpha1 / (ms * ms)) * sigma * e_hjb
            wdot = wdot + (0.5 * cfg.alpha2) * (grad @ (gmat(x) @ (R_inv @ (gmat(x).T @ x))))
            w_next = w + dt * wdot

            bad_state = (
                not np.all(np.isfinite(x_next))
                or float(x_next @ x_next) > BLOWUP_NORM**2
            )
            bad_weights = (
                not np.all(np.isfinite(w_next))
                or float(w_next @ w_next) > BLOWUP_NORM**2
            )
            if bad_state or bad_weights:
                diverged = True
                last = k + 1
                break
            x = x_next
            w = w_next
            states[k + 1] = x
    finally:
        np.seterr(**saved_err)

    if not diverged:
        tau = actor(x, w)
        controls[n_steps] = tau
        costs[n_steps] = cfg.Q_b(x) + float(tau @ (cfg.R_b @ tau))
        weight_norms[n_steps] = math.sqrt(float(w @ w))

    meta = {
        "model": model.name,
        "controller": "sola-critic",
        "dt": dt,
        "horizon_T": icfg.horizon_T,
        "method": icfg.method,
        "alpha1": cfg.alpha1,
        "alpha2": cfg.alpha2,
        "R_b": cfg.R_b.tolist(),
        "basis": basis.name,
        "weight_norms": weight_norms[:last],
        "final_weights": np.array(w),
    }
    return Trajectory(
        times[:last], states[:last], controls[:last], costs[:last],
        meta, diverged=diverged,
    )
