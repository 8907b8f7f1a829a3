"""Fixed-step closed-loop simulation and Lyapunov diagnostics.

The integrator is deliberately plain: classical RK4 (or explicit Euler) on
a uniform grid, with the feedback law re-evaluated at every integration
stage so the continuous-time control law is honored rather than held over
the step. Identical inputs produce bitwise-identical trajectories.

Runs that leave the guard ball ||x|| > 1e6 or produce non-finite stages
are truncated and returned with ``diverged=True`` instead of raising, so
callers can still compute metrics on the prefix and report the run as not
converged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import DynamicsModel, _as_state
from .exceptions import ConfigurationError, IntegrationBlowupError
from .regulation import (
    CostConfig,
    _check_cfg_dims,
    _closed_form_decision,
    _regulation_decision_fast,
)
from .tracking import (
    ReferenceTrajectory,
    _checked_pinv,
    check_reference_consistency,
    feedforward_residual,
)

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "rk4_step",
    "euler_step",
    "simulate_closed_loop",
    "simulate_regulation",
    "simulate_tracking",
    "lyapunov_series",
]

BLOWUP_NORM = 1e6


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, horizon and method for a fixed-step run.

    horizon_T must be an integer number of steps (up to rounding slack of
    about one part in 1e9).
    """

    dt: float
    horizon_T: float
    method: str = "rk4"

    def __post_init__(self):
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if not (self.horizon_T > self.dt):
            raise ConfigurationError("horizon_T must exceed dt")
        if self.method not in ("rk4", "euler"):
            raise ConfigurationError(f"unknown method {self.method!r}")
        n = round(self.horizon_T / self.dt)
        if n < 1 or abs(n * self.dt - self.horizon_T) > 1e-9 * max(1.0, self.horizon_T):
            raise ConfigurationError(
                f"horizon_T={self.horizon_T} is not an integer multiple of dt={self.dt}"
            )

    @property
    def n_steps(self) -> int:
        return round(self.horizon_T / self.dt)


@dataclass
class Trajectory:
    """Record of one closed-loop run on a uniform time grid.

    ``states`` is (K+1, m), ``controls`` (K+1, n) holds the feedback
    evaluated at each sample point, ``stage_costs`` the per-sample stage
    cost (zero when the run supplied none). Tracking runs also carry
    ``errors`` = x - x_d. ``diverged`` marks truncated blowup runs.
    """

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    stage_costs: np.ndarray
    meta: dict = field(default_factory=dict)
    errors: np.ndarray | None = None
    diverged: bool = False


def rk4_step(deriv, t: float, x: np.ndarray, dt: float) -> np.ndarray:
    """One classical 4th-order Runge-Kutta step of xdot = deriv(t, x).

    Raises :class:`IntegrationBlowupError` (stamped with the stage time)
    if any stage derivative is non-finite.
    """
    half = 0.5 * dt
    k1 = deriv(t, x)
    if not np.all(np.isfinite(k1)):
        raise IntegrationBlowupError(f"non-finite derivative at t={t}", time=t)
    k2 = deriv(t + half, x + half * k1)
    if not np.all(np.isfinite(k2)):
        raise IntegrationBlowupError(f"non-finite derivative at t={t + half}", time=t + half)
    k3 = deriv(t + half, x + half * k2)
    if not np.all(np.isfinite(k3)):
        raise IntegrationBlowupError(f"non-finite derivative at t={t + half}", time=t + half)
    k4 = deriv(t + dt, x + dt * k3)
    if not np.all(np.isfinite(k4)):
        raise IntegrationBlowupError(f"non-finite derivative at t={t + dt}", time=t + dt)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def euler_step(deriv, t: float, x: np.ndarray, dt: float) -> np.ndarray:
    """One explicit Euler step."""
    k = deriv(t, x)
    if not np.all(np.isfinite(k)):
        raise IntegrationBlowupError(f"non-finite derivative at t={t}", time=t)
    return x + dt * k


def simulate_closed_loop(
    model: DynamicsModel,
    controller,
    x0,
    icfg: IntegratorConfig,
    stage_cost=None,
    meta: dict | None = None,
) -> Trajectory:
    """Integrate xdot = f(x) + g(x) controller(t, x) over the horizon.

    ``controller`` maps (t, x) to the length-n input; it is re-evaluated at
    every integration stage. ``stage_cost``, when given, maps
    (t, x, tau) to a scalar recorded alongside each sample. Controller
    exceptions propagate; blowups truncate the trajectory (see module
    docstring).
    """
    x = _as_state(model, x0)
    n_steps = icfg.n_steps
    dt = icfg.dt
    half = 0.5 * dt
    use_rk4 = icfg.method == "rk4"
    drift = model.drift
    gmat = model.input_matrix

    times = np.arange(n_steps + 1) * dt
    states = np.empty((n_steps + 1, model.state_dim))
    controls = np.empty((n_steps + 1, model.input_dim))
    costs = np.zeros(n_steps + 1)
    states[0] = x

    base_meta = {"model": model.name, "dt": dt, "horizon_T": icfg.horizon_T,
                 "method": icfg.method}
    if meta:
        base_meta.update(meta)

    diverged = False
    k = 0
    # overflow while a run is in the middle of diverging is expected and
    # handled by the guards below; keep numpy quiet about it
    saved_err = np.seterr(over="ignore", invalid="ignore")
    try:
        for k in range(n_steps):
            t = times[k]
            tau = controller(t, x)
            controls[k] = tau
            if stage_cost is not None:
                costs[k] = stage_cost(t, x, tau)
            try:
                # classical RK4 with the feedback re-evaluated at each
                # stage; stage 1 reuses the control just recorded
                k1 = drift(x) + gmat(x) @ tau
                if not np.all(np.isfinite(k1)):
                    raise IntegrationBlowupError(
                        f"non-finite derivative at t={t}", time=t)
                if use_rk4:
                    xa = x + half * k1
                    k2 = drift(xa) + gmat(xa) @ controller(t + half, xa)
                    if not np.all(np.isfinite(k2)):
                        raise IntegrationBlowupError(
                            f"non-finite derivative at t={t + half}", time=t + half)
                    xb = x + half * k2
                    k3 = drift(xb) + gmat(xb) @ controller(t + half, xb)
                    if not np.all(np.isfinite(k3)):
                        raise IntegrationBlowupError(
                            f"non-finite derivative at t={t + half}", time=t + half)
                    xc = x + dt * k3
                    k4 = drift(xc) + gmat(xc) @ controller(t + dt, xc)
                    if not np.all(np.isfinite(k4)):
                        raise IntegrationBlowupError(
                            f"non-finite derivative at t={t + dt}", time=t + dt)
                    x_next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                else:
                    x_next = x + dt * k1
            except IntegrationBlowupError as err:
                base_meta["blowup_time"] = err.time
                diverged = True
                break
            if not np.all(np.isfinite(x_next)) or float(x_next @ x_next) > BLOWUP_NORM**2:
                base_meta["blowup_time"] = times[k + 1]
                diverged = True
                break
            x = x_next
            states[k + 1] = x
    finally:
        np.seterr(**saved_err)

    if not diverged:
        t_end = times[n_steps]
        tau = controller(t_end, x)
        controls[n_steps] = tau
        if stage_cost is not None:
            costs[n_steps] = stage_cost(t_end, x, tau)
        return Trajectory(times, states, controls, costs, base_meta)

    # blowup path: keep samples up to and including the last finite state
    last = k + 1
    return Trajectory(
        times[:last], states[:last], controls[:last], costs[:last],
        base_meta, diverged=True,
    )


def simulate_regulation(
    model: DynamicsModel, cfg: CostConfig, x0, icfg: IntegratorConfig
) -> Trajectory:
    """Closed-loop run under the closed-form regulation law.

    Records the stage cost l(x, u*) = (Q(x) + u*' R u*) / 2 at each sample.
    """
    _check_cfg_dims(model, cfg)
    last = [None, None]  # (state object, decision) seen by the controller

    def controller(t, x):
        dec = _regulation_decision_fast(model, cfg, x)
        last[0], last[1] = x, dec
        return dec.tau

    def stage_cost(t, x, tau):
        dec = last[1] if last[0] is x else _regulation_decision_fast(model, cfg, x)
        return 0.5 * (dec.state_penalty + float(dec.u_aug @ cfg.R @ dec.u_aug))

    meta = {
        "controller": "closed-form-regulation",
        "gamma": cfg.gamma,
        "deadzone_eps": cfg.deadzone_eps,
        "Q0": cfg.Q0.tolist(),
        "R": cfg.R.tolist(),
    }
    return simulate_closed_loop(model, controller, x0, icfg, stage_cost, meta)


def simulate_tracking(
    model: DynamicsModel,
    cfg: CostConfig,
    ref: ReferenceTrajectory,
    x0,
    icfg: IntegratorConfig,
) -> Trajectory:
    """Closed-loop tracking run; also records e(t) and a feasibility gauge.

    The reference derivative is spot-checked against a central difference
    at a handful of horizon times before the run starts. The largest
    feedforward residual seen along the trajectory is stored in
    ``meta["max_feedforward_residual"]``; values well above zero mean the
    reference was not exactly trackable.
    """
    _check_cfg_dims(model, cfg)
    spot_times = np.linspace(0.1 * icfg.horizon_T, 0.9 * icfg.horizon_T, 5)
    check_reference_consistency(ref, spot_times)

    residual_peak = [0.0]
    drift = model.drift
    gmat = model.input_matrix
    n_aug = model.input_dim + 1

    def error_decision(x, x_d):
        # same arithmetic as tracking_control_error_part, hot-loop variant
        e = x - x_d
        fe = drift(x) - drift(x_d)
        gx = gmat(x)
        pte = np.empty(n_aug)
        pte[0] = fe @ e
        pte[1:] = gx.T @ e
        return _closed_form_decision(pte, float(e @ cfg.Q0 @ e), cfg, e), gx

    last = [None, None]

    def controller(t, x):
        x_d = np.asarray(ref.x_d(t), dtype=float)
        x_d_dot = np.asarray(ref.x_d_dot(t), dtype=float)
        dec, gx = error_decision(x, x_d)
        last[0], last[1] = x, dec
        return dec.tau + _checked_pinv(gx) @ (x_d_dot - drift(x_d))

    def stage_cost(t, x, tau):
        if last[0] is x:
            dec = last[1]
        else:
            dec, _ = error_decision(x, np.asarray(ref.x_d(t), dtype=float))
        x_d = np.asarray(ref.x_d(t), dtype=float)
        r = feedforward_residual(model, x, x_d, ref.x_d_dot(t))
        if r > residual_peak[0]:
            residual_peak[0] = r
        return 0.5 * (dec.state_penalty + float(dec.u_aug @ cfg.R @ dec.u_aug))

    meta = {
        "controller": "closed-form-tracking",
        "reference": ref.name,
        "gamma": cfg.gamma,
        "deadzone_eps": cfg.deadzone_eps,
        "Q0": cfg.Q0.tolist(),
        "R": cfg.R.tolist(),
    }
    traj = simulate_closed_loop(model, controller, x0, icfg, stage_cost, meta)
    traj.errors = traj.states - np.array([ref.x_d(t) for t in traj.times])
    traj.meta["max_feedforward_residual"] = residual_peak[0]
    return traj


def lyapunov_series(traj: Trajectory):
    """V_k = ||x_k||^2 / 2 and its forward difference quotient.

    Returns (V, dV) with len(dV) = len(V) - 1;
    dV_k = (V_{k+1} - V_k) / dt.
    """
    if len(traj.times) == 0:
        raise ConfigurationError("empty trajectory")
    V = 0.5 * np.sum(traj.states**2, axis=1)
    if len(traj.times) < 2:
        return V, np.empty(0)
    dt = traj.times[1] - traj.times[0]
    return V, np.diff(V) / dt
