"""Closed-form optimal regulation for input-affine plants.

For the augmented system xdot = P(x) u with stage cost
l(x, u) = (Q(x) + u' R u) / 2 and state penalty

    Q(x) = x' [Q0 + gamma * P(x) P(x)'] x,

the optimal augmented input admits the closed form

    u*(x) = -R^{-1/2} psi(x) sqrt(Q(x)),
    psi(x) = P(x)' x / ||P(x)' x||,

and the physical input is extracted with D = [0_{n x 1} | I_n]:

    tau*(x) = D u*(x)        (the last n components of u*).

The direction psi makes the Lyapunov derivative of V = x'x / 2 negative
whenever ||P' x|| > 0, and the law satisfies the pointwise closure identity
u*' R u* = Q(x), which is the cheap test for consistency with the
underlying optimality equation.

Where ||P' x|| falls below a small deadzone threshold the direction is
undefined; the controller then outputs zero (the unique continuous
completion at the origin) and flags the decision as degenerate.

Admissibility: Q(x) >= 0 requires gamma >= -x'Q0x / ||P'x||^2 over the
operating region. :func:`gamma_lower_bound` evaluates that bound pointwise
and :func:`verify_gamma_over_grid` sweeps it over a box.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import math

import numpy as np

from .dynamics import DynamicsModel, augmented_matrix, eval_drift, eval_input_matrix, _as_state
from .exceptions import (
    ConfigurationError,
    DegenerateStateError,
    DimensionError,
    GammaAdmissibilityError,
)

__all__ = [
    "CostConfig",
    "ControlDecision",
    "GammaGridReport",
    "state_penalty",
    "psi_direction",
    "regulation_control",
    "regulation_law",
    "gamma_lower_bound",
    "verify_gamma_over_grid",
    "hjb_residual",
]

# Q(x) in [-PENALTY_CLAMP_TOL, 0) is treated as floating-point dust and
# clamped to zero; anything below is a real admissibility violation.
PENALTY_CLAMP_TOL = 1e-12


def _symmetric_root_pair(R: np.ndarray):
    """Principal SPD square root of R and its inverse, via eigendecomposition."""
    w, V = np.linalg.eigh(R)
    if w.min() <= 0.0:
        raise ConfigurationError(
            f"R must be symmetric positive definite; eigenvalues {w}"
        )
    sq = (V * np.sqrt(w)) @ V.T
    inv_sq = (V * (1.0 / np.sqrt(w))) @ V.T
    return sq, inv_sq


@dataclass
class CostConfig:
    """Stage-cost and controller parameters.

    Q0 is a symmetric m x m state weight, R a symmetric positive-definite
    (n+1) x (n+1) weight on the augmented input, gamma scales the
    P P' penalty term, and deadzone_eps is the threshold on ||P' x|| below
    which the control direction is treated as degenerate.

    The symmetric square root R^{1/2} and its inverse are computed once at
    construction; instances are treated as immutable.
    """

    Q0: np.ndarray
    R: np.ndarray
    gamma: float
    deadzone_eps: float = 1e-10
    R_sqrt: np.ndarray = field(init=False, repr=False)
    R_inv_sqrt: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        Q0 = np.atleast_2d(np.asarray(self.Q0, dtype=float))
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        if Q0.shape[0] != Q0.shape[1]:
            raise ConfigurationError(f"Q0 must be square, got {Q0.shape}")
        if not np.allclose(Q0, Q0.T, rtol=0.0, atol=1e-12):
            raise ConfigurationError("Q0 must be symmetric")
        if R.shape[0] != R.shape[1]:
            raise ConfigurationError(f"R must be square, got {R.shape}")
        if not np.allclose(R, R.T, rtol=0.0, atol=1e-12):
            raise ConfigurationError("R must be symmetric")
        if not self.deadzone_eps > 0.0:
            raise ConfigurationError("deadzone_eps must be positive")
        self.Q0 = Q0
        self.R = R
        self.gamma = float(self.gamma)
        self.R_sqrt, self.R_inv_sqrt = _symmetric_root_pair(R)
        for arr in (self.Q0, self.R, self.R_sqrt, self.R_inv_sqrt):
            arr.setflags(write=False)

    @classmethod
    def identity(cls, model: DynamicsModel, gamma: float, deadzone_eps: float = 1e-10):
        """Q0 = I_m, R = I_{n+1} for the given model."""
        return cls(
            Q0=np.eye(model.state_dim),
            R=np.eye(model.input_dim + 1),
            gamma=gamma,
            deadzone_eps=deadzone_eps,
        )


@dataclass(frozen=True)
class ControlDecision:
    """One evaluation of the closed-form law.

    ``u_aug`` is the augmented input (n+1), ``tau`` the extracted physical
    input (n), ``degenerate`` marks deadzone states (then both are zero),
    and ``state_penalty`` is the value of Q at the evaluation point.
    """

    u_aug: np.ndarray
    tau: np.ndarray
    degenerate: bool
    state_penalty: float


def _check_cfg_dims(model: DynamicsModel, cfg: CostConfig):
    if cfg.Q0.shape != (model.state_dim, model.state_dim):
        raise DimensionError(
            f"Q0 shape {cfg.Q0.shape} does not match state dim {model.state_dim}"
        )
    if cfg.R.shape != (model.input_dim + 1, model.input_dim + 1):
        raise DimensionError(
            f"R shape {cfg.R.shape} does not match augmented input dim "
            f"{model.input_dim + 1}"
        )


def _penalty_from_parts(q0_term: float, pt_norm_sq: float, gamma: float, z) -> float:
    """Q = z'Q0z + gamma ||P'z||^2, clamped or rejected when negative."""
    q = q0_term + gamma * pt_norm_sq
    if q < 0.0:
        if q < -PENALTY_CLAMP_TOL:
            raise GammaAdmissibilityError(
                f"state penalty {q!r} negative at z={np.asarray(z)!r}; "
                "gamma violates the admissibility bound there",
                state=np.array(z, dtype=float),
            )
        q = 0.0
    return q


def _closed_form_decision(ptz: np.ndarray, q0_term: float, cfg: CostConfig, z) -> ControlDecision:
    """Shared core of the regulation and tracking laws.

    ``ptz`` is P' z (or P_e' e) and ``q0_term`` is z' Q0 z. Kept in one
    place so that tracking with a zero reference reproduces regulation
    arithmetic exactly.
    """
    n_aug = ptz.shape[0]
    nrm_sq = float(ptz @ ptz)
    nrm = math.sqrt(nrm_sq)
    if nrm <= cfg.deadzone_eps:
        q = _penalty_from_parts(q0_term, nrm_sq, cfg.gamma, z)
        return ControlDecision(
            u_aug=np.zeros(n_aug), tau=np.zeros(n_aug - 1),
            degenerate=True, state_penalty=q,
        )
    q = _penalty_from_parts(q0_term, nrm_sq, cfg.gamma, z)
    u = cfg.R_inv_sqrt @ (ptz * (-math.sqrt(q) / nrm))
    return ControlDecision(u_aug=u, tau=u[1:], degenerate=False, state_penalty=q)


def state_penalty(model: DynamicsModel, cfg: CostConfig, x) -> float:
    """Q(x) = x'[Q0 + gamma P P']x, evaluated as x'Q0x + gamma ||P'x||^2.

    Values in [-1e-12, 0) are clamped to zero; anything lower raises
    :class:`GammaAdmissibilityError` carrying the offending state.
    """
    _check_cfg_dims(model, cfg)
    x = _as_state(model, x)
    ptx = augmented_matrix(model, x).T @ x
    return _penalty_from_parts(float(x @ cfg.Q0 @ x), float(ptx @ ptx), cfg.gamma, x)


def psi_direction(P: np.ndarray, x, eps: float = 1e-10):
    """Unit direction P'x / ||P'x||, or None inside the deadzone."""
    x = np.asarray(x, dtype=float)
    ptx = P.T @ x
    nrm = float(np.linalg.norm(ptx))
    if nrm <= eps:
        return None
    return ptx / nrm


def _regulation_decision_fast(model: DynamicsModel, cfg: CostConfig, x) -> ControlDecision:
    """Hot-loop variant of :func:`regulation_control`: same arithmetic, no
    per-call shape or finiteness validation."""
    fx = model.drift(x)
    gx = model.input_matrix(x)
    ptx = np.empty(model.input_dim + 1)
    ptx[0] = fx @ x
    ptx[1:] = gx.T @ x
    return _closed_form_decision(ptx, float(x @ cfg.Q0 @ x), cfg, x)


def regulation_control(model: DynamicsModel, cfg: CostConfig, x) -> ControlDecision:
    """Evaluate tau*(x) = D u*(x) with u* = -R^{-1/2} psi sqrt(Q(x))."""
    _check_cfg_dims(model, cfg)
    x = _as_state(model, x)
    fx = eval_drift(model, x)
    gx = eval_input_matrix(model, x)
    ptx = np.empty(model.input_dim + 1)
    ptx[0] = fx @ x
    ptx[1:] = gx.T @ x
    return _closed_form_decision(ptx, float(x @ cfg.Q0 @ x), cfg, x)


def regulation_law(model: DynamicsModel, cfg: CostConfig):
    """Bind (model, cfg) into a feedback callable ``tau(t, x)`` for simulation."""
    _check_cfg_dims(model, cfg)

    def law(t, x):
        return _regulation_decision_fast(model, cfg, x).tau

    return law


def gamma_lower_bound(model: DynamicsModel, cfg: CostConfig, x) -> float:
    """Pointwise admissibility bound -x'Q0x / ||P'x||^2.

    Returns ``math.inf`` as a "no constraint here" sentinel when
    ||P'x|| <= deadzone_eps (the gamma term then cannot rescue or harm the
    penalty at this state).
    """
    _check_cfg_dims(model, cfg)
    x = _as_state(model, x)
    ptx = augmented_matrix(model, x).T @ x
    nrm_sq = float(ptx @ ptx)
    if math.sqrt(nrm_sq) <= cfg.deadzone_eps:
        return math.inf
    return -float(x @ cfg.Q0 @ x) / nrm_sq


@dataclass(frozen=True)
class GammaGridReport:
    """Result of a grid sweep of the state penalty over a box."""

    admissible: bool
    worst_x: np.ndarray
    worst_margin: float


def verify_gamma_over_grid(
    model: DynamicsModel, cfg: CostConfig, box, points_per_axis: int
) -> GammaGridReport:
    """Sweep Q(x) on a uniform grid over an axis-aligned box.

    ``box`` is an (m, 2) array of per-axis [lo, hi]. The configuration is
    admissible when the minimum penalty over the grid is nonnegative (up to
    the usual 1e-12 clamp tolerance); the report carries the argmin either
    way.
    """
    _check_cfg_dims(model, cfg)
    box = np.asarray(box, dtype=float)
    if box.shape != (model.state_dim, 2):
        raise DimensionError(
            f"box must have shape ({model.state_dim}, 2), got {box.shape}"
        )
    if np.any(box[:, 1] < box[:, 0]) or not np.all(np.isfinite(box)):
        raise ConfigurationError("box must be finite with lo <= hi per axis")
    if points_per_axis < 2:
        raise ConfigurationError("points_per_axis must be >= 2")

    axes = [np.linspace(lo, hi, points_per_axis) for lo, hi in box]
    grids = np.meshgrid(*axes, indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)

    worst_margin = math.inf
    worst_x = points[0]
    for x in points:
        ptx = augmented_matrix(model, x).T @ x
        q = float(x @ cfg.Q0 @ x) + cfg.gamma * float(ptx @ ptx)
        if q < worst_margin:
            worst_margin = q
            worst_x = x
    return GammaGridReport(
        admissible=worst_margin >= -PENALTY_CLAMP_TOL,
        worst_x=np.array(worst_x),
        worst_margin=worst_margin,
    )


def hjb_residual(model: DynamicsModel, cfg: CostConfig, x) -> float:
    """Closure residual u*' R u* - Q(x) at a non-degenerate state.

    For the exact law this vanishes up to roundoff; the contract is
    |residual| <= 1e-9 * (1 + Q(x)). Degenerate states have no defined
    residual and raise :class:`DegenerateStateError`.
    """
    decision = regulation_control(model, cfg, x)
    if decision.degenerate:
        raise DegenerateStateError(
            f"residual undefined inside deadzone at x={np.asarray(x)!r}"
        )
    u = decision.u_aug
    return float(u @ cfg.R @ u) - decision.state_penalty
