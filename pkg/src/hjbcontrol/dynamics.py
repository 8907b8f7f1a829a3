"""Input-affine plant models and their augmented drift-free form.

A plant is

    xdot = f(x) + g(x) tau,          f(0) = 0,

with state x in R^m and input tau in R^n. Stacking the drift next to the
input matrix gives the augmented form

    xdot = P(x) u,    P(x) = [f(x) | g(x)],    u = [1, tau],

which is what the closed-form controllers in :mod:`hjbcontrol.regulation`
and :mod:`hjbcontrol.tracking` operate on.

Three benchmark plants are built in (ids ``"I"``, ``"II"``, ``"III"``):

* ``I``   - two-state system with a cosine-modulated scalar input gain.
* ``II``  - two-state system whose drift contains ``cos(1/(x2 + lambda2))``;
  the drift is singular on the surface ``x2 = -lambda2``. The four lambda
  coefficients are free parameters with two named presets.
* ``III`` - two-state system with two control channels plus a disturbance
  channel; the disturbance is folded into the input as a third column of g,
  so n = 3 and tau = (u1, u2, d).

Models are immutable after construction and evaluation is pure, so a model
may be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import ConfigurationError, DimensionError, NumericalDomainError

__all__ = [
    "DynamicsModel",
    "ExampleIIParams",
    "EXAMPLE_II_CASE_1",
    "EXAMPLE_II_CASE_2",
    "eval_drift",
    "eval_input_matrix",
    "augmented_matrix",
    "gram",
    "builtin_example",
]


@dataclass(frozen=True)
class DynamicsModel:
    """An input-affine plant xdot = f(x) + g(x) tau.

    ``drift`` maps a length-m state to the length-m vector f(x) and
    ``input_matrix`` maps it to the m x n matrix g(x). Both must accept a
    1-D float ndarray. The equilibrium convention f(0) = 0 is assumed by
    the controllers built on top.
    """

    name: str
    state_dim: int
    input_dim: int
    drift: Callable[[np.ndarray], np.ndarray]
    input_matrix: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ExampleIIParams:
    """Drift coefficients for benchmark plant II.

    ``lambda2`` must be nonzero so the singular surface x2 = -lambda2 stays
    isolated from the origin.
    """

    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float

    def __post_init__(self):
        if self.lambda2 == 0.0:
            raise ConfigurationError("lambda2 must be nonzero")


EXAMPLE_II_CASE_1 = ExampleIIParams(-1.0, -100.0, 0.0, -100.0)
EXAMPLE_II_CASE_2 = ExampleIIParams(-0.2, 100.0, 1.0, -1.0)

# Evaluations closer to the singular surface than this raise instead of
# returning a huge value.
_SINGULAR_SURFACE_TOL = 1e-12


def _as_state(model: DynamicsModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.state_dim,):
        raise DimensionError(
            f"state for model '{model.name}' must have shape "
            f"({model.state_dim},), got {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise NumericalDomainError(f"non-finite state {x!r}")
    return x


def eval_drift(model: DynamicsModel, x) -> np.ndarray:
    """Evaluate f(x), validating shapes and finiteness."""
    x = _as_state(model, x)
    fx = np.asarray(model.drift(x), dtype=float)
    if fx.shape != (model.state_dim,):
        raise DimensionError(
            f"drift of '{model.name}' returned shape {fx.shape}, "
            f"expected ({model.state_dim},)"
        )
    if not np.all(np.isfinite(fx)):
        raise NumericalDomainError(f"drift of '{model.name}' non-finite at x={x!r}")
    return fx


def eval_input_matrix(model: DynamicsModel, x) -> np.ndarray:
    """Evaluate g(x), validating shapes and finiteness."""
    x = _as_state(model, x)
    gx = np.asarray(model.input_matrix(x), dtype=float)
    if gx.shape != (model.state_dim, model.input_dim):
        raise DimensionError(
            f"input matrix of '{model.name}' returned shape {gx.shape}, "
            f"expected ({model.state_dim}, {model.input_dim})"
        )
    if not np.all(np.isfinite(gx)):
        raise NumericalDomainError(
            f"input matrix of '{model.name}' non-finite at x={x!r}"
        )
    return gx


def augmented_matrix(model: DynamicsModel, x) -> np.ndarray:
    """Return P(x) = [f(x) | g(x)], shape m x (n+1)."""
    x = _as_state(model, x)
    out = np.empty((model.state_dim, model.input_dim + 1))
    out[:, 0] = eval_drift(model, x)
    out[:, 1:] = eval_input_matrix(model, x)
    return out


def gram(model: DynamicsModel, x) -> np.ndarray:
    """Return P(x) P(x)^T = f f^T + g g^T (symmetric PSD, m x m)."""
    p = augmented_matrix(model, x)
    return p @ p.T


def builtin_example(example_id: str, params: ExampleIIParams | None = None) -> DynamicsModel:
    """Construct one of the built-in benchmark plants.

    Parameters
    ----------
    example_id : {"I", "II", "III"}
        Which benchmark plant to build.
    params : ExampleIIParams, optional
        Drift coefficients; required for plant II and rejected otherwise.
        Use :data:`EXAMPLE_II_CASE_1` / :data:`EXAMPLE_II_CASE_2` for the
        standard presets.
    """
    if example_id == "I":
        if params is not None:
            raise ConfigurationError("plant I takes no parameters")

        def drift(x):
            c = math.cos(2.0 * x[0]) + 2.0
            return np.array([
                -x[0] + x[1],
                -0.5 * x[0] - 0.5 * x[1] * (1.0 - c * c),
            ])

        def input_matrix(x):
            return np.array([[0.0], [math.cos(2.0 * x[0]) + 2.0]])

        return DynamicsModel("I", 2, 1, drift, input_matrix)

    if example_id == "II":
        if params is None:
            raise ConfigurationError("plant II requires ExampleIIParams")
        l1, l2, l3, l4 = params.lambda1, params.lambda2, params.lambda3, params.lambda4

        def drift(x):
            denom = x[1] + l2
            if abs(denom) < _SINGULAR_SURFACE_TOL:
                raise NumericalDomainError(
                    f"plant II drift singular at x2 = {x[1]!r} (x2 + lambda2 ~ 0)"
                )
            return np.array([
                x[1] + l1 * x[0] * math.cos(1.0 / denom)
                + l3 * x[1] * math.sin(l4 * x[0] * x[1]),
                0.0,
            ])

        def input_matrix(x):
            return np.array([[0.0], [1.0]])

        return DynamicsModel("II", 2, 1, drift, input_matrix)

    if example_id == "III":
        if params is not None:
            raise ConfigurationError("plant III takes no parameters")

        def drift(x):
            x1, x2 = x[0], x[1]
            return np.array([
                -(29.0 * x1 + 87.0 * x1 * x2 * x2) / 8.0
                - (2.0 * x2 + 3.0 * x2 * x1 * x1) / 4.0,
                -(x1 + 3.0 * x1 * x2 * x2) / 4.0,
            ])

        def input_matrix(x):
            return np.array([[1.0, 0.0, 0.5], [0.0, 3.0, 1.0]])

        return DynamicsModel("III", 2, 3, drift, input_matrix)

    raise ConfigurationError(f"unknown benchmark plant id {example_id!r}")
