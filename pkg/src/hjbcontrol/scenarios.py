"""Standard benchmark scenarios: plants, gains, initial states, horizons.

Each benchmark run is identified by a plant id ("I", "II", "III") and,
for plant II only, a case number selecting a drift-parameter preset. The
proposed controller always uses identity weights (Q0 = I_m, R = I_{n+1})
with a per-plant gamma; the baseline gains come from
:func:`hjbcontrol.sola.builtin_sola_config`.

Horizons: plants I and III settle comfortably within 10 s. Plant II has a
slow mode (its case-2 preset crosses the 1e-3 ball only after ~31 s), so
both of its cases run to 40 s by default to make the convergence-time
metric meaningful.
"""

from __future__ import annotations

from .dynamics import (
    EXAMPLE_II_CASE_1,
    EXAMPLE_II_CASE_2,
    DynamicsModel,
    builtin_example,
)
from .exceptions import ConfigurationError
from .regulation import CostConfig
from .simulate import IntegratorConfig, Trajectory, simulate_regulation
from .sola import builtin_basis, builtin_sola_config, simulate_sola

__all__ = [
    "ALL_SCENARIOS",
    "DEFAULT_DT",
    "EXAMPLE_GAMMA",
    "EXAMPLE_HORIZON",
    "EXAMPLE_X0",
    "scenario_model",
    "scenario_cost",
    "scenario_icfg",
    "run_proposed",
    "run_sola",
]

DEFAULT_DT = 1e-3

EXAMPLE_GAMMA = {"I": 1.0, "II": 0.5, "III": 0.1}
EXAMPLE_X0 = {"I": (5.0, -5.0), "II": (2.0, -2.0), "III": (4.0, -4.0)}
EXAMPLE_HORIZON = {"I": 10.0, "II": 40.0, "III": 10.0}

# (example, case) pairs; case applies to plant II only.
ALL_SCENARIOS = (("I", None), ("II", 1), ("II", 2), ("III", None))

_II_CASES = {1: EXAMPLE_II_CASE_1, 2: EXAMPLE_II_CASE_2}


def scenario_model(example: str, case: int | None = None) -> DynamicsModel:
    """Benchmark plant for an (example, case) pair."""
    if example == "II":
        if case is None:
            raise ConfigurationError("plant II requires a case (1 or 2)")
        params = _II_CASES.get(case)
        if params is None:
            raise ConfigurationError(f"unknown plant II case {case!r}")
        return builtin_example("II", params)
    if case is not None:
        raise ConfigurationError(f"plant {example} has no cases")
    return builtin_example(example)


def scenario_cost(
    model: DynamicsModel, example: str, gamma: float | None = None
) -> CostConfig:
    """Identity-weight cost configuration with the per-plant gamma."""
    if gamma is None:
        gamma = EXAMPLE_GAMMA[example]
    return CostConfig.identity(model, gamma=gamma)


def scenario_icfg(
    example: str, dt: float | None = None, horizon_T: float | None = None
) -> IntegratorConfig:
    """Default fixed-step grid for an example (rk4)."""
    return IntegratorConfig(
        dt=DEFAULT_DT if dt is None else dt,
        horizon_T=EXAMPLE_HORIZON[example] if horizon_T is None else horizon_T,
    )


def run_proposed(
    example: str,
    case: int | None = None,
    dt: float | None = None,
    horizon_T: float | None = None,
    gamma: float | None = None,
) -> Trajectory:
    """Closed-form regulation run under the standard scenario."""
    model = scenario_model(example, case)
    cfg = scenario_cost(model, example, gamma)
    icfg = scenario_icfg(example, dt, horizon_T)
    return simulate_regulation(model, cfg, EXAMPLE_X0[example], icfg)


def run_sola(
    example: str,
    case: int | None = None,
    dt: float | None = None,
    horizon_T: float | None = None,
) -> Trajectory:
    """Adaptive-critic baseline run under the standard scenario."""
    model = scenario_model(example, case)
    basis = builtin_basis(example)
    cfg = builtin_sola_config(example)
    icfg = scenario_icfg(example, dt, horizon_T)
    return simulate_sola(model, basis, cfg, EXAMPLE_X0[example], icfg)
