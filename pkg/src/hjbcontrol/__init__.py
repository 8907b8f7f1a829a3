"""Closed-form HJB optimal control for input-affine systems.

The library provides:

* :mod:`hjbcontrol.dynamics` - input-affine plants, their augmented
  drift-free form, and three built-in benchmark systems;
* :mod:`hjbcontrol.regulation` - the closed-form optimal regulation law
  and its admissibility / consistency diagnostics;
* :mod:`hjbcontrol.tracking` - the tracking variant with pseudoinverse
  feedforward;
* :mod:`hjbcontrol.simulate` - fixed-step closed-loop simulation and
  Lyapunov diagnostics;
* :mod:`hjbcontrol.metrics` - ITSE, cumulative cost, convergence time and
  comparison tables;
* :mod:`hjbcontrol.sola` - a single-approximator adaptive-critic baseline;
* :mod:`hjbcontrol.scenarios` - the standard benchmark setups;
* :mod:`hjbcontrol.cli` - the ``hjbcontrol`` command-line front end.
"""

from .dynamics import (
    EXAMPLE_II_CASE_1,
    EXAMPLE_II_CASE_2,
    DynamicsModel,
    ExampleIIParams,
    augmented_matrix,
    builtin_example,
    eval_drift,
    eval_input_matrix,
    gram,
)
from .exceptions import (
    ConfigurationError,
    DegenerateStateError,
    DimensionError,
    GammaAdmissibilityError,
    HJBControlError,
    IllPosedFeedforwardError,
    IntegrationBlowupError,
    NumericalDomainError,
)
from .metrics import (
    MetricsReport,
    comparison_table,
    convergence_time,
    cumulative_cost,
    itse,
    median_wall_clock,
    render_table,
    report_from_run,
    wall_clock,
    wall_clock_to_threshold,
)
from .regulation import (
    ControlDecision,
    CostConfig,
    GammaGridReport,
    gamma_lower_bound,
    hjb_residual,
    psi_direction,
    regulation_control,
    regulation_law,
    state_penalty,
    verify_gamma_over_grid,
)
from .simulate import (
    IntegratorConfig,
    Trajectory,
    euler_step,
    lyapunov_series,
    rk4_step,
    simulate_closed_loop,
    simulate_regulation,
    simulate_tracking,
)
from .sola import (
    BasisSet,
    CriticWeights,
    SolaConfig,
    builtin_basis,
    builtin_sola_config,
    eval_basis,
    eval_basis_gradient,
    simulate_sola,
    sola_control,
    sola_weight_update,
)
from .tracking import (
    ReferenceTrajectory,
    error_augmented_matrix,
    feasible_sinusoid_reference,
    feedforward,
    feedforward_residual,
    sinusoid_reference,
    tracking_control,
    tracking_control_error_part,
    zero_reference,
)

__version__ = "0.1.0"
