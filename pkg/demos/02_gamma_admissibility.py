"""
Choosing the penalty gain gamma
===============================

The state penalty Q(x) = x'[Q0 + gamma P(x)P(x)']x must stay nonnegative
over the operating region, otherwise the square root in the control law
is undefined. That gives a pointwise lower bound on gamma, and a grid
sweep turns the pointwise bound into a practical go / no-go check.
"""

import numpy as np

from hjbcontrol import (
    CostConfig,
    EXAMPLE_II_CASE_1,
    builtin_example,
    gamma_lower_bound,
    verify_gamma_over_grid,
)

model = builtin_example("II", EXAMPLE_II_CASE_1)

# ----------------------------------------------------------------------
# Pointwise: with a positive-definite Q0 the bound is always negative,
# so any nonnegative gamma works. The bound only bites when Q0 is
# indefinite or zero.
cfg = CostConfig.identity(model, gamma=0.5)
for x in ([2.0, -2.0], [1.0, 4.0], [-3.0, 0.5]):
    print(f"gamma lower bound at {x}: {gamma_lower_bound(model, cfg, x):+.4f}")

# ----------------------------------------------------------------------
# Grid verification over the operating box [-5, 5]^2, 51 points per axis.
box = [[-5.0, 5.0], [-5.0, 5.0]]
report = verify_gamma_over_grid(model, cfg, box, 51)
print(f"\ngamma = {cfg.gamma}: admissible = {report.admissible} "
      f"(worst margin {report.worst_margin:.3g} at {report.worst_x})")

# ----------------------------------------------------------------------
# A deliberately broken configuration: no Q0 backstop and a negative
# gamma. The sweep finds the violation and reports where it is worst.
bad = CostConfig(Q0=np.zeros((2, 2)), R=np.eye(2), gamma=-1.0)
report = verify_gamma_over_grid(model, bad, box, 51)
print(f"gamma = {bad.gamma}, Q0 = 0: admissible = {report.admissible} "
      f"(worst margin {report.worst_margin:.3g} at {report.worst_x})")

# ----------------------------------------------------------------------
# The same check is available from the command line, with exit code 3
# signalling an inadmissible configuration:
#
#   hjbcontrol verify-gamma --example II --case 1 --gamma 0.5
#   hjbcontrol verify-gamma --example II --case 1 --gamma -1 --q0 0
