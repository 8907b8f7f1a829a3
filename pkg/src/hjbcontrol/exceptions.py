"""Exception hierarchy for hjbcontrol.

All library errors derive from :class:`HJBControlError` so callers can catch
one base class. Usage errors (bad shapes, bad configuration) and numerical
errors (domain singularities, integration blowups, inadmissible penalties)
are kept distinct because they call for different fixes.
"""


class HJBControlError(Exception):
    """Base class for all hjbcontrol errors."""


class DimensionError(HJBControlError, ValueError):
    """A vector or matrix does not have the shape the model declares."""


class ConfigurationError(HJBControlError, ValueError):
    """Invalid controller or integrator configuration (e.g. R not SPD)."""


class NumericalDomainError(HJBControlError, ArithmeticError):
    """Dynamics evaluated at (or too close to) a singular point."""


class GammaAdmissibilityError(HJBControlError, ArithmeticError):
    """State penalty Q(x) negative beyond tolerance at some state.

    The offending state is kept on the ``state`` attribute so callers can
    report where the gamma condition was violated.
    """

    def __init__(self, message, state):
        super().__init__(message)
        self.state = state


class DegenerateStateError(HJBControlError, ArithmeticError):
    """Quantity undefined inside the ||P^T x|| deadzone."""


class IntegrationBlowupError(HJBControlError, ArithmeticError):
    """A simulation produced a non-finite or unbounded state.

    Carries the simulation time at which the blowup was detected.
    """

    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


class IllPosedFeedforwardError(HJBControlError, ArithmeticError):
    """Input matrix too close to rank deficient for feedforward inversion."""
