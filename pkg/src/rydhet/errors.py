"""Exception and warning types shared across the package."""


class ContractViolation(ValueError):
    """A closed-form expression was called outside its assumption set."""


class NumericalError(RuntimeError):
    """A linear solve was singular or too ill-conditioned to trust."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class IntegrationError(RuntimeError):
    """Time integration stopped before reaching the requested end time."""

    def __init__(self, message, last_time=None):
        super().__init__(message)
        self.last_time = last_time


class SettlingTimeout(RuntimeError):
    """The trajectory did not settle within the integration horizon."""

    def __init__(self, message, horizon=None):
        super().__init__(message)
        self.horizon = horizon


class ConsistencyError(RuntimeError):
    """A closed-form optimum disagrees with its numerical cross-check."""

    def __init__(self, message, closed_form=None, numerical=None):
        super().__init__(message)
        self.closed_form = closed_form
        self.numerical = numerical


class ObjectiveError(ValueError):
    """An objective returned a non-finite value during a search."""

    def __init__(self, message, delta=None):
        super().__init__(message)
        self.delta = delta


class NonphysicalRangeError(ArithmeticError):
    """Optical depth too large to exponentiate; configuration is nonphysical."""


class NonPerturbativeWarning(UserWarning):
    """Signal field is not small compared with the local field."""


class RegimeWarning(UserWarning):
    """A small-parameter approximation of a readout case does not hold."""
