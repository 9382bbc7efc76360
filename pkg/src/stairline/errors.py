"""Exception types shared across the package."""


class StairlineError(Exception):
    """Base class for all package errors."""


class DimensionError(StairlineError, ValueError):
    """Points or point sets of inconsistent dimension."""


class SharedCoordinateError(StairlineError, ValueError):
    """Two points that must be in general position share a coordinate value."""


class EmptyInputError(StairlineError, ValueError):
    """An operation that needs a nonempty point set received an empty one."""


class DomainError(StairlineError, ValueError):
    """A coordinate lies outside the domain an operation is defined on."""


class ConditionViolation(StairlineError, ValueError):
    """Inputs violate the ordering conditions a diagonal formula requires.

    ``inequality`` names the violated relation, e.g. ``"p_i <= q_i"``.
    """

    def __init__(self, message, inequality=None):
        super().__init__(message)
        self.inequality = inequality


class BudgetError(StairlineError, ValueError):
    """Evaluation budget or enumeration size outside the permitted range."""


class NonFiniteObjective(StairlineError, ArithmeticError):
    """An objective returned NaN or infinity during optimization."""
