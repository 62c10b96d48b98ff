"""Exception hierarchy shared by all modules."""


class MeanOrderError(Exception):
    """Base class for every error raised by :mod:`meanorder`."""


class DomainError(MeanOrderError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class PreconditionError(MeanOrderError, ValueError):
    """A documented hypothesis of an operation does not hold."""


class EvaluationError(MeanOrderError, ArithmeticError):
    """A mean produced a non-finite or otherwise unusable value.

    The offending input is kept in :attr:`point` so it can be replayed.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class BudgetError(MeanOrderError, RuntimeError):
    """The requested work exceeds the configured evaluation budget."""


class InconsistencyError(MeanOrderError):
    """Two results that must be ordered contradict each other."""
