"""Exception types raised across the package."""

import numpy as np


class ParameterError(ValueError):
    """A scheme, problem or configuration parameter is inadmissible."""


class DomainError(ValueError):
    """A function was evaluated outside its domain."""


class SeriesTruncationError(ArithmeticError):
    """A truncated series did not reach its tolerance within the term budget."""

    def __init__(self, message, last_term):
        super().__init__(message)
        self.last_term = last_term


class PositivityViolation(ArithmeticError):
    """A generating-function symbol took a negative value."""


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Cholesky factorization hit a nonpositive pivot."""


class BudgetExceededError(ValueError):
    """A dense computation was requested above its size budget."""


class SolverError(RuntimeError):
    """Time stepping failed at a given level."""

    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class IllConditionedWarning(RuntimeWarning):
    """A small dense system was solved with a large condition number."""
