"""Exception types raised by the soilres package."""


class SoilresError(Exception):
    """Base class for all soilres errors."""


class SchemaError(SoilresError):
    """The input file is missing a required column."""


class ParseError(SoilresError):
    """A data row could not be interpreted (bad token or unknown label)."""


class SummaryError(SoilresError):
    """A variable cannot be summarized (for example, all values missing)."""


class DomainError(SoilresError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class SingularDesignError(SoilresError):
    """The design matrix is rank deficient."""

    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = tuple(columns)


class InsufficientDataError(SoilresError):
    """Too few observations for the number of parameters."""


class EvaluationError(SoilresError):
    """A model evaluation produced a non-finite value."""


class NonConvergenceError(SoilresError):
    """Iterative fitting ran out of iterations.

    Carries the best parameter vector seen so far in ``beta`` and its
    residual sum of squares in ``rss``.
    """

    def __init__(self, message, beta=None, rss=None):
        super().__init__(message)
        self.beta = beta
        self.rss = rss


class DegenerateModelError(SoilresError):
    """A likelihood-based statistic is undefined (zero residual variance)."""


class ScalingError(SoilresError):
    """A variable cannot be min-max scaled (constant column)."""


class TrainingError(SoilresError):
    """Neural-network training diverged."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class SelectionError(SoilresError):
    """No candidate architecture could be trained."""


class CrossValidationError(SoilresError):
    """A model failed on too many cross-validation repeats."""
