"""Exception hierarchy shared by all statkit modules."""


class StatkitError(Exception):
    """Base class for every error raised by statkit."""


class DataError(StatkitError, ValueError):
    """Input data is malformed or violates a precondition."""


class NumericError(StatkitError, ArithmeticError):
    """A numerical procedure could not produce a defined result."""


class SingularMatrixError(NumericError):
    pass


class ConvergenceError(NumericError):
    """An iterative method hit its iteration cap.

    ``trace`` holds the per-iteration convergence measure when available.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class DegenerateError(NumericError):
    """A statistic is undefined for the given input (zero standard error, zero MSE, ...)."""


class ConfigError(StatkitError, ValueError):
    """A pipeline configuration is malformed or refers to something that does not exist."""
