"""Exception types raised by the toolkit."""


class AggFieldError(Exception):
    """Base class for all package errors."""


class ConfigError(AggFieldError, ValueError):
    """Invalid model, regime or experiment configuration."""


class EvaluationError(AggFieldError, ArithmeticError):
    """An integrand was non-finite where a finite value was required."""


class QuadratureError(AggFieldError, ArithmeticError):
    """A quadrature missed its tolerance.

    Carries the partial value and the achieved error estimate so callers
    can decide whether the result is still usable.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error
