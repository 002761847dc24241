"""Exception hierarchy.

Everything numerical derives from :class:`NumericalError` so that callers
(and the command line driver) can separate bad input from numerical trouble.
"""


class GoursatError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(GoursatError, ValueError):
    """Malformed specification strings, files or parameters."""


class NumericalError(GoursatError, ArithmeticError):
    """A computation could not be carried out to the requested accuracy."""


class IllConditionedError(NumericalError):
    def __init__(self, t, condition):
        self.t = t
        self.condition = condition
        super().__init__(
            f"Gramian at t={t!r} is ill-conditioned (condition number {condition:.3e})"
        )


class QuadratureError(NumericalError):
    """Adaptive quadrature exhausted its budget without converging."""


class ConvergenceError(NumericalError):
    """An extrapolation or limit did not settle within tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class TruncationError(NumericalError):
    """A truncated infinite-horizon integral exceeds its error budget."""
