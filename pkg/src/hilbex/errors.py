"""Exception types shared across the package.

The CLI maps these onto exit codes, so keep the hierarchy flat.
"""


class HilbexError(Exception):
    """Base class for all package errors."""


class InputError(HilbexError, ValueError):
    """Bad vectors, distances or parameters supplied by the caller."""


class ParseError(InputError):
    """A vector file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateSpaceError(InputError):
    """All sampled distances are equal, so the statistic is undefined."""


class ConfigurationError(HilbexError):
    """An incompatible combination, e.g. Hilbert exclusion on an unsafe metric."""


class CalibrationError(HilbexError):
    """Threshold bisection could not reach the requested selectivity."""


class VerificationError(HilbexError):
    """An index returned a result set different from the linear scan."""
