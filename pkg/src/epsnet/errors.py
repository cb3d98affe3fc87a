"""Exception types shared across the package."""


class EpsNetError(Exception):
    """Base class for all errors raised by epsnet."""


class ParameterError(EpsNetError, ValueError):
    """An argument is outside the operation's domain."""


class InputFormatError(EpsNetError, ValueError):
    """A file or array could not be parsed into the expected structure."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FiltrationError(EpsNetError, ValueError):
    """A filtration violates the faces-first / monotonicity contract."""


class ResourceLimitError(EpsNetError, RuntimeError):
    """Refusal to build something whose estimated size exceeds a cap."""


class ValidationFailure(EpsNetError):
    """One or more theorem validators reported a violation."""
