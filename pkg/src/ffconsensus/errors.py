"""Exception hierarchy shared across the package."""


class FFConsensusError(Exception):
    """Base class for all errors raised by this package."""


class FieldMismatchError(FFConsensusError, ValueError):
    """Operands belong to different prime fields."""


class PreconditionError(FFConsensusError, ValueError):
    """An operation's stated precondition does not hold for the input."""


class GuardExceededError(FFConsensusError, RuntimeError):
    """An enumeration would exceed its configured size/work guard."""


class ParseError(FFConsensusError, ValueError):
    """A text input (matrix, graph, or scenario file) is malformed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
