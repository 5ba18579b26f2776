"""Exception types shared across the package."""


class SwapVoterError(Exception):
    """Base class for all package errors."""


class NonSymmetricKernel(SwapVoterError):
    """Raised when an operation requires r(i) == r(-i) and the kernel breaks it."""


class NotSatisfiable(SwapVoterError):
    """Raised when no (i, N) pair can satisfy the tightness inequality (q_s == 0)."""


class NotAnInterface(SwapVoterError):
    """Raised when a configuration is not 0 at -inf and 1 at +inf."""


class Unreachable(SwapVoterError):
    """Raised when a transport target cannot be written in terms of the step support."""


class EventBudgetExceeded(SwapVoterError):
    """Raised when a trajectory exceeds its event cap; carries the partial record."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class CouplingViolation(SwapVoterError):
    """Raised if the dominating walk ever falls below the interface width."""


class PreconditionViolated(SwapVoterError):
    """Raised when a statistical routine is called on inputs outside its contract."""


class ParseError(SwapVoterError):
    """Raised on malformed config input; message names the offending field."""


class ValidationError(SwapVoterError):
    """Raised when a parsed config violates structural constraints."""
