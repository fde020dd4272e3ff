"""Exception hierarchy shared by every glrank module.

Each category also derives from the builtin exception a caller would
naturally catch, so ``except ValueError`` keeps working for bad input.
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RESOURCE = 2
EXIT_VERIFY = 3
EXIT_INTERNAL = 4


class GlrankError(Exception):
    """Base class for all glrank errors."""

    exit_code = EXIT_INTERNAL


class InvalidInputError(GlrankError, ValueError):
    """Raised when an argument violates an operation's precondition."""

    exit_code = EXIT_USAGE


class UnsupportedError(GlrankError, ValueError):
    """Raised for inputs outside the supported range (for example SL_2)."""

    exit_code = EXIT_USAGE


class NoRankConstituentError(GlrankError, ValueError):
    """Raised when no constituent of the requested tensor rank exists."""

    exit_code = EXIT_USAGE


class ResourceLimitError(GlrankError, RuntimeError):
    """Raised when a configured cap would be exceeded."""

    exit_code = EXIT_RESOURCE

    def __init__(self, cap: str, limit: int, requested: int):
        self.cap = cap
        self.limit = limit
        self.requested = requested
        super().__init__(
            f"Resource limit '{cap}' exceeded: requested {requested}, limit {limit}"
        )


class VerificationError(GlrankError, AssertionError):
    """Raised when an acceptance check fails."""

    exit_code = EXIT_VERIFY


class InternalError(GlrankError, RuntimeError):
    """Raised when an exactness check fails inside an algorithm."""

    exit_code = EXIT_INTERNAL
