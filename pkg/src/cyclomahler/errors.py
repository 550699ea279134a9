"""Exception types, mapped to CLI exit codes."""


class DomainError(ValueError):
    exit_code = 1


class ResourceGuardError(RuntimeError):
    exit_code = 2


class VerificationError(ArithmeticError):
    exit_code = 3


class PrecisionError(ArithmeticError):
    """Raised when a requested accuracy is not reached at the given precision."""

    exit_code = 3
