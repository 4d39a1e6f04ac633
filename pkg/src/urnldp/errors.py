"""Error categories shared by the library and mapped to CLI exit codes."""


class UrnError(Exception):
    exit_code = 1


class UrnSpecError(UrnError):
    """Malformed configuration document or command arguments."""

    exit_code = 2


class UrnValidationError(UrnError):
    """Well-formed input that violates a documented invariant."""

    exit_code = 3

    def __init__(self, message: str, violations: list[str] | None = None):
        self.violations = list(violations or [])
        if self.violations:
            message = message + ": " + "; ".join(self.violations)
        super().__init__(message)


class NumericalError(UrnError):
    """A numerical procedure failed to converge or lost accuracy."""

    exit_code = 4
