"""Exception types shared across the package."""

from __future__ import annotations


class ValidationError(ValueError):
    """Raised when input data violates a structural invariant."""


class ConfigError(ValueError):
    """Raised when a configuration is inconsistent or infeasible."""


class ParseError(ValidationError):
    """Raised by strict-mode parsing; carries the full list of row errors."""

    def __init__(self, message: str, issues=None):
        super().__init__(message)
        self.issues = list(issues) if issues else []

    def __str__(self) -> str:
        base = super().__str__()
        if not self.issues:
            return base
        lines = [base] + [f"  - {issue}" for issue in self.issues]
        return "\n".join(lines)
