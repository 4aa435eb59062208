"""
Error hierarchy for the cone degree toolkit.
Each error carries the process exit code the CLI reports for it.
"""

from typing import List, Optional


class ConeSpecError(Exception):
    """Base class for all errors raised by the toolkit."""

    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def to_dict(self) -> dict:
        """Machine-readable form written to stderr by the CLI."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
        }


class InputParseError(ConeSpecError):
    """Malformed JSON input, missing keys or non-numeric angles."""

    exit_code = 2


class MeshResolutionError(ConeSpecError):
    """Oracle mesh too coarse."""

    exit_code = 2


class GraphValidationError(ConeSpecError):
    """The cone graph fails validation where an analysis requires a valid graph."""

    exit_code = 3

    def __init__(self, violations: List[str], message: Optional[str] = None):
        self.violations = list(violations)
        super().__init__(message or "invalid cone graph: " + "; ".join(self.violations))

    def to_dict(self) -> dict:
        data = super().to_dict()
        data["violations"] = self.violations
        return data


class PreconditionError(ConeSpecError, ValueError):
    """An operation was called outside its documented domain."""

    exit_code = 3


class SingularDegreeError(PreconditionError):
    """A degree sits on (or off) a singular degree contrary to what the operation needs."""


class NumericalAccuracyError(ConeSpecError):
    """A computation cannot be carried out to the required accuracy."""

    exit_code = 4
