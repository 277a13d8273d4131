"""Exception types shared across the package."""

from __future__ import annotations


class KinverseError(Exception):
    """Base class for all package-specific errors."""


class SingularModelError(KinverseError):
    """Gram matrix stayed non-positive-definite after maximum jitter escalation."""


class EvaluationError(KinverseError):
    """A discipline-model evaluation failed (bad geometry, external process, ...)."""


class KinematicLockError(EvaluationError):
    """The linkage cannot reach the requested configuration.

    Carries the offending travel value when the failure happened inside a
    sweep.
    """

    def __init__(self, message: str, travel: float | None = None):
        if travel is not None:
            message = f"{message} (travel = {travel:+.4f} m)"
        super().__init__(message)
        self.travel = travel


class EvaluationBudgetError(KinverseError):
    """Too many discipline evaluations failed; carries the partial trace."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class ConfigError(KinverseError):
    """An experiment configuration failed validation."""
