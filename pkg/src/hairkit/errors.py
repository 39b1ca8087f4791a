"""Exception types shared across the package.

The CLI maps these onto exit codes: ValidationError (and subclasses) mean
bad input (exit 3), ComputationError means a computation could not produce
a result (exit 4).
"""


class HairkitError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(HairkitError):
    """Invalid input data, configuration, or arguments."""


class DatasetValidationError(ValidationError):
    """A dataset violates its invariants.

    Carries the full violation list so callers can report every problem at
    once instead of failing on the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        summary = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} violation(s): {summary}")


class FormatError(ValidationError):
    """Malformed, inconsistent, or unsupported interchange file."""


class ComputationError(HairkitError):
    """A well-formed request that has no answer (e.g. no convergence)."""
