"""Exception hierarchy shared across the workbench.

The CLI maps these onto exit codes: dataset/validation problems exit 2,
numerical failures exit 3, plain I/O errors exit 1.
"""

from __future__ import annotations


class RefauditError(Exception):
    """Base class for all workbench errors."""


class ValidationError(RefauditError):
    """Bad or incomplete input data (CLI exit code 2)."""


class DatasetError(ValidationError):
    """Malformed dataset file; message carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AnnotationError(ValidationError):
    """Correlate annotation failed for specific records."""

    def __init__(self, message: str, record_ids: list[str] | None = None):
        self.record_ids = list(record_ids or [])
        super().__init__(message)


class MissingFieldError(ValidationError):
    """A required score or field is absent from a record or aggregate."""


class DistributionLabelError(ValidationError):
    """Dataset carries the wrong distribution label for the requested check."""


class NumericalError(RefauditError):
    """Numerical failure (CLI exit code 3)."""


class UndefinedMeasureError(NumericalError):
    """Measure requested on an input for which it is undefined (empty summary)."""


class DegenerateSampleError(NumericalError):
    """Statistic undefined on this sample (zero variance, all-equal ranks)."""


class UnstableStatisticError(NumericalError):
    """Statistic was degenerate on more than half of the bootstrap replicates."""

    def __init__(self, message: str, degenerate_count: int = 0):
        self.degenerate_count = degenerate_count
        super().__init__(message)


class DegenerateFitError(NumericalError):
    """Regression fit impossible: collinear or zero-variance features."""


class InsufficientSystemsError(NumericalError):
    """Not enough usable system pairs for a ranking statistic."""


class DivergenceError(NumericalError):
    """Training produced a non-finite loss."""

    def __init__(self, message: str, step: int | None = None):
        self.step = step
        super().__init__(message)


class DimensionMismatchError(NumericalError):
    """Feature vector does not match the model's input width."""
