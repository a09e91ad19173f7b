"""Exception hierarchy shared by every lab module.

Exit codes used by the worker: ConfigurationError -> 2, NumericalError -> 3,
InconclusiveDiagnostic -> 4 (only with --strict).
"""
from typing import Optional


class LabError(Exception):
    """Base class for lab failures; carries the pipeline stage when known."""

    exit_code = 1

    def __init__(self, message: str, stage: Optional[str] = None):
        self.stage = stage
        super().__init__(message)

    def with_stage(self, stage: str) -> "LabError":
        self.stage = stage
        return self

    def __str__(self) -> str:
        message = super().__str__()
        return f"[{self.stage}] {message}" if self.stage else message


class ConfigurationError(LabError):
    exit_code = 2


class NumericalError(LabError):
    exit_code = 3


class OperatorNotPositiveError(NumericalError):
    def __init__(self, index: int, value: float, threshold: float):
        self.index = index
        self.value = value
        super().__init__(
            f"operator not positive: eigenvalue #{index} = {value:.3e} below -{threshold:.3e}"
        )


class DomainError(LabError, ValueError):
    exit_code = 2


class SingularityError(DomainError):
    pass


class InconclusiveDiagnostic(LabError):
    exit_code = 4
