# services/errors.py
"""
Exception hierarchy for the multiple-testing services.

Everything derives from ValueError so the HTTP routers keep mapping
ValueError to 400 and the CLI maps MultipleTestingError to exit code 2.
"""
from typing import List, Optional


class MultipleTestingError(ValueError):
    """Base class for invalid input, configuration or construction"""


class ScheduleMismatchError(MultipleTestingError):
    """Schedule length differs from the number of p-values"""


class DomainError(MultipleTestingError):
    """Argument outside the mathematical domain of an operation"""


class ScheduleConstructionError(MultipleTestingError):
    """Critical values violate 0 < a_1 <= ... <= a_m < 1"""


class ConfigurationError(MultipleTestingError):
    """Inconsistent tuning parameters (clamps, truncation, empty ranges)"""


class ContractViolationError(MultipleTestingError):
    """Caller broke a documented precondition (e.g. unclamped estimate)"""


class InternalConsistencyError(MultipleTestingError):
    """A property that should hold by construction failed"""


class UnknownBoundError(MultipleTestingError):
    pass


class UnknownProcedureError(MultipleTestingError):
    pass


class InputParseError(MultipleTestingError):
    """Malformed p-value file; line numbers are 1-based"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InputValidationError(MultipleTestingError):
    """Parsed input that is not a valid p-value vector"""

    def __init__(self, message: str, offenders: Optional[List[str]] = None):
        self.offenders = offenders or []
        if self.offenders:
            shown = ", ".join(self.offenders[:10])
            more = f" (+{len(self.offenders) - 10} more)" if len(self.offenders) > 10 else ""
            message = f"{message}: {shown}{more}"
        super().__init__(message)
