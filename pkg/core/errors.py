"""Exception hierarchy for the risk library.

Input problems (bad files, bad configuration) derive from InputError and map
to CLI exit code 1. Everything else derived from QRiskError is a runtime
failure and maps to exit code 2.
"""

from typing import List, Optional


class QRiskError(Exception):
    """Base class for all library errors."""


# ===== Input / validation errors =====

class InputError(QRiskError):
    """Malformed user input: price files, returns files, configuration."""


class ParseError(InputError):
    """A data row could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class NonPositivePrice(ParseError):
    """A price row carried a zero or negative price."""


class DuplicateRow(ParseError):
    """The same (ticker, date) pair appeared twice."""


class ConfigValidationError(InputError):
    """Configuration failed validation; carries every violated constraint."""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(self.errors))


# ===== Computational errors =====

class DomainError(QRiskError, ValueError):
    """Argument outside the mathematical domain of a function."""


class DegenerateData(QRiskError):
    """Data without spread (constant series, zero standard deviation)."""


class InsufficientData(QRiskError):
    """Too few observations for the requested computation."""


class InsufficientOverlap(InsufficientData):
    """Two series share too few dates after alignment."""


class ConvergenceFailure(QRiskError):
    """An iterative solver did not converge."""


class QMismatch(QRiskError):
    """Two q-Gaussian fits that must share q carry different values."""


class NotNormalized(QRiskError):
    """A discrete probability vector does not sum to one."""


class SupportViolation(QRiskError):
    """Relative entropy undefined: p_i > 0 where r_i = 0."""


class InternalConsistencyError(QRiskError):
    """A computed value violates an analytic guarantee beyond rounding."""


class DegenerateProfile(QRiskError):
    """A risk-return profile cannot be fitted (too few points, constant values)."""


class InsufficientSpan(QRiskError):
    """The data span cannot hold a single backtest cycle."""


class EmptyUniverse(QRiskError):
    """No security qualifies for a backtest cycle."""


class TooFewSecurities(QRiskError):
    """Fewer securities than one bin needs."""
