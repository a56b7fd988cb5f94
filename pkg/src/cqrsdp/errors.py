"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI lives in cli.py; solver internals only
raise these types and attach whatever diagnostics they have at that point.
"""

from __future__ import annotations


class CqrError(Exception):
    """Base class for all package errors."""


class InputError(CqrError):
    """Malformed problem data (bad shapes, non-symmetric H, invalid W, ...)."""


class ParseError(InputError):
    """Problem-file syntax error with 1-based line/column location."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DomainError(CqrError):
    """Operation evaluated outside its domain (e.g. Hessian at 0 with beta != 0)."""


class UnboundedBelowError(CqrError):
    """The model function has no finite infimum for these parameters."""


class NumericalError(CqrError):
    """Numerical failure in a solver or factorization."""


class MaxIterationsError(NumericalError):
    """Interior-point iteration cap reached before tolerances were met.

    Carries the best iterate found so far and its residual statistics.
    """

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class IllConditionedError(NumericalError):
    """A factorization inside the interior-point method broke down.

    Carries diagnostics (iteration, residuals, which factorization failed).
    """

    def __init__(self, message: str, diagnostics: dict | None = None, result=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
        self.result = result


class RankAnomalyError(CqrError):
    """A certificate block violated its provable rank bound at tol_rank."""


class CertificateInconsistencyError(CqrError):
    """Evidence conflict: theory guarantees a tight relaxation for this input,
    but the extracted solution system is empty. Points at solver accuracy.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class OracleLimitError(CqrError):
    """A brute-force oracle was asked for a dimension it does not support."""
