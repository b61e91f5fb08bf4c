from __future__ import annotations

from typing import Any, Dict, Optional


class HardcoreError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 5

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics: Dict[str, Any] = dict(diagnostics or {})


# --- Exit code 2 ---
class ParseError(HardcoreError, ValueError):
    exit_code = 2


# --- Exit code 3 ---
class DomainError(HardcoreError, ValueError):
    """A documented precondition of an operation does not hold."""

    exit_code = 3


class ConstructionError(DomainError):
    pass


class DegenerateMap(DomainError):
    pass


class DegenerateSeed(DomainError):
    pass


class PoleError(DomainError):
    pass


class NotADisk(DomainError):
    pass


class NotATree(DomainError):
    pass


class DegreeBound(DomainError):
    pass


class OracleLimit(DomainError):
    pass


class GeometryPrecondition(DomainError):
    pass


class WrongBranch(DomainError):
    pass


class ExceptionalParameter(DomainError):
    pass


class PolynomialDegreeGuard(DomainError):
    pass


# --- Exit code 4 ---
class SearchFailed(HardcoreError):
    exit_code = 4


# --- Exit code 5 ---
class InternalError(HardcoreError):
    """A guaranteed geometric property failed to hold. Always a bug."""

    exit_code = 5
