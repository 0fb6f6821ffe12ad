"""
Circulant Spectra - Errors

Exception hierarchy shared by the library and the CLI. Every error class owns a
distinct exit code so batch drivers can tell failures apart without parsing text.
"""

from typing import Any, Dict, Optional


class CirculantError(Exception):
    """Base class for all circulant_spectra errors."""

    exit_code = 1

    def __init__(self, message: str = "", detail: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
            "detail": self.detail,
        }


# Graph construction

class GraphError(CirculantError, ValueError):
    exit_code = 10


class NotStrictlyIncreasing(GraphError):
    exit_code = 11


class JumpOutOfRange(GraphError):
    exit_code = 12


class Disconnected(GraphError):
    exit_code = 13


class EmptyJumpSet(GraphError):
    exit_code = 14


class InvalidProbability(GraphError):
    exit_code = 15


class InvalidLength(GraphError):
    exit_code = 16


# Secular functions

class TooCloseToPole(CirculantError, ValueError):
    """k sits inside the guard band of the Dirichlet set; shift the evaluation point."""

    exit_code = 20


class PoleHit(CirculantError, ValueError):
    exit_code = 21


# Solver

class MonotonicityViolation(CirculantError):
    """Sign pattern of p_j between poles contradicts one root per interval."""

    exit_code = 30


class DimensionTooSmall(CirculantError, ValueError):
    exit_code = 31


class WeylCountMismatch(CirculantError):
    exit_code = 32


class EmptySpectrum(CirculantError, ValueError):
    exit_code = 33


# Statistics

class TooFewLevels(CirculantError, ValueError):
    exit_code = 40


class XmaxTooLarge(CirculantError, ValueError):
    exit_code = 41


class NoBracket(CirculantError):
    exit_code = 42


class DomainViolation(CirculantError, ValueError):
    exit_code = 43


# Zeta functions and determinants

class PoleAtOne(CirculantError, ValueError):
    exit_code = 50


class ArgumentOutOfRange(CirculantError, ValueError):
    exit_code = 51


class QuadratureFailure(CirculantError):
    exit_code = 52


class NearSingularMhat(CirculantError):
    exit_code = 53


class DegenerateC(CirculantError):
    """Leading small-t coefficient vanishes; the lengths are not generic enough."""

    exit_code = 54


class NumericalSignError(CirculantError):
    exit_code = 55


# Command line

class UsageError(CirculantError, ValueError):
    exit_code = 2


class SpecFileNotFound(CirculantError):
    exit_code = 3


class SchemaError(CirculantError, ValueError):
    exit_code = 4


class VerificationFailed(CirculantError):
    exit_code = 5


class SymmetricMetricWarning(UserWarning):
    """Symmetric lengths handed to the generic solver."""
