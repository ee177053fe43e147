"""Custom exceptions for DipolarQB."""

from __future__ import annotations

from typing import Sequence


class DipolarQBError(Exception):
    """Base exception for all DipolarQB errors."""

    pass


class ConfigError(DipolarQBError):
    """Raised when configuration is invalid or missing."""

    pass


class NonHermitianError(DipolarQBError):
    """Raised when a matrix that must be Hermitian is not."""

    pass


class DimensionMismatchError(DipolarQBError):
    """Raised when operands have incompatible dimensions."""

    pass


class DegenerateClosedFormError(DipolarQBError):
    """Raised when the closed-form eigenvectors are undefined (eps = 0 or chi = 0).

    The closed-form eigenvalues stay valid and are attached so callers can
    fall back to the numeric eigensolver for the vectors only.
    """

    def __init__(self, message: str, eigenvalues: Sequence[float]):
        super().__init__(message)
        self.eigenvalues = tuple(eigenvalues)


class InvalidStateError(DipolarQBError):
    """Raised when a matrix is not a valid density matrix."""

    pass


class GridError(DipolarQBError):
    """Raised when a time grid is malformed."""

    pass


class NonRealTraceError(DipolarQBError):
    """Raised when a trace that must be real has a significant imaginary part."""

    pass


class StepTooLargeError(DipolarQBError):
    """Raised when an integrator step exceeds the stability bound."""

    pass
