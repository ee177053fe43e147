"""Dense complex matrix algebra for the 2x2 and 4x4 operators of the model.

Everything here is a pure function of its inputs. Arrays handed out inside
result objects are marked read-only so they can be shared between workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import numpy.typing as npt

from dipolarqb.constants import TOL
from dipolarqb.exceptions import (
    DimensionMismatchError,
    InvalidStateError,
    NonHermitianError,
    NonRealTraceError,
)

ComplexMatrix = npt.NDArray[np.complex128]
RealVector = npt.NDArray[np.float64]

SUPPORTED_DIMS = (2, 4)

IDENTITY2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def as_matrix(matrix: npt.ArrayLike) -> ComplexMatrix:
    """Coerce input to a square complex matrix of a supported dimension.

    Raises:
        DimensionMismatchError: If the matrix is not 2x2 or 4x4
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in SUPPORTED_DIMS:
        raise DimensionMismatchError(f"Expected a 2x2 or 4x4 matrix, got shape {m.shape}")
    return m


def two_qubit(left: npt.ArrayLike, right: npt.ArrayLike) -> ComplexMatrix:
    """Kronecker product of two single-qubit operators, left factor on qubit 1."""
    return np.kron(np.asarray(left, dtype=complex), np.asarray(right, dtype=complex))


def hermiticity_defect(matrix: npt.ArrayLike) -> float:
    """Return max |M - M^dagger|."""
    m = np.asarray(matrix, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T)))


def require_hermitian(matrix: npt.ArrayLike, tol: float = TOL.structural) -> ComplexMatrix:
    """Return the matrix if Hermitian within tol.

    Raises:
        NonHermitianError: If the symmetry check fails
    """
    m = as_matrix(matrix)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NonHermitianError(f"Matrix is not Hermitian (max |M - M^dagger| = {defect:.3e})")
    return m


@dataclass(frozen=True, eq=False)
class HermitianEigen:
    """Spectral decomposition of a Hermitian matrix.

    Eigenvalues ascend; eigenvectors are the matching orthonormal columns.
    """

    eigenvalues: RealVector
    eigenvectors: ComplexMatrix

    def reconstruct(self) -> ComplexMatrix:
        """Reassemble V diag(lambda) V^dagger."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def residuals(self, matrix: npt.ArrayLike) -> RealVector:
        """Per-pair norms |M v_i - lambda_i v_i|."""
        m = np.asarray(matrix, dtype=complex)
        diff = m @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return np.linalg.norm(diff, axis=0)


def _degenerate_clusters(values: RealVector, tol: float) -> list[list[int]]:
    scale = max(1.0, float(np.max(np.abs(values))))
    clusters = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] <= tol * scale:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def _orthonormalize_degenerate(values: RealVector, vectors: ComplexMatrix) -> ComplexMatrix:
    """Replace each degenerate block by Gram-Schmidt of the projected unit vectors.

    The projector onto a degenerate eigenspace does not depend on the basis
    the solver returned, so projecting e_0, e_1, ... in index order gives a
    deterministic basis.
    """
    vectors = vectors.copy()
    dim = vectors.shape[0]
    for cluster in _degenerate_clusters(values, TOL.structural):
        if len(cluster) < 2:
            continue
        block = vectors[:, cluster]
        projector = block @ block.conj().T
        chosen: list[np.ndarray] = []
        for j in range(dim):
            w = projector[:, j].copy()
            for c in chosen:
                w -= (c.conj() @ w) * c
            norm = np.linalg.norm(w)
            if norm > 1e-6:
                chosen.append(w / norm)
            if len(chosen) == len(cluster):
                break
        vectors[:, cluster] = np.column_stack(chosen)
    return vectors


def _fix_phases(vectors: ComplexMatrix) -> ComplexMatrix:
    """Make the largest-magnitude component of each column real positive.

    Ties (within 1e-8) go to the lowest index.
    """
    vectors = vectors.copy()
    for k in range(vectors.shape[1]):
        column = vectors[:, k]
        magnitudes = np.abs(column)
        pivot = int(np.flatnonzero(magnitudes >= magnitudes.max() - 1e-8)[0])
        vectors[:, k] = column * (np.conj(column[pivot]) / magnitudes[pivot])
    return vectors


def hermitian_eigen(matrix: npt.ArrayLike) -> HermitianEigen:
    """Full spectral decomposition of a Hermitian matrix.

    Args:
        matrix: 2x2 or 4x4 Hermitian matrix

    Returns:
        HermitianEigen with ascending eigenvalues and phase-fixed eigenvectors

    Raises:
        NonHermitianError: If the matrix is not Hermitian within 1e-10
    """
    m = require_hermitian(matrix)
    values, vectors = np.linalg.eigh(0.5 * (m + m.conj().T))
    vectors = _fix_phases(_orthonormalize_degenerate(values, vectors))
    return HermitianEigen(eigenvalues=_frozen(values), eigenvectors=_frozen(vectors))


def hermitian_function(
    matrix: npt.ArrayLike,
    func: Callable[[RealVector], npt.ArrayLike],
) -> ComplexMatrix:
    """Apply a scalar function to a Hermitian matrix through its eigenvalues.

    Args:
        matrix: Hermitian matrix
        func: Vectorized scalar function, called with the eigenvalue array

    Returns:
        V f(Lambda) V^dagger (Hermitian when func is real-valued)

    Raises:
        NonHermitianError: If the matrix is not Hermitian
    """
    eig = hermitian_eigen(matrix)
    raw = np.asarray(func(eig.eigenvalues))
    v = eig.eigenvectors
    result = (v * raw.astype(complex)) @ v.conj().T
    if np.isrealobj(raw):
        result = 0.5 * (result + result.conj().T)
    return result


def commutator(a: npt.ArrayLike, b: npt.ArrayLike) -> ComplexMatrix:
    """Return AB - BA.

    Raises:
        DimensionMismatchError: If the operands differ in shape
    """
    left = as_matrix(a)
    right = as_matrix(b)
    if left.shape != right.shape:
        raise DimensionMismatchError(f"Cannot commute {left.shape} with {right.shape}")
    return left @ right - right @ left


def real_trace(matrix: npt.ArrayLike, what: str = "trace") -> float:
    """Trace of a matrix that must be real.

    Raises:
        NonRealTraceError: If the imaginary part exceeds the tolerance
    """
    value = complex(np.trace(np.asarray(matrix, dtype=complex)))
    if abs(value.imag) > TOL.non_real:
        raise NonRealTraceError(f"{what} has imaginary part {value.imag:.3e}")
    return value.real


def trace_distance(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """Half the trace norm of A - B."""
    diff = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def ground_state_projector(hamiltonian: npt.ArrayLike) -> ComplexMatrix:
    """Projector onto the lowest eigenvector of a Hamiltonian."""
    eig = hermitian_eigen(hamiltonian)
    ground = eig.eigenvectors[:, 0]
    return np.outer(ground, ground.conj())


def random_hermitian(rng: np.random.Generator, dim: int = 4, scale: float = 1.0) -> ComplexMatrix:
    """Draw a random Hermitian matrix with entries of order scale."""
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (raw + raw.conj().T)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state.

    Build through `from_array`, which validates; the stored matrix is read-only.
    """

    matrix: ComplexMatrix

    @classmethod
    def from_array(
        cls,
        matrix: npt.ArrayLike,
        trace_tol: float = TOL.algebraic,
        hermitian_tol: float = TOL.algebraic,
    ) -> "DensityMatrix":
        """Validate and wrap a matrix.

        Raises:
            InvalidStateError: If any density-matrix invariant fails
        """
        try:
            m = as_matrix(matrix).copy()
        except DimensionMismatchError as e:
            raise InvalidStateError(str(e))

        defect = hermiticity_defect(m)
        if defect > hermitian_tol:
            raise InvalidStateError(f"State is not Hermitian (defect {defect:.3e})")

        trace = complex(np.trace(m))
        if abs(trace - 1.0) > trace_tol:
            raise InvalidStateError(f"State trace is {trace:.15g}, expected 1")

        lowest = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
        if lowest < -TOL.psd:
            raise InvalidStateError(f"State has negative eigenvalue {lowest:.3e}")

        return cls(matrix=_frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> RealVector:
        """Ascending eigenvalues of the state."""
        return np.linalg.eigvalsh(self.matrix)

    def expectation(self, operator: npt.ArrayLike, what: str = "expectation") -> float:
        """Real expectation value Tr[rho O] of a Hermitian observable."""
        return real_trace(self.matrix @ np.asarray(operator, dtype=complex), what)
