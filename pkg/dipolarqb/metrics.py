"""Figures of merit of the battery: stored work, power, capacity, coherence, ergotropy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from dipolarqb.constants import C_MAX_TWO_QUBIT, TOL
from dipolarqb.exceptions import ConfigError, InvalidStateError
from dipolarqb.operators import DensityMatrix, commutator, hermitian_eigen, real_trace

_COHERENCE_SLACK = 1e-12


@dataclass(frozen=True)
class CoherenceSpec:
    """Normalization of the l1 coherence (C_max = d - 1, so 3 for two qubits)."""

    c_max: float = C_MAX_TWO_QUBIT

    def __post_init__(self):
        if not self.c_max > 0.0:
            raise ConfigError(f"c_max must be > 0, got: {self.c_max}")


@dataclass(frozen=True)
class MetricsSample:
    """One row of a charging run."""

    t: float
    work: float
    power: float
    capacity: float
    coherence: float

    def __post_init__(self):
        if not -_COHERENCE_SLACK <= self.coherence <= 1.0 + _COHERENCE_SLACK:
            raise InvalidStateError(f"l1 coherence {self.coherence} outside [0, 1] at t={self.t}")


@dataclass(frozen=True, eq=False)
class PassiveState:
    """Passive state sigma of rho and the ergotropy Tr[rho H] - Tr[sigma H]."""

    sigma: DensityMatrix
    extractable: float


def energy(rho: DensityMatrix, h_b: npt.ArrayLike) -> float:
    """Tr[rho H_B]."""
    return rho.expectation(h_b, "energy")


def stored_work(rho_t: DensityMatrix, rho_T: DensityMatrix, h_b: npt.ArrayLike) -> float:
    """W(t) = Tr[rho(t) H_B] - Tr[rho(T) H_B].

    Raises:
        NonRealTraceError: If either trace has an imaginary part above 1e-10
    """
    if rho_t is rho_T:
        return 0.0
    return energy(rho_t, h_b) - energy(rho_T, h_b)


def instantaneous_power(
    rho_t: DensityMatrix, generator: npt.ArrayLike, h_b: npt.ArrayLike
) -> float:
    """P(t) = dW/dt = -i Tr([G, rho(t)] H_B) for the active generator G.

    Raises:
        NonRealTraceError: If the trace has an imaginary part above 1e-10
    """
    rate = -1j * commutator(generator, rho_t.matrix)
    return real_trace(rate @ np.asarray(h_b, dtype=complex), "power")


def capacity(h_b: npt.ArrayLike) -> float:
    """K = <1...1|H_B|1...1> - <0...0|H_B|0...0>."""
    h = np.asarray(h_b, dtype=complex)
    dim = h.shape[0]
    down = np.zeros(dim, dtype=complex)
    up = np.zeros(dim, dtype=complex)
    down[0] = 1.0
    up[-1] = 1.0
    return float((up.conj() @ h @ up).real - (down.conj() @ h @ down).real)


def l1_coherence(rho: DensityMatrix, spec: CoherenceSpec = CoherenceSpec()) -> float:
    """Sum of |rho_ij| over i != j, divided by C_max."""
    m = rho.matrix
    off_diagonal = np.sum(np.abs(m)) - np.sum(np.abs(np.diag(m)))
    return float(off_diagonal / spec.c_max)


def passive_ergotropy(rho: DensityMatrix, h_b: npt.ArrayLike) -> PassiveState:
    """Build the passive state of rho with respect to H_B.

    Populations of rho sorted descending are placed on the H_B levels
    sorted ascending.
    """
    eig = hermitian_eigen(h_b)
    populations = np.clip(rho.eigenvalues()[::-1], 0.0, None)
    populations = populations / populations.sum()

    v = eig.eigenvectors
    sigma = (v * populations.astype(complex)) @ v.conj().T
    sigma = DensityMatrix.from_array(0.5 * (sigma + sigma.conj().T))

    extractable = energy(rho, h_b) - float(np.dot(populations, eig.eigenvalues))
    if -TOL.structural < extractable < 0.0:
        extractable = 0.0
    return PassiveState(sigma=sigma, extractable=extractable)


def sample(
    t: float,
    rho_t: DensityMatrix,
    rho_T: DensityMatrix,
    generator: npt.ArrayLike,
    h_b: npt.ArrayLike,
    spec: CoherenceSpec = CoherenceSpec(),
) -> MetricsSample:
    """All four figures of merit at one instant."""
    return MetricsSample(
        t=t,
        work=stored_work(rho_t, rho_T, h_b),
        power=instantaneous_power(rho_t, generator, h_b),
        capacity=capacity(h_b),
        coherence=l1_coherence(rho_t, spec),
    )
