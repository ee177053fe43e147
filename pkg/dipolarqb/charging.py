"""Unitary charging of the battery: charger-only gate and full-generator modes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt

from dipolarqb.exceptions import ConfigError, GridError, InvalidStateError
from dipolarqb.logging import get_logger
from dipolarqb.model import BatteryParams, ChargerParams, battery_hamiltonian, charging_hamiltonian
from dipolarqb.operators import ComplexMatrix, DensityMatrix, RealVector, hermitian_eigen

logger = get_logger("charging")


class EvolutionMode(str, Enum):
    """Which Hamiltonian drives the charging step."""

    CHARGER_ONLY = "charger-only"
    FULL = "full"

    @classmethod
    def parse(cls, value: str) -> "EvolutionMode":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ConfigError(f"Invalid run.mode: {value}. Must be 'charger-only' or 'full'")


@dataclass(frozen=True)
class UnitaryEntries:
    """r = cos^2(Omega t), q = -sin^2(Omega t), s = -sin(2 Omega t)/2.

    r - q = 1, r + q = cos(2 Omega t) and s^2 = -r q.
    """

    r: float
    q: float
    s: float

    @classmethod
    def at(cls, c: ChargerParams, t: float) -> "UnitaryEntries":
        phase = c.omega * t
        return cls(
            r=math.cos(phase) ** 2,
            q=-math.sin(phase) ** 2,
            s=-0.5 * math.sin(2.0 * phase),
        )


def _gate_pattern(corner: float, direct: float, flip: complex) -> ComplexMatrix:
    return np.array(
        [
            [direct, flip, flip, corner],
            [flip, direct, corner, flip],
            [flip, corner, direct, flip],
            [corner, flip, flip, direct],
        ],
        dtype=complex,
    )


def charging_unitary(c: ChargerParams, t: float) -> ComplexMatrix:
    """exp(-i H_c t) = u x u with u = exp(-i Omega t sigma_x).

    Same (r, s, s, q) pattern as real_flip_charging_matrix, with the single-flip
    entries carrying the factor i.
    """
    e = UnitaryEntries.at(c, t)
    return _gate_pattern(e.q, e.r, 1j * e.s)


def real_flip_charging_matrix(c: ChargerParams, t: float) -> ComplexMatrix:
    """The flip gate with real s; not unitary unless s = 0 or r + q = 0."""
    e = UnitaryEntries.at(c, t)
    return _gate_pattern(e.q, e.r, e.s)


def unitarity_defect(u: npt.ArrayLike) -> float:
    """max |U U^dagger - I|."""
    m = np.asarray(u, dtype=complex)
    return float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))))


def generator_for(mode: EvolutionMode, p: BatteryParams, c: ChargerParams) -> ComplexMatrix:
    """Hamiltonian generating the evolution in the given mode."""
    if mode is EvolutionMode.CHARGER_ONLY:
        return charging_hamiltonian(c)
    return battery_hamiltonian(p) + charging_hamiltonian(c)


class Propagator:
    """Time-evolution operator of a fixed mode, reusable across many times.

    The full generator is diagonalized once; exp(-i G t) is then
    V diag(exp(-i lambda t)) V^dagger for every requested t.
    """

    def __init__(self, mode: EvolutionMode, p: BatteryParams, c: ChargerParams):
        self.mode = mode
        self.battery = p
        self.charger = c
        self.generator = generator_for(mode, p, c)
        self._eig = hermitian_eigen(self.generator) if mode is EvolutionMode.FULL else None

    def unitary(self, t: float) -> ComplexMatrix:
        if self._eig is None:
            return charging_unitary(self.charger, t)
        v = self._eig.eigenvectors
        return (v * np.exp(-1j * t * self._eig.eigenvalues)) @ v.conj().T

    def apply(self, rho0: DensityMatrix, t: float) -> DensityMatrix:
        if t == 0.0:
            return rho0
        u = self.unitary(t)
        m = u @ rho0.matrix @ u.conj().T
        return DensityMatrix.from_array(0.5 * (m + m.conj().T))


def _as_state(rho0: DensityMatrix | npt.ArrayLike) -> DensityMatrix:
    if isinstance(rho0, DensityMatrix):
        return rho0
    return DensityMatrix.from_array(rho0)


def evolve(
    rho0: DensityMatrix | npt.ArrayLike,
    p: BatteryParams,
    c: ChargerParams,
    mode: EvolutionMode,
    t: float,
) -> DensityMatrix:
    """Evolve the initial state to time t.

    Args:
        rho0: Initial state (a raw matrix is validated first)
        p: Battery couplings (only used by the full generator)
        c: Charger drive
        mode: CHARGER_ONLY conjugates by the charging gate; FULL by
            exp(-i (H_B + H_c) t)
        t: Time

    Returns:
        rho(t) = U(t) rho0 U(t)^dagger

    Raises:
        InvalidStateError: If rho0 is not a valid density matrix
    """
    return Propagator(mode, p, c).apply(_as_state(rho0), t)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States on a strictly increasing time grid."""

    times: RealVector
    states: tuple[DensityMatrix, ...]

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise InvalidStateError(
                f"Trajectory has {len(self.times)} times but {len(self.states)} states"
            )
        if np.any(np.diff(self.times) <= 0.0):
            raise GridError("Trajectory times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.states)

    def matrices(self) -> np.ndarray:
        """Stacked (n, d, d) array of the state matrices."""
        return np.stack([s.matrix for s in self.states])


def time_grid(t_max: float, n_steps: int) -> RealVector:
    """Uniform grid of n_steps points over [0, t_max], endpoints included.

    Raises:
        GridError: If t_max <= 0 or n_steps < 2
    """
    if not (math.isfinite(t_max) and t_max > 0.0):
        raise GridError(f"grid.t_max must be > 0, got: {t_max}")
    if n_steps < 2:
        raise GridError(f"grid.n_steps must be at least 2, got: {n_steps}")
    times = np.linspace(0.0, t_max, n_steps)
    times.setflags(write=False)
    return times


def trajectory(
    rho0: DensityMatrix | npt.ArrayLike,
    p: BatteryParams,
    c: ChargerParams,
    mode: EvolutionMode,
    t_max: float,
    n_steps: int,
) -> Trajectory:
    """Evolve rho0 to every point of the uniform grid over [0, t_max].

    Raises:
        GridError: If t_max <= 0 or n_steps < 2
        InvalidStateError: If rho0 is not a valid density matrix
    """
    times = time_grid(t_max, n_steps)
    state = _as_state(rho0)
    propagator = Propagator(mode, p, c)
    logger.debug(f"Evolving {n_steps} points over [0, {t_max:g}] in {mode.value} mode")
    return Trajectory(times=times, states=tuple(propagator.apply(state, float(t)) for t in times))


def spectrum_drift(rho0: DensityMatrix, rho_t: DensityMatrix) -> float:
    """max |eig(rho_t) - eig(rho0)|; zero for unitary evolution."""
    return float(np.max(np.abs(rho_t.eigenvalues() - rho0.eigenvalues())))
