"""Gibbs initial state of the battery, closed form and matrix-exponential oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dipolarqb.exceptions import ConfigError
from dipolarqb.logging import get_logger
from dipolarqb.model import BatteryParams, battery_hamiltonian, closed_form_eigenvalues
from dipolarqb.operators import DensityMatrix, hermitian_eigen, hermitian_function, real_trace

logger = get_logger("thermal")


@dataclass(frozen=True)
class ThermalSpec:
    """Temperature T and inverse temperature beta = 1/T (k_B = 1).

    beta = 0 is the infinite-temperature limit (temperature = inf).
    """

    temperature: float
    beta: float

    def __post_init__(self):
        if not self.temperature > 0.0:
            raise ConfigError(f"thermal.temperature must be > 0, got: {self.temperature}")
        if not (math.isfinite(self.beta) and self.beta >= 0.0):
            raise ConfigError(f"thermal.beta must be finite and >= 0, got: {self.beta}")
        if not math.isclose(self.beta, 1.0 / self.temperature, rel_tol=1e-12, abs_tol=0.0):
            raise ConfigError(
                f"thermal.beta={self.beta} inconsistent with temperature={self.temperature}"
            )

    @classmethod
    def from_temperature(cls, temperature: float) -> "ThermalSpec":
        if not temperature > 0.0:
            raise ConfigError(f"thermal.temperature must be > 0, got: {temperature}")
        return cls(temperature=temperature, beta=1.0 / temperature)

    @classmethod
    def from_beta(cls, beta: float) -> "ThermalSpec":
        if beta == 0.0:
            return cls(temperature=math.inf, beta=0.0)
        return cls(temperature=1.0 / beta, beta=beta)


@dataclass(frozen=True, eq=False)
class ThermalState:
    """Gibbs state with its partition function.

    populations[i] = exp(-beta * energies[i]), so sum(populations) = Z.
    """

    rho: DensityMatrix
    partition_function: float
    populations: tuple[float, ...]
    energies: tuple[float, ...]


@dataclass(frozen=True)
class GibbsElements:
    """The six independent matrix elements of exp(-beta H_B).

    All values (and z) are scaled by exp(-shift) to keep them finite at low
    temperature; ratios such as rho11 / z are unaffected.
    """

    rho11: float
    rho22: float
    rho44: float
    rho14: float
    rho23: complex
    z: float
    shift: float


def _ratio(numerator: float, denominator: float) -> float:
    # denominator vanishes only when the numerator does (eta = 0 => B = eps = 0)
    return numerator / denominator if denominator != 0.0 else 0.0


def gibbs_elements(p: BatteryParams, spec: ThermalSpec) -> GibbsElements:
    """Evaluate the closed-form elements of rho(T).

    rho11 = e^{-b Delta/6} [cosh(eta b/2) - (B/eta) sinh(eta b/2)]
    rho22 = rho33 = e^{b Delta/6} cosh(chi b/6)
    rho44 = e^{-b Delta/6} [cosh(eta b/2) + (B/eta) sinh(eta b/2)]
    rho14 = -(eps/eta) e^{-b Delta/6} sinh(eta b/2)
    rho23 = ((Delta - 3iD)/chi) e^{b Delta/6} sinh(chi b/6)
    Z     = 2 e^{-Delta b/6} cosh(eta b/2) + 2 e^{Delta b/6} cosh(chi b/6)
    """
    beta = spec.beta
    eta, chi = p.eta, p.chi
    outer_a, outer_x = -beta * p.delta / 6.0, beta * eta / 2.0
    inner_a, inner_x = beta * p.delta / 6.0, beta * chi / 6.0
    shift = max(outer_a + outer_x, inner_a + inner_x)

    def cosh_sinh(a: float, x: float) -> tuple[float, float]:
        up = math.exp(a + x - shift)
        down = math.exp(a - x - shift)
        return 0.5 * (up + down), 0.5 * (up - down)

    c_out, s_out = cosh_sinh(outer_a, outer_x)
    c_in, s_in = cosh_sinh(inner_a, inner_x)

    b_over_eta = _ratio(p.field, eta)
    inner_phase = complex(p.delta, -3.0 * p.dm) / chi if chi != 0.0 else 0j

    return GibbsElements(
        rho11=c_out - b_over_eta * s_out,
        rho22=c_in,
        rho44=c_out + b_over_eta * s_out,
        rho14=-_ratio(p.epsilon, eta) * s_out,
        rho23=inner_phase * s_in,
        z=2.0 * c_out + 2.0 * c_in,
        shift=shift,
    )


def _partition_function(z_scaled: float, shift: float) -> float:
    try:
        return z_scaled * math.exp(shift)
    except OverflowError:
        return math.inf


def _weights(energies: tuple[float, ...], beta: float) -> tuple[float, ...]:
    weights = []
    for energy in energies:
        try:
            weights.append(math.exp(-beta * energy))
        except OverflowError:
            weights.append(math.inf)
    return tuple(weights)


def gibbs_closed_form(p: BatteryParams, spec: ThermalSpec) -> ThermalState:
    """Assemble rho(T) from the closed-form element list divided by Z."""
    el = gibbs_elements(p, spec)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = el.rho11
    rho[1, 1] = el.rho22
    rho[2, 2] = el.rho22
    rho[3, 3] = el.rho44
    rho[0, 3] = rho[3, 0] = el.rho14
    rho[1, 2] = el.rho23
    rho[2, 1] = el.rho23.conjugate()
    rho /= el.z

    energies = closed_form_eigenvalues(p)
    logger.debug(f"Closed-form Gibbs state at T={spec.temperature:g} (Z scaled={el.z:.6g})")
    return ThermalState(
        rho=DensityMatrix.from_array(rho),
        partition_function=_partition_function(el.z, el.shift),
        populations=_weights(energies, spec.beta),
        energies=energies,
    )


def gibbs_numeric(p: BatteryParams, spec: ThermalSpec) -> ThermalState:
    """exp(-beta H_B) / Tr[exp(-beta H_B)] through the eigendecomposition.

    The lowest eigenvalue is subtracted before exponentiating.
    """
    h = battery_hamiltonian(p)
    eig = hermitian_eigen(h)
    shift = float(eig.eigenvalues[0])
    beta = spec.beta

    unnormalized = hermitian_function(h, lambda x: np.exp(-beta * (x - shift)))
    z_scaled = real_trace(unnormalized, "Gibbs trace")

    energies = tuple(float(e) for e in eig.eigenvalues)
    return ThermalState(
        rho=DensityMatrix.from_array(unnormalized / z_scaled),
        partition_function=_partition_function(z_scaled, -beta * shift),
        populations=_weights(energies, beta),
        energies=energies,
    )
