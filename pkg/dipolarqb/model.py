"""Battery and charger Hamiltonians and the closed-form battery spectrum.

Basis order is (|00>, |01>, |10>, |11>) everywhere; hbar = k_B = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dipolarqb.exceptions import ConfigError, DegenerateClosedFormError
from dipolarqb.operators import IDENTITY2, PAULI_X, ComplexMatrix, two_qubit


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be a finite real number, got: {value}")


@dataclass(frozen=True)
class BatteryParams:
    """Couplings of the dipolar battery: Delta, eps (dipolar), D (DM, z) and B (field, z)."""

    delta: float
    epsilon: float
    dm: float
    field: float

    def __post_init__(self):
        for name in ("delta", "epsilon", "dm", "field"):
            _require_finite(f"battery.{name}", getattr(self, name))

    @property
    def eta(self) -> float:
        return math.hypot(self.field, self.epsilon)

    @property
    def chi(self) -> float:
        return math.hypot(self.delta, 3.0 * self.dm)

    def dipolar_tensor(self) -> np.ndarray:
        """Traceless diagonal tensor diag(Delta - 3 eps, Delta + 3 eps, -2 Delta)."""
        return np.diag(
            [self.delta - 3.0 * self.epsilon, self.delta + 3.0 * self.epsilon, -2.0 * self.delta]
        )

    def replace(self, **changes: float) -> "BatteryParams":
        values = {
            "delta": self.delta,
            "epsilon": self.epsilon,
            "dm": self.dm,
            "field": self.field,
        }
        values.update(changes)
        return BatteryParams(**values)


@dataclass(frozen=True)
class ChargerParams:
    """Drive strength Omega of the charging field."""

    omega: float

    def __post_init__(self):
        _require_finite("charger.omega", self.omega)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Closed-form spectrum of the battery Hamiltonian.

    Eigenvalues and eigenvector columns follow the labels phi_1..phi_4
    (not sorted). lambda_norm_plus/minus hold the normalization expression
    in closed form; the stored eigenvectors are normalized numerically.
    """

    eta: float
    chi: float
    eigenvalues: tuple[float, float, float, float]
    eigenvectors: ComplexMatrix
    gamma_plus: float
    gamma_minus: float
    lambda_norm_plus: complex
    lambda_norm_minus: complex

    def reconstruct(self) -> ComplexMatrix:
        """Sum_i lambda_i |phi_i><phi_i|."""
        v = self.eigenvectors
        return (v * np.asarray(self.eigenvalues)) @ v.conj().T

    @property
    def ground_energy(self) -> float:
        return min(self.eigenvalues)


def battery_hamiltonian(p: BatteryParams) -> ComplexMatrix:
    """Battery Hamiltonian in the computational basis.

    Block diagonal in {|00>, |11>} + {|01>, |10>}.
    """
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = (p.delta + 3.0 * p.field) / 6.0
    h[1, 1] = -p.delta / 6.0
    h[2, 2] = -p.delta / 6.0
    h[3, 3] = (p.delta - 3.0 * p.field) / 6.0
    h[0, 3] = h[3, 0] = p.epsilon / 2.0
    h[1, 2] = -p.delta / 6.0 + 0.5j * p.dm
    h[2, 1] = -p.delta / 6.0 - 0.5j * p.dm
    return h


def charging_hamiltonian(c: ChargerParams) -> ComplexMatrix:
    """Omega (sigma_x x 1 + 1 x sigma_x)."""
    return c.omega * (two_qubit(PAULI_X, IDENTITY2) + two_qubit(IDENTITY2, PAULI_X))


def closed_form_eigenvalues(p: BatteryParams) -> tuple[float, float, float, float]:
    """(lambda_1, lambda_2, lambda_3, lambda_4); valid for every parameter set."""
    eta, chi = p.eta, p.chi
    return (
        (p.delta + 3.0 * eta) / 6.0,
        (-p.delta + chi) / 6.0,
        (-p.delta - chi) / 6.0,
        (p.delta - 3.0 * eta) / 6.0,
    )


def inner_amplitude_ratio(p: BatteryParams) -> complex:
    """<01|phi_2> / <10|phi_2> solving the eigen-equation of the inner block.

    Equals (3iD - Delta)/chi; |phi_3> uses its negative.
    """
    return complex(-p.delta, 3.0 * p.dm) / p.chi


def naive_inner_amplitude_ratio(p: BatteryParams) -> complex:
    """The uncorrected ratio chi/(6iD - Delta); agrees with inner_amplitude_ratio only at D = 0."""
    return p.chi / complex(-p.delta, 6.0 * p.dm)


def _normalized(vector: list[complex]) -> np.ndarray:
    v = np.asarray(vector, dtype=complex)
    return v / np.linalg.norm(v)


def closed_form_spectrum(p: BatteryParams) -> Spectrum:
    """Closed-form eigenvalues, eigenvectors and normalization constants.

    Raises:
        DegenerateClosedFormError: If eps = 0 or chi = 0 (amplitude ratios
            undefined); the exception carries the eigenvalues
    """
    eigenvalues = closed_form_eigenvalues(p)
    eta, chi = p.eta, p.chi
    if p.epsilon == 0.0 or chi == 0.0:
        raise DegenerateClosedFormError(
            f"Closed-form eigenvectors undefined for epsilon={p.epsilon}, chi={chi}",
            eigenvalues,
        )

    # (B + eta)(eta - B) = eps^2; take the form without cancellation
    if p.field >= 0.0:
        outer_plus = (p.field + eta) / p.epsilon
        outer_minus = -p.epsilon / (p.field + eta)
    else:
        outer_plus = p.epsilon / (eta - p.field)
        outer_minus = (p.field - eta) / p.epsilon
    inner = inner_amplitude_ratio(p)

    vectors = np.column_stack(
        [
            _normalized([outer_plus, 0, 0, 1]),
            _normalized([0, inner, 1, 0]),
            _normalized([0, -inner, 1, 0]),
            _normalized([outer_minus, 0, 0, 1]),
        ]
    )
    vectors.setflags(write=False)

    denominator = complex(-p.delta, 3.0 * p.dm)
    return Spectrum(
        eta=eta,
        chi=chi,
        eigenvalues=eigenvalues,
        eigenvectors=vectors,
        gamma_plus=(1.0 + outer_plus**2) ** -0.5,
        gamma_minus=(1.0 + outer_minus**2) ** -0.5,
        lambda_norm_plus=(1.0 + (p.delta**2 + 9.0 * p.dm**2) / denominator) ** -0.5,
        lambda_norm_minus=(1.0 + (p.delta**2 - 9.0 * p.dm**2) / denominator) ** -0.5,
    )


def naive_inner_eigenvector_residual(p: BatteryParams) -> float:
    """|H v - lambda_2 v| for the normalized vector built from the naive ratio."""
    v = _normalized([0, naive_inner_amplitude_ratio(p), 1, 0])
    lam = closed_form_eigenvalues(p)[1]
    return float(np.linalg.norm(battery_hamiltonian(p) @ v - lam * v))
