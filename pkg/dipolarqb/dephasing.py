"""Battery-charger dynamics under pure dephasing.

Three views of the same process are provided and cross-checked:

    * the full 4x4 Lindblad equation with sigma_z dissipators on both qubits
    * the reduced (u, v) equations on the single-excitation sector {|01>, |10>}
    * the closed-form damped-Rabi solution of those equations

Qubit 1 is the battery, qubit 2 the charger. u is the population of |01>
(charger excited, battery empty); the scenarios start from u = 1, v = 0.
(u, v) are read in the gauge where the |01>-|10> coupling is real positive.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt

from dipolarqb.charging import Trajectory, time_grid
from dipolarqb.constants import TOL
from dipolarqb.exceptions import ConfigError, InvalidStateError, StepTooLargeError
from dipolarqb.logging import get_logger
from dipolarqb.model import BatteryParams, battery_hamiltonian
from dipolarqb.operators import (
    IDENTITY2,
    PAULI_Z,
    ComplexMatrix,
    DensityMatrix,
    RealVector,
    two_qubit,
)

logger = get_logger("dephasing")

# Largest RK4 step is STEP_FACTOR / max(rates..., 1).
STEP_FACTOR = 0.01

SINGLE_EXCITATION = (1, 2)


class RateConvention(str, Enum):
    """How the coherence damping rate relates to Gamma_phi = gamma_b + gamma_c.

    SUBSPACE damps v at Gamma_phi, as in the reduced equations;
    LINDBLAD damps at 2 Gamma_phi, which is what the sigma_z dissipator
    produces on the |01><10| coherence.
    """

    SUBSPACE = "subspace"
    LINDBLAD = "lindblad"

    @classmethod
    def _missing_(cls, value):
        # "paper" is the CLI spelling of SUBSPACE
        if value == "paper":
            return cls.SUBSPACE
        return None

    @classmethod
    def parse(cls, value: str) -> "RateConvention":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ConfigError(
                f"Invalid dephasing.rate_convention: {value}. "
                "Must be 'paper', 'subspace' or 'lindblad'"
            )


@dataclass(frozen=True)
class DephasingParams:
    """Dephasing rates of battery and charger and the qubit level spacing omega0."""

    gamma_b: float
    gamma_c: float
    omega0: float = 1.0
    rate_convention: RateConvention = RateConvention.SUBSPACE

    def __post_init__(self):
        for name in ("gamma_b", "gamma_c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ConfigError(f"dephasing.{name} must be a finite rate >= 0, got: {value}")
        if not math.isfinite(self.omega0):
            raise ConfigError(f"dephasing.omega0 must be finite, got: {self.omega0}")

    @classmethod
    def from_gamma_phi(
        cls,
        gamma_phi: float,
        omega0: float = 1.0,
        rate_convention: RateConvention = RateConvention.SUBSPACE,
    ) -> "DephasingParams":
        """Split Gamma_phi equally between battery and charger."""
        return cls(
            gamma_b=0.5 * gamma_phi,
            gamma_c=0.5 * gamma_phi,
            omega0=omega0,
            rate_convention=rate_convention,
        )

    @property
    def gamma_phi(self) -> float:
        return self.gamma_b + self.gamma_c

    @property
    def damping_rate(self) -> float:
        """Decay rate g of v in v' = -i kappa (1 - 2u) - g v."""
        if self.rate_convention is RateConvention.LINDBLAD:
            return 2.0 * self.gamma_phi
        return self.gamma_phi

    def with_convention(self, convention: RateConvention) -> "DephasingParams":
        return DephasingParams(self.gamma_b, self.gamma_c, self.omega0, convention)


@dataclass(frozen=True)
class DephasingDerived:
    """Effective coupling kappa and the damped frequency omega.

    omega = sqrt((2 kappa)^2 - (g/2)^2) is purely imaginary when overdamped.
    """

    kappa: float
    omega: complex
    damping_rate: float

    @property
    def overdamped(self) -> bool:
        return self.omega.real == 0.0 and self.omega.imag > 0.0

    @property
    def critical(self) -> bool:
        return self.omega == 0.0


def effective_coupling(p: BatteryParams, dp: DephasingParams | None = None) -> DephasingDerived:
    """kappa = sqrt(Delta^2 + 9 D^2)/6 and omega for the damping rate of dp (0 if None)."""
    kappa = p.chi / 6.0
    g = dp.damping_rate if dp is not None else 0.0
    two_kappa, half_g = 2.0 * kappa, 0.5 * g
    if math.isclose(two_kappa, half_g, rel_tol=1e-12, abs_tol=0.0):
        omega = 0j
    else:
        omega = cmath.sqrt(two_kappa**2 - half_g**2)
    return DephasingDerived(kappa=kappa, omega=complex(omega), damping_rate=g)


@dataclass(frozen=True)
class SubspaceState:
    """Single-excitation block [[u, v], [v*, 1 - u]]."""

    u: float
    v: complex

    @property
    def z(self) -> float:
        """Population imbalance 2u - 1."""
        return 2.0 * self.u - 1.0

    def physicality_defect(self) -> float:
        """How far the block is from satisfying 0 <= u <= 1 and |v|^2 <= u (1 - u)."""
        return max(
            -self.u,
            self.u - 1.0,
            abs(self.v) ** 2 - self.u * (1.0 - self.u),
            0.0,
        )


def subspace_rhs(s: SubspaceState, d: DephasingDerived, dp: DephasingParams) -> tuple[float, complex]:
    """(u', v') with u' = -2 kappa Im v and v' = -i kappa (1 - 2u) - g v.

    g is the damping rate of the chosen convention. z = 2u - 1 then obeys
    z'' + g z' + (2 kappa)^2 z = 0.
    """
    du = -2.0 * d.kappa * s.v.imag
    dv = -1j * d.kappa * (1.0 - 2.0 * s.u) - dp.damping_rate * s.v
    return du, dv


def _require_step(h: float, *rates: float) -> None:
    limit = STEP_FACTOR / max(*rates, 1.0)
    if h > limit * (1.0 + 1e-12):
        raise StepTooLargeError(
            f"Step {h:.4g} exceeds stability bound {limit:.4g}; raise grid.n_steps"
        )


@dataclass(frozen=True, eq=False)
class SubspaceTrajectory:
    """(u, v) sampled on the time grid."""

    times: RealVector
    u: RealVector
    v: npt.NDArray[np.complex128]

    @property
    def z(self) -> RealVector:
        return 2.0 * self.u - 1.0

    def state(self, k: int) -> SubspaceState:
        return SubspaceState(u=float(self.u[k]), v=complex(self.v[k]))


def integrate_subspace(
    s0: SubspaceState,
    d: DephasingDerived,
    dp: DephasingParams,
    t_max: float,
    n_steps: int,
) -> SubspaceTrajectory:
    """Fixed-step RK4 over the reduced equations.

    Args:
        s0: Initial block
        d: Effective coupling
        dp: Dephasing parameters (only the damping rate is used)
        t_max: Final time
        n_steps: Number of grid points including both endpoints

    Raises:
        GridError: If t_max <= 0 or n_steps < 2
        StepTooLargeError: If the step exceeds 0.01 / max(kappa, g, 1)
        InvalidStateError: If the block leaves the physical region by more than 1e-8
    """
    times = time_grid(t_max, n_steps)
    h = float(times[1] - times[0])
    _require_step(h, d.kappa, dp.damping_rate)

    u = np.empty(n_steps)
    v = np.empty(n_steps, dtype=complex)
    u[0], v[0] = s0.u, s0.v

    def rhs(uu: float, vv: complex) -> tuple[float, complex]:
        return subspace_rhs(SubspaceState(uu, vv), d, dp)

    for k in range(n_steps - 1):
        uk, vk = u[k], v[k]
        k1u, k1v = rhs(uk, vk)
        k2u, k2v = rhs(uk + 0.5 * h * k1u, vk + 0.5 * h * k1v)
        k3u, k3v = rhs(uk + 0.5 * h * k2u, vk + 0.5 * h * k2v)
        k4u, k4v = rhs(uk + h * k3u, vk + h * k3v)
        u[k + 1] = uk + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v[k + 1] = vk + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

        defect = SubspaceState(float(u[k + 1]), complex(v[k + 1])).physicality_defect()
        if defect > TOL.integration:
            raise InvalidStateError(
                f"Subspace state unphysical at t={times[k + 1]:.6g} (defect {defect:.3e})"
            )

    u.setflags(write=False)
    v.setflags(write=False)
    return SubspaceTrajectory(times=times, u=u, v=v)


def _envelope_terms(t: RealVector, d: DephasingDerived) -> tuple[RealVector, RealVector, RealVector]:
    """Return (decay, oscillating part, sin(omega t)/omega) for u0 = 1, v0 = 0.

    Overdamped: cos -> cosh, sin -> sinh with sqrt((g/2)^2 - (2 kappa)^2).
    Critical: sin(omega t)/omega -> t.
    """
    a = 0.5 * d.damping_rate
    decay = np.exp(-a * t)
    if d.critical:
        return decay, np.ones_like(t), t
    if d.overdamped:
        w = d.omega.imag
        return decay, np.cosh(w * t), np.sinh(w * t) / w
    w = d.omega.real
    return decay, np.cos(w * t), np.sin(w * t) / w


def _scalar_or_array(t: npt.ArrayLike, values: np.ndarray) -> float | RealVector:
    return float(values) if np.ndim(t) == 0 else values


def closed_form_z(t: npt.ArrayLike, d: DephasingDerived) -> float | RealVector:
    """z(t) = e^{-g t/2} [cos(omega t) + (g/2 omega) sin(omega t)], z(0) = 1, z'(0) = 0."""
    times = np.asarray(t, dtype=float)
    decay, osc, sinc = _envelope_terms(times, d)
    z = decay * (osc + 0.5 * d.damping_rate * sinc)
    return _scalar_or_array(t, z)


def closed_form_coherence(t: npt.ArrayLike, d: DephasingDerived) -> float | RealVector:
    """Im v(t) = kappa e^{-g t/2} sin(omega t)/omega; Re v stays 0."""
    times = np.asarray(t, dtype=float)
    decay, _, sinc = _envelope_terms(times, d)
    return _scalar_or_array(t, d.kappa * decay * sinc)


def closed_form_ergotropy(t: npt.ArrayLike, d: DephasingDerived) -> float | RealVector:
    """Damped Rabi ergotropy.

    W(t) = kappa e^{-g t/2} sqrt[(cos wt + (g/2w) sin wt)^2 + (2 kappa/w)^2 sin^2 wt]

    Returns:
        W at each t; W(0) = kappa, and W = kappa for all t when g = 0
    """
    times = np.asarray(t, dtype=float)
    decay, osc, sinc = _envelope_terms(times, d)
    bracket = osc + 0.5 * d.damping_rate * sinc
    w = d.kappa * decay * np.sqrt(bracket**2 + (2.0 * d.kappa * sinc) ** 2)
    return _scalar_or_array(t, w)


def envelope_bound(t: npt.ArrayLike, d: DephasingDerived) -> float | RealVector:
    """kappa e^{-g t/2} sqrt(1 + (g/2w)^2 + (2 kappa/w)^2); underdamped only."""
    times = np.asarray(t, dtype=float)
    w = d.omega.real
    factor = math.sqrt(1.0 + (0.5 * d.damping_rate / w) ** 2 + (2.0 * d.kappa / w) ** 2)
    return _scalar_or_array(t, d.kappa * np.exp(-0.5 * d.damping_rate * times) * factor)


def ergotropy_power(times: RealVector, work: RealVector) -> RealVector:
    """P = dW/dt on the grid (second-order differences, one-sided at the ends)."""
    return np.gradient(work, times, edge_order=2)


def subspace_ergotropy(s: SubspaceState, kappa: float) -> float:
    """kappa * sqrt(z^2 + 4 |v|^2), the Bloch-vector form of the closed-form W."""
    return kappa * math.sqrt(s.z**2 + 4.0 * abs(s.v) ** 2)


def system_hamiltonian(p: BatteryParams, dp: DephasingParams) -> ComplexMatrix:
    """Battery-charger Hamiltonian: dipolar + DM couplings with omega0 (S_B^z + S_C^z)."""
    return battery_hamiltonian(p.replace(field=dp.omega0))


def _coupling_gauge(h: ComplexMatrix) -> tuple[float, complex]:
    coupling = complex(h[SINGLE_EXCITATION])
    kappa = abs(coupling)
    phase = coupling.conjugate() / kappa if kappa > 0.0 else 1.0 + 0j
    return kappa, phase


def subspace_block(rho: DensityMatrix | npt.ArrayLike, p: BatteryParams) -> SubspaceState:
    """Read (u, v) off a 4x4 state: u = <01|rho|01>, v = <01|rho|10> times the gauge phase."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    _, phase = _coupling_gauge(battery_hamiltonian(p))
    i, j = SINGLE_EXCITATION
    return SubspaceState(u=float(m[i, i].real), v=complex(m[i, j]) * phase)


def single_excitation_state(p: BatteryParams, s: SubspaceState) -> DensityMatrix:
    """Embed a (u, v) block (in the real-coupling gauge) into a 4x4 state."""
    _, phase = _coupling_gauge(battery_hamiltonian(p))
    m = np.zeros((4, 4), dtype=complex)
    i, j = SINGLE_EXCITATION
    m[i, i] = s.u
    m[j, j] = 1.0 - s.u
    m[i, j] = s.v / phase
    m[j, i] = m[i, j].conjugate()
    return DensityMatrix.from_array(m)


def lindblad_rhs(
    rho: ComplexMatrix, h: ComplexMatrix, dp: DephasingParams
) -> ComplexMatrix:
    """-i[H, rho] + sum_q gamma_q (Z_q rho Z_q - rho)."""
    z_b = two_qubit(PAULI_Z, IDENTITY2)
    z_c = two_qubit(IDENTITY2, PAULI_Z)
    out = -1j * (h @ rho - rho @ h)
    out += dp.gamma_b * (z_b @ rho @ z_b - rho)
    out += dp.gamma_c * (z_c @ rho @ z_c - rho)
    return out


def integrate_lindblad(
    rho0: DensityMatrix,
    p: BatteryParams,
    dp: DephasingParams,
    t_max: float,
    n_steps: int,
) -> Trajectory:
    """Fixed-step RK4 integration of the dephasing master equation.

    The sigma_z dissipator is always used; the rate convention of dp only
    affects the reduced equations.

    Raises:
        GridError: If t_max <= 0 or n_steps < 2
        StepTooLargeError: If the step exceeds 0.01 / max(kappa, 2 Gamma_phi, |H|, 1)
        InvalidStateError: If trace or Hermiticity drift beyond 1e-8
    """
    times = time_grid(t_max, n_steps)
    step = float(times[1] - times[0])
    h = system_hamiltonian(p, dp)
    spectral_radius = float(np.max(np.abs(np.linalg.eigvalsh(h))))
    _require_step(step, p.chi / 6.0, 2.0 * dp.gamma_phi, spectral_radius)

    logger.debug(
        f"Lindblad RK4: {n_steps} points, gamma_b={dp.gamma_b:g}, gamma_c={dp.gamma_c:g}"
    )
    states = [rho0]
    rho = rho0.matrix.copy()
    for k in range(n_steps - 1):
        k1 = lindblad_rhs(rho, h, dp)
        k2 = lindblad_rhs(rho + 0.5 * step * k1, h, dp)
        k3 = lindblad_rhs(rho + 0.5 * step * k2, h, dp)
        k4 = lindblad_rhs(rho + step * k3, h, dp)
        rho = rho + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        states.append(
            DensityMatrix.from_array(
                rho, trace_tol=TOL.integration, hermitian_tol=TOL.integration
            )
        )
    return Trajectory(times=times, states=tuple(states))


def fit_damping_rate(traj: Trajectory, p: BatteryParams) -> float:
    """Least-squares rate g in v' + i kappa (1 - 2u) = -g v along a 4x4 trajectory.

    v' is taken by second-order finite differences on the grid.
    """
    blocks = [subspace_block(s, p) for s in traj.states]
    u = np.array([b.u for b in blocks])
    v = np.array([b.v for b in blocks])
    kappa, _ = _coupling_gauge(battery_hamiltonian(p))
    dv = np.gradient(v, traj.times, edge_order=2)
    residual = dv + 1j * kappa * (1.0 - 2.0 * u)
    weight = float(np.sum(np.abs(v) ** 2))
    if weight == 0.0:
        raise InvalidStateError("Coherence vanishes on the whole trajectory; rate undefined")
    return -float(np.sum((v.conj() * residual).real)) / weight
