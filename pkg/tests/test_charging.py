"""Tests for charging module."""

import math

import numpy as np
import pytest
import scipy.linalg

from dipolarqb.charging import (
    EvolutionMode,
    Propagator,
    UnitaryEntries,
    charging_unitary,
    evolve,
    generator_for,
    real_flip_charging_matrix,
    spectrum_drift,
    trajectory,
    unitarity_defect,
)
from dipolarqb.exceptions import ConfigError, GridError, InvalidStateError
from dipolarqb.model import ChargerParams, battery_hamiltonian, charging_hamiltonian
from dipolarqb.operators import PAULI_X, trace_distance, two_qubit
from dipolarqb.thermal import gibbs_closed_form


@pytest.fixture
def thermal_state(figure_one_battery, cold):
    return gibbs_closed_form(figure_one_battery, cold).rho


class TestUnitaryEntries:
    """Tests for UnitaryEntries."""

    def test_identities(self, unit_charger):
        for t in np.linspace(0.0, 7.0, 50):
            e = UnitaryEntries.at(unit_charger, float(t))
            assert e.r - e.q == pytest.approx(1.0, abs=1e-12)
            assert e.r + e.q == pytest.approx(math.cos(2.0 * t), abs=1e-12)
            assert e.s**2 == pytest.approx(-e.r * e.q, abs=1e-12)


class TestChargingUnitary:
    """Tests for charging_unitary."""

    def test_identity_at_zero(self, unit_charger):
        np.testing.assert_array_equal(charging_unitary(unit_charger, 0.0), np.eye(4))

    def test_quarter_period_is_double_flip(self, unit_charger):
        u = charging_unitary(unit_charger, math.pi / 2.0)
        np.testing.assert_allclose(u, -two_qubit(PAULI_X, PAULI_X), atol=1e-15)

    def test_matches_matrix_exponential(self, unit_charger):
        expected = scipy.linalg.expm(-1j * 0.7 * charging_hamiltonian(unit_charger))
        np.testing.assert_allclose(charging_unitary(unit_charger, 0.7), expected, atol=1e-12)

    def test_unitary_over_grid(self):
        c = ChargerParams(omega=1.3)
        h_c = charging_hamiltonian(c)
        for t in np.linspace(0.0, 2.0 * math.pi / c.omega, 200):
            u = charging_unitary(c, float(t))
            assert unitarity_defect(u) <= 1e-12
            assert np.max(np.abs(u - scipy.linalg.expm(-1j * t * h_c))) <= 1e-12

    def test_real_flip_matrix_is_not_unitary(self, unit_charger):
        e = UnitaryEntries.at(unit_charger, 0.7)
        m = real_flip_charging_matrix(unit_charger, 0.7)
        assert unitarity_defect(m) == pytest.approx(abs(2.0 * e.s * (e.r + e.q)), rel=1e-9)
        assert unitarity_defect(m) > 1e-3


class TestEvolutionMode:
    """Tests for EvolutionMode parsing and generators."""

    def test_parse(self):
        assert EvolutionMode.parse("Full") is EvolutionMode.FULL
        assert EvolutionMode.parse("charger-only") is EvolutionMode.CHARGER_ONLY

    def test_parse_invalid_raises(self):
        with pytest.raises(ConfigError) as exc_info:
            EvolutionMode.parse("adiabatic")
        assert "run.mode" in str(exc_info.value)

    def test_full_generator(self, figure_one_battery, unit_charger):
        g = generator_for(EvolutionMode.FULL, figure_one_battery, unit_charger)
        expected = battery_hamiltonian(figure_one_battery) + charging_hamiltonian(unit_charger)
        np.testing.assert_array_equal(g, expected)


class TestEvolve:
    """Tests for evolve function."""

    @pytest.mark.parametrize("mode", list(EvolutionMode))
    def test_zero_time_returns_initial_state(self, thermal_state, figure_one_battery, unit_charger, mode):
        rho = evolve(thermal_state, figure_one_battery, unit_charger, mode, 0.0)
        np.testing.assert_array_equal(rho.matrix, thermal_state.matrix)

    def test_charger_only_period(self, thermal_state, figure_one_battery, unit_charger):
        rho = evolve(thermal_state, figure_one_battery, unit_charger, EvolutionMode.CHARGER_ONLY, math.pi)
        np.testing.assert_allclose(rho.matrix, thermal_state.matrix, atol=1e-10)

    @pytest.mark.parametrize("mode", list(EvolutionMode))
    def test_spectrum_preserved(self, thermal_state, figure_one_battery, unit_charger, mode):
        for t in (0.3, 1.7, 4.2):
            rho = evolve(thermal_state, figure_one_battery, unit_charger, mode, t)
            assert spectrum_drift(thermal_state, rho) <= 1e-10
            assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-10)

    def test_full_mode_matches_expm(self, thermal_state, figure_one_battery, unit_charger):
        g = generator_for(EvolutionMode.FULL, figure_one_battery, unit_charger)
        u = scipy.linalg.expm(-1j * 0.9 * g)
        expected = u @ thermal_state.matrix @ u.conj().T
        rho = evolve(thermal_state, figure_one_battery, unit_charger, EvolutionMode.FULL, 0.9)
        np.testing.assert_allclose(rho.matrix, expected, atol=1e-12)

    def test_modes_differ(self, thermal_state, figure_one_battery, unit_charger):
        only = evolve(thermal_state, figure_one_battery, unit_charger, EvolutionMode.CHARGER_ONLY, 0.4)
        full = evolve(thermal_state, figure_one_battery, unit_charger, EvolutionMode.FULL, 0.4)
        assert trace_distance(only.matrix, full.matrix) > 1e-6

    def test_raw_matrix_is_validated(self, figure_one_battery, unit_charger):
        with pytest.raises(InvalidStateError):
            evolve(np.eye(4), figure_one_battery, unit_charger, EvolutionMode.FULL, 1.0)

    def test_propagator_reuse(self, thermal_state, figure_one_battery, unit_charger):
        propagator = Propagator(EvolutionMode.FULL, figure_one_battery, unit_charger)
        direct = evolve(thermal_state, figure_one_battery, unit_charger, EvolutionMode.FULL, 2.5)
        np.testing.assert_allclose(propagator.apply(thermal_state, 2.5).matrix, direct.matrix, atol=1e-14)


class TestTrajectory:
    """Tests for trajectory function."""

    def test_endpoints_only(self, thermal_state, figure_one_battery, unit_charger):
        traj = trajectory(thermal_state, figure_one_battery, unit_charger, EvolutionMode.CHARGER_ONLY, 3.0, 2)
        np.testing.assert_array_equal(traj.times, [0.0, 3.0])
        assert len(traj) == 2

    def test_period_grid(self, thermal_state, figure_one_battery, unit_charger):
        traj = trajectory(thermal_state, figure_one_battery, unit_charger, EvolutionMode.CHARGER_ONLY, math.pi, 101)
        np.testing.assert_allclose(traj.states[0].matrix, traj.states[-1].matrix, atol=1e-10)

    def test_figure_one_grid_is_physical(self, thermal_state, figure_one_battery, unit_charger):
        traj = trajectory(thermal_state, figure_one_battery, unit_charger, EvolutionMode.CHARGER_ONLY, 10.0, 1001)
        assert len(traj) == 1001
        assert traj.matrices().shape == (1001, 4, 4)
        assert min(s.eigenvalues()[0] for s in traj.states) >= -1e-10

    @pytest.mark.parametrize("t_max,n_steps", [(0.0, 10), (-1.0, 10), (1.0, 1)])
    def test_bad_grid_raises(self, thermal_state, figure_one_battery, unit_charger, t_max, n_steps):
        with pytest.raises(GridError):
            trajectory(thermal_state, figure_one_battery, unit_charger, EvolutionMode.FULL, t_max, n_steps)
