"""Tests for thermal module."""

import math

import numpy as np
import pytest
import scipy.linalg

from dipolarqb.exceptions import ConfigError
from dipolarqb.metrics import l1_coherence
from dipolarqb.model import BatteryParams, battery_hamiltonian
from dipolarqb.operators import ground_state_projector, trace_distance
from dipolarqb.thermal import ThermalSpec, gibbs_closed_form, gibbs_elements, gibbs_numeric


class TestThermalSpec:
    """Tests for ThermalSpec."""

    def test_from_temperature(self):
        spec = ThermalSpec.from_temperature(0.5)
        assert spec.beta == 2.0

    def test_infinite_temperature(self):
        spec = ThermalSpec.from_beta(0.0)
        assert spec.temperature == math.inf

    @pytest.mark.parametrize("temperature", [0.0, -1.0])
    def test_non_positive_temperature_raises(self, temperature):
        with pytest.raises(ConfigError) as exc_info:
            ThermalSpec.from_temperature(temperature)
        assert "thermal.temperature" in str(exc_info.value)

    def test_inconsistent_beta_raises(self):
        with pytest.raises(ConfigError):
            ThermalSpec(temperature=1.0, beta=2.0)


class TestGibbsClosedForm:
    """Tests for gibbs_closed_form against the numeric exponential."""

    def test_matches_numeric_over_random_draws(self, rng):
        for _ in range(1000):
            delta, epsilon, dm, field = rng.uniform(-5.0, 5.0, size=4)
            p = BatteryParams(float(delta), float(epsilon), float(dm), float(field))
            spec = ThermalSpec.from_temperature(float(rng.uniform(0.1, 10.0)))
            closed = gibbs_closed_form(p, spec).rho.matrix
            numeric = gibbs_numeric(p, spec).rho.matrix
            assert np.max(np.abs(closed - numeric)) <= 1e-10

    def test_matches_scipy_expm(self, figure_one_battery, cold):
        expected = scipy.linalg.expm(-cold.beta * battery_hamiltonian(figure_one_battery))
        expected /= np.trace(expected)
        closed = gibbs_closed_form(figure_one_battery, cold).rho.matrix
        np.testing.assert_allclose(closed, expected, atol=1e-10)

    def test_corner_element_is_negative(self, figure_one_battery, cold):
        # the closed-form minus sign on rho_14 is the realized one for eps > 0
        numeric = gibbs_numeric(figure_one_battery, cold).rho.matrix
        assert numeric[0, 3].real < 0.0
        assert gibbs_elements(figure_one_battery, cold).rho14 < 0.0

    def test_structural_zeros(self, figure_one_battery, cold):
        rho = gibbs_closed_form(figure_one_battery, cold).rho.matrix
        for i, j in [(0, 1), (0, 2), (1, 3), (2, 3)]:
            assert rho[i, j] == 0.0
        assert rho[1, 1] == rho[2, 2]

    def test_partition_function(self, figure_one_battery, cold):
        state = gibbs_closed_form(figure_one_battery, cold)
        z = np.trace(scipy.linalg.expm(-cold.beta * battery_hamiltonian(figure_one_battery))).real
        assert state.partition_function == pytest.approx(z, rel=1e-12)
        assert sum(state.populations) / state.partition_function == pytest.approx(1.0, abs=1e-12)

    def test_field_and_dipolar_free_limit(self, cold):
        p = BatteryParams(delta=2.0, epsilon=0.0, dm=1.0, field=0.0)
        closed = gibbs_closed_form(p, cold).rho.matrix
        numeric = gibbs_numeric(p, cold).rho.matrix
        assert np.max(np.abs(closed - numeric)) <= 1e-12

    def test_thermal_coherence(self, figure_one_battery, cold):
        el = gibbs_elements(figure_one_battery, cold)
        rho = gibbs_closed_form(figure_one_battery, cold).rho
        expected = (2.0 * abs(el.rho14) + 2.0 * abs(el.rho23)) / (3.0 * el.z)
        assert l1_coherence(rho) == pytest.approx(expected, rel=1e-12)

    def test_coherences_shrink_with_temperature(self, figure_one_battery):
        corners, inners = [], []
        for temperature in (0.5, 1.0, 1.5, 2.0):
            rho = gibbs_closed_form(figure_one_battery, ThermalSpec.from_temperature(temperature))
            corners.append(abs(rho.rho.matrix[0, 3]))
            inners.append(abs(rho.rho.matrix[1, 2]))
        assert all(a > b for a, b in zip(corners, corners[1:]))
        assert all(a > b for a, b in zip(inners, inners[1:]))


class TestGibbsNumeric:
    """Tests for gibbs_numeric limits."""

    def test_infinite_temperature_is_maximally_mixed(self, figure_one_battery):
        rho = gibbs_numeric(figure_one_battery, ThermalSpec.from_beta(0.0)).rho.matrix
        np.testing.assert_allclose(rho, np.eye(4) / 4, atol=1e-12)

    def test_closed_form_infinite_temperature(self, figure_one_battery):
        rho = gibbs_closed_form(figure_one_battery, ThermalSpec.from_beta(0.0)).rho.matrix
        np.testing.assert_allclose(rho, np.eye(4) / 4, atol=1e-15)

    def test_low_temperature_is_ground_state(self, figure_one_battery):
        rho = gibbs_numeric(figure_one_battery, ThermalSpec.from_beta(200.0)).rho.matrix
        projector = ground_state_projector(battery_hamiltonian(figure_one_battery))
        assert trace_distance(rho, projector) <= 1e-10

    def test_large_beta_stays_finite(self, figure_one_battery):
        state = gibbs_closed_form(figure_one_battery, ThermalSpec.from_beta(5000.0))
        assert np.all(np.isfinite(state.rho.matrix))
