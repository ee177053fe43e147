"""Shared parameter sets."""

import numpy as np
import pytest

from dipolarqb.model import BatteryParams, ChargerParams
from dipolarqb.thermal import ThermalSpec


@pytest.fixture
def figure_one_battery():
    """Delta = eps = 2, D = 1, B = 1."""
    return BatteryParams(delta=2.0, epsilon=2.0, dm=1.0, field=1.0)


@pytest.fixture
def unit_charger():
    return ChargerParams(omega=1.0)


@pytest.fixture
def cold():
    return ThermalSpec.from_temperature(0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
