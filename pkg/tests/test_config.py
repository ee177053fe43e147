"""Tests for configuration module."""

import os
from unittest import mock

import pytest

from dipolarqb.charging import EvolutionMode
from dipolarqb.config import (
    DEFAULTS,
    GridSpec,
    _get_int_env,
    build_run_config,
    build_sweep_config,
    get_log_json,
    get_log_level,
    get_thread_cap,
    load_settings,
    parse_config_text,
    parse_override,
    preset_names,
    read_config_source,
)
from dipolarqb.dephasing import RateConvention
from dipolarqb.exceptions import ConfigError


class TestGetIntEnv:
    """Tests for _get_int_env function."""

    def test_returns_int_when_valid(self):
        with mock.patch.dict(os.environ, {"INT_VAR": "42"}):
            assert _get_int_env("INT_VAR") == 42

    def test_returns_default_when_missing(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            assert _get_int_env("MISSING_INT", default=10) == 10

    def test_raises_when_invalid(self):
        with mock.patch.dict(os.environ, {"INVALID_INT": "not_a_number"}):
            with pytest.raises(ConfigError) as exc_info:
                _get_int_env("INVALID_INT")
            assert "must be an integer" in str(exc_info.value)


class TestEnvironmentSettings:
    """Tests for LOG_LEVEL, QB_LOG_JSON and QB_THREADS."""

    def test_log_level_default(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            assert get_log_level() == "INFO"

    def test_log_level_override_wins(self):
        with mock.patch.dict(os.environ, {"LOG_LEVEL": "WARNING"}):
            assert get_log_level("debug") == "DEBUG"

    def test_invalid_log_level_raises(self):
        with mock.patch.dict(os.environ, {"LOG_LEVEL": "LOUD"}):
            with pytest.raises(ConfigError) as exc_info:
                get_log_level()
            assert "LOG_LEVEL" in str(exc_info.value)

    def test_log_json(self):
        with mock.patch.dict(os.environ, {"QB_LOG_JSON": "1"}):
            assert get_log_json() is True
        with mock.patch.dict(os.environ, {}, clear=True):
            assert get_log_json() is False

    def test_thread_cap_default_is_one_per_job(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            assert get_thread_cap(4) == 4
            assert get_thread_cap(0) == 1

    def test_thread_cap_from_env(self):
        with mock.patch.dict(os.environ, {"QB_THREADS": "2"}):
            assert get_thread_cap(4) == 2
            assert get_thread_cap(1) == 1

    def test_thread_cap_must_be_positive(self):
        with mock.patch.dict(os.environ, {"QB_THREADS": "0"}):
            with pytest.raises(ConfigError) as exc_info:
                get_thread_cap(4)
            assert "QB_THREADS" in str(exc_info.value)


class TestParseConfigText:
    """Tests for parse_config_text and parse_override."""

    def test_parses_comments_and_blank_lines(self):
        text = "# header\n\nbattery.delta = 3  # inline\nsweep.values = 1, 2\n"
        assert parse_config_text(text) == {"battery.delta": "3", "sweep.values": "1, 2"}

    def test_unknown_key_raises_with_location(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_config_text("battery.delta = 2\nbattery.spin = 3\n", "run.cfg")
        assert "run.cfg:2" in str(exc_info.value)
        assert "battery.spin" in str(exc_info.value)

    def test_missing_equals_raises(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_config_text("battery.delta 2")
        assert "key = value" in str(exc_info.value)

    def test_override(self):
        assert parse_override("battery.dm=3") == ("battery.dm", "3")

    def test_override_unknown_key_raises(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_override("charger.phase=1")
        assert "--set" in str(exc_info.value)


class TestPresets:
    """Tests for the shipped presets."""

    def test_all_presets_present(self):
        assert preset_names() == [f"fig{k}" for k in range(1, 9)]

    @pytest.mark.parametrize("name", [f"fig{k}" for k in range(1, 9)])
    def test_every_preset_builds(self, name):
        settings = load_settings(name)
        sweep = build_sweep_config(settings)
        assert len(sweep.values) == 4

    def test_figure_one_preset(self):
        sweep = build_sweep_config(load_settings("fig1"))
        assert sweep.axis == "T"
        assert sweep.values == (0.5, 1.0, 1.5, 2.0)
        assert sweep.base.battery.eta == pytest.approx(5.0**0.5)
        assert sweep.base.mode is EvolutionMode.CHARGER_ONLY

    def test_figure_four_preset_uses_full_generator(self):
        assert build_sweep_config(load_settings("fig4")).base.mode is EvolutionMode.FULL

    @pytest.mark.parametrize(
        "name,axis,values",
        [
            ("fig1", "T", (0.5, 1.0, 1.5, 2.0)),
            ("fig2", "D", (0.0, 1.0, 2.0, 3.0)),
            ("fig3", "delta", (2.0, 3.0, 4.0, 5.0)),
            ("fig4", "T", (0.5, 1.0, 1.5, 2.0)),
            ("fig5", "B", (0.5, 1.0, 1.5, 2.0)),
            ("fig6", "gamma_phi", (0.25, 0.5, 0.75, 1.0)),
            ("fig7", "D", (1.0, 2.0, 3.0, 4.0)),
            ("fig8", "delta", (2.0, 3.0, 4.0, 5.0)),
        ],
    )
    def test_preset_numbering(self, name, axis, values):
        sweep = build_sweep_config(load_settings(name))
        assert sweep.axis == axis
        assert sweep.values == values

    def test_dephasing_presets(self):
        sweep = build_sweep_config(load_settings("fig6"))
        assert sweep.target == "dephasing"
        assert sweep.axis == "gamma_phi"
        assert sweep.base.dephasing.gamma_phi == pytest.approx(0.5)

    def test_unknown_source_raises(self):
        with pytest.raises(ConfigError) as exc_info:
            read_config_source("fig99")
        assert "fig1" in str(exc_info.value)

    def test_reads_file_path(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("battery.dm = 2\n", encoding="utf-8")
        settings = load_settings(str(path))
        assert build_run_config(settings).battery.dm == 2.0


class TestLoadSettings:
    """Tests for load_settings precedence and build_run_config validation."""

    def test_defaults(self):
        config = build_run_config(load_settings())
        assert config.battery.delta == 2.0
        assert config.thermal.beta == 2.0
        assert config.grid == GridSpec(t_max=10.0, n_steps=1001)
        assert config.outputs == ("work", "power", "capacity", "coherence")
        assert config.dephasing is None

    def test_precedence(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("battery.dm = 2\nrun.mode = full\n", encoding="utf-8")
        settings = load_settings(str(path), overrides=["battery.dm=3"], mode="charger-only")
        config = build_run_config(settings)
        assert config.battery.dm == 3.0
        assert config.mode is EvolutionMode.CHARGER_ONLY

    def test_rate_convention_flag(self):
        settings = load_settings(overrides=["dephasing.gamma_b=0.25"], rate_convention="lindblad")
        config = build_run_config(settings)
        assert config.dephasing.rate_convention is RateConvention.LINDBLAD
        assert config.dephasing.gamma_c == 0.0

    @pytest.mark.parametrize(
        "value,expected",
        [
            ("paper", RateConvention.SUBSPACE),
            ("subspace", RateConvention.SUBSPACE),
            ("LINDBLAD", RateConvention.LINDBLAD),
        ],
    )
    def test_rate_convention_spellings(self, value, expected):
        settings = load_settings(overrides=["dephasing.gamma_b=0.25"], rate_convention=value)
        assert build_run_config(settings).dephasing.rate_convention is expected

    def test_invalid_rate_convention_names_the_key(self):
        with pytest.raises(ConfigError) as exc_info:
            build_run_config(load_settings(rate_convention="fast"))
        assert "dephasing.rate_convention" in str(exc_info.value)

    def test_defaults_are_not_mutated(self):
        load_settings(overrides=["battery.dm=7"])
        assert DEFAULTS["battery.dm"] == "1"

    @pytest.mark.parametrize(
        "override,key",
        [
            ("battery.delta=abc", "battery.delta"),
            ("thermal.temperature=0", "thermal.temperature"),
            ("grid.n_steps=1", "grid.n_steps"),
            ("grid.n_steps=1.5", "grid.n_steps"),
            ("run.mode=adiabatic", "run.mode"),
            ("run.outputs=work, heat", "run.outputs"),
        ],
    )
    def test_invalid_values_name_the_key(self, override, key):
        with pytest.raises(ConfigError) as exc_info:
            build_run_config(load_settings(overrides=[override]))
        assert key in str(exc_info.value)

    def test_dephasing_output_needs_rates(self):
        with pytest.raises(ConfigError) as exc_info:
            build_run_config(load_settings(overrides=["run.outputs=work, dephasing_work"]))
        assert "dephasing_work" in str(exc_info.value)

    def test_require_dephasing(self):
        with pytest.raises(ConfigError):
            build_run_config(load_settings()).require_dephasing()


class TestSweepConfig:
    """Tests for build_sweep_config and SweepConfig.jobs."""

    def test_missing_axis_raises(self):
        with pytest.raises(ConfigError) as exc_info:
            build_sweep_config(load_settings(overrides=["sweep.values=1, 2"]))
        assert "sweep.axis" in str(exc_info.value)

    def test_invalid_axis_raises(self):
        with pytest.raises(ConfigError) as exc_info:
            build_sweep_config(load_settings(overrides=["sweep.axis=phase", "sweep.values=1"]))
        assert "sweep.axis" in str(exc_info.value)

    def test_non_numeric_value_raises(self):
        with pytest.raises(ConfigError) as exc_info:
            build_sweep_config(load_settings(overrides=["sweep.axis=D", "sweep.values=1, two"]))
        assert "sweep.values" in str(exc_info.value)

    def test_dephasing_target_rejects_temperature_axis(self):
        overrides = ["sweep.axis=T", "sweep.values=1", "sweep.target=dephasing"]
        with pytest.raises(ConfigError) as exc_info:
            build_sweep_config(load_settings(overrides=overrides))
        assert "dephasing" in str(exc_info.value)

    def test_paired_axis_moves_delta_and_epsilon(self):
        sweep = build_sweep_config(load_settings("fig3"))
        assert sweep.paired
        for value, config in sweep.jobs():
            assert config.battery.delta == value
            assert config.battery.epsilon == value

    def test_unpaired_axis_moves_delta_only(self):
        overrides = ["sweep.axis=delta", "sweep.values=3, 4"]
        jobs = build_sweep_config(load_settings(overrides=overrides)).jobs()
        assert [config.battery.delta for _, config in jobs] == [3.0, 4.0]
        assert all(config.battery.epsilon == 2.0 for _, config in jobs)

    def test_temperature_axis(self):
        jobs = build_sweep_config(load_settings("fig1")).jobs()
        assert [config.thermal.beta for _, config in jobs] == pytest.approx([2.0, 1.0, 2.0 / 3.0, 0.5])

    def test_gamma_phi_axis_keeps_convention(self):
        overrides = [
            "sweep.axis=gamma_phi",
            "sweep.values=1",
            "dephasing.gamma_b=0.1",
            "dephasing.rate_convention=lindblad",
        ]
        [(_, config)] = build_sweep_config(load_settings(overrides=overrides)).jobs()
        assert config.dephasing.gamma_b == config.dephasing.gamma_c == 0.5
        assert config.dephasing.rate_convention is RateConvention.LINDBLAD

    def test_gamma_phi_axis_keeps_flags_without_base_rates(self):
        overrides = [
            "sweep.axis=gamma_phi",
            "sweep.values=0.5",
            "sweep.target=dephasing",
            "dephasing.omega0=3",
        ]
        settings = load_settings(overrides=overrides, rate_convention="lindblad")
        [(_, config)] = build_sweep_config(settings).jobs()
        assert config.dephasing.rate_convention is RateConvention.LINDBLAD
        assert config.dephasing.omega0 == 3.0
        assert config.dephasing.gamma_phi == pytest.approx(0.5)

    def test_to_dict(self):
        config = build_run_config(load_settings("fig6"))
        data = config.to_dict()
        assert data["mode"] == "charger-only"
        assert data["dephasing"]["rate_convention"] == "subspace"
        assert data["grid"]["n_steps"] == 4001
