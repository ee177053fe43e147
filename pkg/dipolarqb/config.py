"""Run configuration: key-value files, CLI overrides and environment variables.

Config files are flat `key = value` text with dotted keys and `#` comments:

    battery.delta = 2.0
    thermal.temperature = 0.5
    sweep.axis = T
    sweep.values = 0.5, 1, 1.5, 2

Precedence is defaults < config file < `--set` overrides and dedicated flags.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Literal, Mapping

from dipolarqb.charging import EvolutionMode
from dipolarqb.dephasing import DephasingParams, RateConvention
from dipolarqb.exceptions import ConfigError
from dipolarqb.model import BatteryParams, ChargerParams
from dipolarqb.thermal import ThermalSpec

SweepAxis = Literal["T", "D", "B", "delta", "epsilon", "gamma_phi", "omega"]
SweepTarget = Literal["charging", "dephasing"]

SWEEP_AXES: tuple[str, ...] = ("T", "D", "B", "delta", "epsilon", "gamma_phi", "omega")
DEPHASING_AXES: tuple[str, ...] = ("D", "delta", "epsilon", "gamma_phi")
OUTPUT_NAMES: tuple[str, ...] = (
    "work",
    "power",
    "capacity",
    "coherence",
    "passive_ergotropy",
    "dephasing_work",
)
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

DEFAULTS: dict[str, str] = {
    "battery.delta": "2",
    "battery.epsilon": "2",
    "battery.dm": "1",
    "battery.field": "1",
    "charger.omega": "1",
    "thermal.temperature": "0.5",
    "run.mode": "charger-only",
    "run.outputs": "work, power, capacity, coherence",
    "grid.t_max": "10",
    "grid.n_steps": "1001",
    "dephasing.omega0": "1",
    "dephasing.rate_convention": "subspace",
    "sweep.paired": "false",
    "sweep.target": "charging",
}

KNOWN_KEYS: frozenset[str] = frozenset(DEFAULTS) | {
    "dephasing.gamma_b",
    "dephasing.gamma_c",
    "sweep.axis",
    "sweep.values",
}

PRESET_PACKAGE = "dipolarqb.presets"


@dataclass(frozen=True)
class GridSpec:
    """Uniform time grid: n_steps points over [0, t_max]."""

    t_max: float
    n_steps: int

    def __post_init__(self):
        if not (math.isfinite(self.t_max) and self.t_max > 0.0):
            raise ConfigError(f"grid.t_max must be > 0, got: {self.t_max}")
        if self.n_steps < 2:
            raise ConfigError(f"grid.n_steps must be at least 2, got: {self.n_steps}")


@dataclass(frozen=True)
class RunConfig:
    """Everything a single charging or dephasing run needs."""

    battery: BatteryParams
    charger: ChargerParams
    thermal: ThermalSpec
    mode: EvolutionMode
    grid: GridSpec
    outputs: tuple[str, ...]
    dephasing: DephasingParams | None = None
    # omega0 and rate convention resolved even when no gamma_* is set
    dephasing_base: DephasingParams = DephasingParams(0.0, 0.0)

    def __post_init__(self):
        for name in self.outputs:
            if name not in OUTPUT_NAMES:
                raise ConfigError(
                    f"Invalid run.outputs entry: {name}. Must be one of {', '.join(OUTPUT_NAMES)}"
                )
        if "dephasing_work" in self.outputs and self.dephasing is None:
            raise ConfigError("run.outputs requests dephasing_work but no dephasing.gamma_* is set")

    def require_dephasing(self) -> DephasingParams:
        if self.dephasing is None:
            raise ConfigError("Missing dephasing.gamma_b / dephasing.gamma_c for a dephasing run")
        return self.dephasing

    def with_axis(self, axis: str, value: float, paired: bool = False) -> "RunConfig":
        """Copy of this config with one swept parameter set to value."""
        battery, charger, thermal, dephasing = self.battery, self.charger, self.thermal, self.dephasing
        if axis == "T":
            thermal = ThermalSpec.from_temperature(value)
        elif axis == "D":
            battery = battery.replace(dm=value)
        elif axis == "B":
            battery = battery.replace(field=value)
        elif axis == "delta":
            battery = battery.replace(delta=value, epsilon=value) if paired else battery.replace(delta=value)
        elif axis == "epsilon":
            battery = battery.replace(epsilon=value)
        elif axis == "omega":
            charger = ChargerParams(omega=value)
        elif axis == "gamma_phi":
            base = dephasing or self.dephasing_base
            dephasing = DephasingParams.from_gamma_phi(value, base.omega0, base.rate_convention)
        else:
            raise ConfigError(f"Invalid sweep.axis: {axis}. Must be one of {', '.join(SWEEP_AXES)}")
        return RunConfig(
            battery=battery,
            charger=charger,
            thermal=thermal,
            mode=self.mode,
            grid=self.grid,
            outputs=self.outputs,
            dephasing=dephasing,
            dephasing_base=self.dephasing_base,
        )

    def to_dict(self) -> dict:
        """Plain-data view for the JSON sidecar."""
        data: dict = {
            "battery": {
                "delta": self.battery.delta,
                "epsilon": self.battery.epsilon,
                "dm": self.battery.dm,
                "field": self.battery.field,
            },
            "charger": {"omega": self.charger.omega},
            "thermal": {"temperature": self.thermal.temperature, "beta": self.thermal.beta},
            "mode": self.mode.value,
            "grid": {"t_max": self.grid.t_max, "n_steps": self.grid.n_steps},
            "outputs": list(self.outputs),
            "dephasing": None,
        }
        if self.dephasing is not None:
            data["dephasing"] = {
                "gamma_b": self.dephasing.gamma_b,
                "gamma_c": self.dephasing.gamma_c,
                "omega0": self.dephasing.omega0,
                "rate_convention": self.dephasing.rate_convention.value,
            }
        return data


@dataclass(frozen=True)
class SweepConfig:
    """One parameter axis swept over a list of values."""

    base: RunConfig
    axis: SweepAxis
    values: tuple[float, ...]
    paired: bool = False
    target: SweepTarget = "charging"

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"Invalid sweep.axis: {self.axis}. Must be one of {', '.join(SWEEP_AXES)}")
        if not self.values:
            raise ConfigError("sweep.values must not be empty")
        if self.target not in ("charging", "dephasing"):
            raise ConfigError(f"Invalid sweep.target: {self.target}. Must be 'charging' or 'dephasing'")
        if self.target == "dephasing" and self.axis not in DEPHASING_AXES:
            raise ConfigError(
                f"sweep.axis {self.axis} has no effect on a dephasing sweep; "
                f"use one of {', '.join(DEPHASING_AXES)}"
            )

    def jobs(self) -> list[tuple[float, RunConfig]]:
        return [(value, self.base.with_axis(self.axis, value, self.paired)) for value in self.values]


def _get_optional_env(name: str, default: str | None = None) -> str | None:
    """Get an optional environment variable with a default."""
    return os.environ.get(name, default)


def _get_int_env(name: str, default: int | None = None) -> int:
    """Get an integer environment variable."""
    value = os.environ.get(name)
    if value is None:
        if default is not None:
            return default
        raise ConfigError(f"Missing required environment variable: {name}")
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"Environment variable {name} must be an integer, got: {value}")


def get_log_level(override: str | None = None) -> str:
    """Log level from the override or LOG_LEVEL (default INFO)."""
    level = (override or _get_optional_env("LOG_LEVEL", "INFO") or "INFO").upper()
    if level not in LOG_LEVELS:
        raise ConfigError(f"Invalid LOG_LEVEL: {level}")
    return level


def get_log_json() -> bool:
    """Whether QB_LOG_JSON asks for JSON log records."""
    return _parse_bool("QB_LOG_JSON", _get_optional_env("QB_LOG_JSON", "0") or "0")


def get_thread_cap(n_jobs: int) -> int:
    """Worker count for a sweep: QB_THREADS caps it, default one per job."""
    if "QB_THREADS" not in os.environ:
        return max(1, n_jobs)
    cap = _get_int_env("QB_THREADS")
    if cap < 1:
        raise ConfigError(f"QB_THREADS must be at least 1, got: {cap}")
    return max(1, min(cap, n_jobs))


def _parse_bool(key: str, raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} must be a boolean, got: {raw}")


def _split_assignment(text: str, where: str) -> tuple[str, str]:
    if "=" not in text:
        raise ConfigError(f"{where}: expected 'key = value', got: {text!r}")
    key, value = text.split("=", 1)
    key = key.strip()
    if key not in KNOWN_KEYS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    return key, value.strip()


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse key-value config text.

    Raises:
        ConfigError: On a malformed line or an unknown key
    """
    settings: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        key, value = _split_assignment(content, f"{source}:{lineno}")
        settings[key] = value
    return settings


def parse_override(text: str) -> tuple[str, str]:
    """Parse one `--set key=value` argument."""
    return _split_assignment(text, "--set")


def preset_names() -> list[str]:
    """Names of the shipped presets (fig1, fig2, ...)."""
    return sorted(
        entry.name[: -len(".cfg")]
        for entry in resources.files(PRESET_PACKAGE).iterdir()
        if entry.name.endswith(".cfg")
    )


def read_config_source(name_or_path: str) -> tuple[str, str]:
    """Return (source label, text) for a config path or preset name.

    Raises:
        ConfigError: If neither a readable file nor a preset matches
    """
    path = Path(name_or_path)
    if path.is_file():
        return str(path), path.read_text(encoding="utf-8")

    preset = resources.files(PRESET_PACKAGE) / f"{name_or_path}.cfg"
    if preset.is_file():
        return f"preset:{name_or_path}", preset.read_text(encoding="utf-8")

    raise ConfigError(
        f"Config {name_or_path!r} is neither a file nor a preset ({', '.join(preset_names())})"
    )


def load_settings(
    config: str | None = None,
    overrides: Iterable[str] = (),
    mode: str | None = None,
    rate_convention: str | None = None,
) -> dict[str, str]:
    """Merge defaults, the config file and command-line overrides."""
    settings = dict(DEFAULTS)
    if config:
        source, text = read_config_source(config)
        settings.update(parse_config_text(text, source))
    for item in overrides:
        key, value = parse_override(item)
        settings[key] = value
    if mode is not None:
        settings["run.mode"] = mode
    if rate_convention is not None:
        settings["dephasing.rate_convention"] = rate_convention
    return settings


def _get_float(settings: Mapping[str, str], key: str) -> float:
    raw = settings[key]
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got: {raw}")
    if math.isnan(value):
        raise ConfigError(f"{key} must be a number, got: {raw}")
    return value


def _get_int(settings: Mapping[str, str], key: str) -> int:
    raw = settings[key]
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got: {raw}")


def _get_list(settings: Mapping[str, str], key: str) -> list[str]:
    return [item.strip() for item in settings[key].split(",") if item.strip()]


def _build_dephasing_base(settings: Mapping[str, str]) -> DephasingParams:
    return DephasingParams(
        gamma_b=0.0,
        gamma_c=0.0,
        omega0=_get_float(settings, "dephasing.omega0"),
        rate_convention=RateConvention.parse(settings["dephasing.rate_convention"]),
    )


def _build_dephasing(
    settings: Mapping[str, str], base: DephasingParams
) -> DephasingParams | None:
    if "dephasing.gamma_b" not in settings and "dephasing.gamma_c" not in settings:
        return None
    return replace(
        base,
        gamma_b=_get_float(settings, "dephasing.gamma_b") if "dephasing.gamma_b" in settings else 0.0,
        gamma_c=_get_float(settings, "dephasing.gamma_c") if "dephasing.gamma_c" in settings else 0.0,
    )


def build_run_config(settings: Mapping[str, str]) -> RunConfig:
    """Validate merged settings into a RunConfig.

    Raises:
        ConfigError: Naming the offending key
    """
    dephasing_base = _build_dephasing_base(settings)
    return RunConfig(
        battery=BatteryParams(
            delta=_get_float(settings, "battery.delta"),
            epsilon=_get_float(settings, "battery.epsilon"),
            dm=_get_float(settings, "battery.dm"),
            field=_get_float(settings, "battery.field"),
        ),
        charger=ChargerParams(omega=_get_float(settings, "charger.omega")),
        thermal=ThermalSpec.from_temperature(_get_float(settings, "thermal.temperature")),
        mode=EvolutionMode.parse(settings["run.mode"]),
        grid=GridSpec(
            t_max=_get_float(settings, "grid.t_max"),
            n_steps=_get_int(settings, "grid.n_steps"),
        ),
        outputs=tuple(_get_list(settings, "run.outputs")),
        dephasing=_build_dephasing(settings, dephasing_base),
        dephasing_base=dephasing_base,
    )


def build_sweep_config(settings: Mapping[str, str]) -> SweepConfig:
    """Validate merged settings into a SweepConfig.

    Raises:
        ConfigError: If sweep.axis or sweep.values is missing or invalid
    """
    if "sweep.axis" not in settings:
        raise ConfigError("Missing sweep.axis")
    if "sweep.values" not in settings:
        raise ConfigError("Missing sweep.values")

    values = []
    for raw in _get_list(settings, "sweep.values"):
        try:
            values.append(float(raw))
        except ValueError:
            raise ConfigError(f"sweep.values entries must be numbers, got: {raw}")

    return SweepConfig(
        base=build_run_config(settings),
        axis=settings["sweep.axis"].strip(),  # type: ignore
        values=tuple(values),
        paired=_parse_bool("sweep.paired", settings["sweep.paired"]),
        target=settings["sweep.target"].strip().lower(),  # type: ignore
    )
