"""Single runs, parameter sweeps and their CSV/JSON export."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pandas as pd

from dipolarqb import __version__
from dipolarqb.charging import generator_for, time_grid, trajectory
from dipolarqb.config import RunConfig, SweepConfig, get_thread_cap
from dipolarqb.dephasing import (
    SubspaceState,
    closed_form_ergotropy,
    effective_coupling,
    ergotropy_power,
    integrate_lindblad,
    integrate_subspace,
    single_excitation_state,
    subspace_ergotropy,
    system_hamiltonian,
)
from dipolarqb.logging import get_logger
from dipolarqb.metrics import energy, passive_ergotropy, sample
from dipolarqb.model import battery_hamiltonian
from dipolarqb.thermal import gibbs_closed_form

logger = get_logger("runner")

CHARGING_COLUMNS = ["t", "W", "P", "K", "C"]
DEPHASING_COLUMNS = ["t", "W", "P", "W_subspace", "z", "W_stored"]
FLOAT_FORMAT = "%.15g"
SUMMARY_FILE = "summary.csv"


def run(config: RunConfig) -> pd.DataFrame:
    """Charge the battery from its Gibbs state and tabulate the figures of merit.

    Args:
        config: Validated run configuration

    Returns:
        DataFrame with columns t, W, P, K, C and, when requested,
        W_passive (ergotropy) and W_dephase (closed-form dephasing W)
    """
    p, c = config.battery, config.charger
    h_b = battery_hamiltonian(p)
    thermal = gibbs_closed_form(p, config.thermal)
    traj = trajectory(thermal.rho, p, c, config.mode, config.grid.t_max, config.grid.n_steps)
    generator = generator_for(config.mode, p, c)

    rows = [
        sample(float(t), rho_t, thermal.rho, generator, h_b)
        for t, rho_t in zip(traj.times, traj.states)
    ]
    table = pd.DataFrame(
        {
            "t": [r.t for r in rows],
            "W": [r.work for r in rows],
            "P": [r.power for r in rows],
            "K": [r.capacity for r in rows],
            "C": [r.coherence for r in rows],
        },
        columns=CHARGING_COLUMNS,
    )

    if "passive_ergotropy" in config.outputs:
        table["W_passive"] = [passive_ergotropy(rho_t, h_b).extractable for rho_t in traj.states]
    if "dephasing_work" in config.outputs:
        derived = effective_coupling(p, config.require_dephasing())
        table["W_dephase"] = closed_form_ergotropy(traj.times, derived)

    return table


def run_dephasing(config: RunConfig) -> pd.DataFrame:
    """Dephasing scenario starting from |01><01| (charger excited, battery empty).

    Returns:
        DataFrame with columns t, W (closed form), P (dW/dt), W_subspace
        (RK4 of the reduced equations), z and W_stored (energy change along
        the 4x4 Lindblad trajectory)

    Raises:
        ConfigError: If the config has no dephasing rates
        StepTooLargeError: If grid.n_steps is too small for the rates
    """
    p, dp = config.battery, config.require_dephasing()
    derived = effective_coupling(p, dp)
    times = time_grid(config.grid.t_max, config.grid.n_steps)
    start = SubspaceState(u=1.0, v=0j)

    work = closed_form_ergotropy(times, derived)
    reduced = integrate_subspace(start, derived, dp, config.grid.t_max, config.grid.n_steps)
    full = integrate_lindblad(
        single_excitation_state(p, start), p, dp, config.grid.t_max, config.grid.n_steps
    )
    h = system_hamiltonian(p, dp)
    e0 = energy(full.states[0], h)

    return pd.DataFrame(
        {
            "t": times,
            "W": work,
            "P": ergotropy_power(times, work),
            "W_subspace": [
                subspace_ergotropy(reduced.state(k), derived.kappa) for k in range(len(times))
            ],
            "z": reduced.z,
            "W_stored": [energy(rho, h) - e0 for rho in full.states],
        },
        columns=DEPHASING_COLUMNS,
    )


def write_table(table: pd.DataFrame, path: Path, config: RunConfig, kind: str) -> Path:
    """Write the CSV and its JSON sidecar (resolved config, tool version).

    Output is byte-identical across runs of the same config.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    sidecar = {"config": config.to_dict(), "kind": kind, "version": __version__}
    path.with_suffix(".json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    logger.info(f"Wrote {path} ({len(table)} rows)")
    return path


def value_label(axis: str, value: float) -> str:
    """Deterministic file stem `<axis>=<value>`."""
    return f"{axis}={value:.15g}"


def _summarize(target: str, config: RunConfig, table: pd.DataFrame) -> dict:
    summary = {"W_peak": float(table["W"].max())}
    if target == "dephasing":
        summary["kappa"] = effective_coupling(config.battery).kappa
        summary["W_end"] = float(table["W"].iloc[-1])
    else:
        summary["P_peak"] = float(table["P"].abs().max())
        summary["K"] = float(table["K"].iloc[0])
        summary["C_peak"] = float(table["C"].max())
    return summary


def _sweep_job(target: str, config: RunConfig, path: Path | None) -> pd.DataFrame:
    if target == "dephasing":
        table = run_dephasing(config)
    else:
        table = run(config)
    if path is not None:
        write_table(table, path, config, target)
    return table


def sweep(config: SweepConfig, out_dir: Path | None = None) -> dict[float, pd.DataFrame]:
    """Run every value of the swept axis, optionally in parallel.

    Each job writes only its own `<axis>=<value>.csv`; the trend summary
    (peak W per value) is appended to summary.csv after all jobs finish, in
    value order; the header is written only when the file is new.

    Args:
        config: Validated sweep configuration
        out_dir: Output directory; nothing is written when None

    Returns:
        Tables keyed by axis value, in sweep order
    """
    jobs = config.jobs()
    workers = get_thread_cap(len(jobs))
    logger.info(
        f"Sweeping {config.axis} over {len(jobs)} values ({config.target}, {workers} workers)"
    )

    paths = [
        out_dir / f"{value_label(config.axis, value)}.csv" if out_dir is not None else None
        for value, _ in jobs
    ]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_sweep_job, config.target, job_config, path)
            for (_, job_config), path in zip(jobs, paths)
        ]
        tables = [future.result() for future in futures]

    results = {value: table for (value, _), table in zip(jobs, tables)}

    if out_dir is not None:
        summary = pd.DataFrame(
            [
                {config.axis: value, **_summarize(config.target, job_config, table)}
                for (value, job_config), table in zip(jobs, tables)
            ]
        )
        summary_path = out_dir / SUMMARY_FILE
        exists = summary_path.is_file()
        summary.to_csv(
            summary_path,
            mode="a" if exists else "w",
            header=not exists,
            index=False,
            float_format=FLOAT_FORMAT,
            lineterminator="\n",
        )
        logger.info(f"{'Appended to' if exists else 'Wrote'} {summary_path}")

    return results
