"""Main entry point for DipolarQB."""

import sys
from pathlib import Path

import numpy as np
import pandas as pd

from dipolarqb.cli import parse_args
from dipolarqb.config import (
    build_run_config,
    build_sweep_config,
    get_log_json,
    get_log_level,
    load_settings,
)
from dipolarqb.exceptions import ConfigError, DegenerateClosedFormError, DipolarQBError
from dipolarqb.logging import get_logger, setup_logging
from dipolarqb.metrics import capacity, l1_coherence
from dipolarqb.model import battery_hamiltonian, closed_form_spectrum
from dipolarqb.operators import hermitian_eigen
from dipolarqb.runner import run, run_dephasing, sweep, write_table
from dipolarqb.thermal import gibbs_closed_form
from dipolarqb.validate import run_validation

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION_FAILED = 2


def run_eigen(settings, logger) -> int:
    """Print closed-form (labelled) and numeric (ascending) spectra."""
    p = build_run_config(settings).battery
    numeric = hermitian_eigen(battery_hamiltonian(p))
    try:
        closed = closed_form_spectrum(p).eigenvalues
    except DegenerateClosedFormError as e:
        logger.warning(f"{e}; eigenvectors from the numeric solver only")
        closed = e.eigenvalues

    table = pd.DataFrame(
        {
            "label": ["phi1", "phi2", "phi3", "phi4"],
            "closed_form": closed,
            "sorted_closed_form": sorted(closed),
            "numeric": numeric.eigenvalues,
        }
    )
    print(table.to_string(index=False, float_format=lambda x: f"{x:.12g}"))
    print(f"eta = {p.eta:.12g}  chi = {p.chi:.12g}")
    return EXIT_OK


def run_thermal(settings, logger) -> int:
    """Print the Gibbs state and its derived quantities."""
    config = build_run_config(settings)
    state = gibbs_closed_form(config.battery, config.thermal)
    h_b = battery_hamiltonian(config.battery)

    with np.printoptions(precision=10, suppress=True, linewidth=120):
        print(state.rho.matrix)
    print(f"Z = {state.partition_function:.12g}")
    print("populations = " + ", ".join(f"{w:.12g}" for w in state.populations))
    print(f"C_l1 = {l1_coherence(state.rho):.12g}")
    print(f"K = {capacity(h_b):.12g}")
    return EXIT_OK


def run_evolve(settings, out_dir: Path, logger) -> int:
    config = build_run_config(settings)
    logger.info(f"Charging run in {config.mode.value} mode at T={config.thermal.temperature:g}")
    write_table(run(config), out_dir / "run.csv", config, "charging")
    return EXIT_OK


def run_dephase(settings, out_dir: Path, logger) -> int:
    config = build_run_config(settings)
    dp = config.require_dephasing()
    logger.info(
        f"Dephasing run at Gamma_phi={dp.gamma_phi:g} ({dp.rate_convention.value} convention)"
    )
    write_table(run_dephasing(config), out_dir / "dephase.csv", config, "dephasing")
    return EXIT_OK


def run_validate(args, logger) -> int:
    if args.inject_fault:
        logger.warning(f"Injecting fault into {args.inject_fault}")
    report = run_validation(fault=args.inject_fault, draws=args.draws)
    print(report.render())
    return EXIT_OK if report.passed else EXIT_VALIDATION_FAILED


def main(argv: list[str] | None = None) -> int:
    """Main entry point for DipolarQB.

    Returns:
        Exit code (0 success, 1 configuration or runtime error, 2 validation failure)
    """
    try:
        args = parse_args(argv)
    except SystemExit as e:
        # usage errors count as config errors
        return EXIT_OK if e.code in (0, None) else EXIT_ERROR

    try:
        setup_logging(get_log_level(args.log_level), serialize=get_log_json())
        logger = get_logger("main")

        settings = load_settings(args.config, args.set, args.mode, args.rate_convention)
        out_dir = Path(args.out)

        if args.command == "eigen":
            return run_eigen(settings, logger)
        if args.command == "thermal":
            return run_thermal(settings, logger)
        if args.command == "evolve":
            return run_evolve(settings, out_dir, logger)
        if args.command == "dephase":
            return run_dephase(settings, out_dir, logger)
        if args.command == "sweep":
            sweep(build_sweep_config(settings), out_dir)
            return EXIT_OK
        if args.command == "validate":
            return run_validate(args, logger)

        raise ConfigError(f"Unknown command: {args.command}")

    except ConfigError as e:
        setup_logging("ERROR")
        logger = get_logger("main")
        logger.error(f"Configuration error: {e}")
        return EXIT_ERROR

    except DipolarQBError as e:
        logger = get_logger("main")
        logger.error(f"DipolarQB error: {e}")
        return EXIT_ERROR

    except KeyboardInterrupt:
        logger = get_logger("main")
        logger.info("Interrupted")
        return EXIT_OK

    except Exception as e:
        setup_logging("ERROR")
        logger = get_logger("main")
        logger.error(f"Unexpected error: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
