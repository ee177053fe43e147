"""Command line interface for DipolarQB."""

from __future__ import annotations

import argparse

from dipolarqb.config import LOG_LEVELS
from dipolarqb.validate import FAULTS


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        type=str,
        help="Config file path or preset name (fig1 ... fig8)",
    )
    common.add_argument(
        "--out",
        type=str,
        default="results",
        help="Output directory for CSV files (default: results)",
    )
    common.add_argument(
        "--mode",
        choices=["charger-only", "full"],
        help="Charging generator: the charger gate only, or H_B + H_c",
    )
    common.add_argument(
        "--rate-convention",
        choices=["paper", "subspace", "lindblad"],
        help="Coherence damping of the reduced equations: Gamma_phi (paper or subspace) "
        "or 2 Gamma_phi (lindblad)",
    )
    common.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override one config key (repeatable), e.g. --set battery.dm=2",
    )
    common.add_argument(
        "--log-level",
        choices=list(LOG_LEVELS),
        help="Log level (default: LOG_LEVEL or INFO)",
    )
    return common


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse command line arguments.

    Args:
        argv: Argument list (defaults to sys.argv[1:])

    Returns:
        Parsed arguments namespace
    """
    common = _common_options()
    parser = argparse.ArgumentParser(
        description="DipolarQB - two-qubit dipolar quantum battery simulator"
    )

    subparsers = parser.add_subparsers(dest="command", required=True, help="Commands")

    subparsers.add_parser(
        "eigen", parents=[common], help="Print closed-form and numeric spectra of H_B"
    )
    subparsers.add_parser(
        "thermal", parents=[common], help="Print the Gibbs state, Z, populations, C_l1 and K"
    )
    subparsers.add_parser("evolve", parents=[common], help="Write one charging run")
    subparsers.add_parser("dephase", parents=[common], help="Write one dephasing run")
    subparsers.add_parser("sweep", parents=[common], help="Run the configured parameter sweep")

    validate_parser = subparsers.add_parser(
        "validate", parents=[common], help="Run all oracle cross-checks"
    )
    validate_parser.add_argument(
        "--inject-fault",
        choices=list(FAULTS),
        help="Debug hook: perturb one closed-form quantity so its check must fail",
    )
    validate_parser.add_argument(
        "--draws",
        type=int,
        default=1000,
        help="Random parameter draws per randomized check (default: 1000)",
    )

    return parser.parse_args(argv)
