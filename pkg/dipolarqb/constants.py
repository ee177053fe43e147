"""Numeric tolerances shared by every module."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Single table of tolerances; tests and checks read from here."""

    structural: float = 1e-10
    algebraic: float = 1e-12
    psd: float = 1e-10
    non_real: float = 1e-10
    integration: float = 1e-8
    oracle: float = 1e-6


TOL = Tolerances()

# Two-qubit l1 coherence normalization.
C_MAX_TWO_QUBIT = 3.0
