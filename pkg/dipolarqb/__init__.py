"""DipolarQB - two-qubit dipolar quantum battery simulator."""

__version__ = "0.1.0"
