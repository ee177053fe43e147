"""DipolarQB test suite."""
