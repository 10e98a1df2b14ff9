"""Exception taxonomy shared across the package.

ConfigError and DataError map onto the CLI exit codes 2 and 3; everything
argument-shaped (bad sigma, mismatched supports) stays a plain ValueError.
"""

from __future__ import annotations


class PivotmineError(Exception):
    """Base class for package-specific failures."""


class ConfigError(PivotmineError):
    """Invalid or inconsistent run configuration."""


class DataError(PivotmineError):
    """Corpus or derived data cannot be used as requested."""
