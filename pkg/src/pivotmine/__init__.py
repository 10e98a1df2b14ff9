"""Crosslingual surface-marker discovery over verse-parallel corpora."""

__version__ = "0.1.0"

from .errors import ConfigError, DataError, PivotmineError

__all__ = ["ConfigError", "DataError", "PivotmineError", "__version__"]
