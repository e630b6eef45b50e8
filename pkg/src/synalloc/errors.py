"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
invariant/audit failures -> 3. Everything else is a bug.
"""


class SynallocError(Exception):
    """Base class for all package errors."""


class ConfigError(SynallocError):
    """Invalid configuration (bad theta, non-positive sizes, ...)."""


class DataError(SynallocError):
    """Problem loading or interpreting an input dataset."""


class DatasetFormatError(DataError):
    """Unreadable file, missing columns, or malformed rows in strict mode."""


class EmptyDatasetError(DataError):
    """No rows survive cleaning."""


class VectorError(SynallocError, ValueError):
    """Malformed data vector: non-finite, negative, or wrong dimension."""


class EmptyClusterError(SynallocError):
    """Centroid/radius requested for a cluster feature with zero points."""
