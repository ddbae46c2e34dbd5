"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
NumericalError -> 3, SnapshotError and other IO failures -> 4.
"""


class DoifbpError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(DoifbpError):
    """Malformed or constraint-violating run configuration."""


class NumericalError(DoifbpError):
    """Stability or solver failure during time stepping."""


class SnapshotError(DoifbpError):
    """Corrupt, truncated, or inconsistent snapshot file."""
