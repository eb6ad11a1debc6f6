"""Shared exception types."""


class CsaggError(Exception):
    """Base class for all package errors."""


class DimensionError(CsaggError, ValueError):
    """Shapes of the inputs are inconsistent."""


class RankDeficientError(CsaggError, ValueError):
    """A full-rank matrix was required but not supplied."""


class NumericalError(CsaggError, RuntimeError):
    """The numerical routine broke down (distinct from infeasibility)."""


class ConfigError(CsaggError, ValueError):
    """Invalid configuration or parameters."""


class TraceFormatError(CsaggError, ValueError):
    """Malformed position-trace input."""
