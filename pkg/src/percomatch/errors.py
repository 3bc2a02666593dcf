"""Exception types shared across the package."""


class PercomatchError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(PercomatchError):
    """Two positions with different dimensionality."""


class InfeasibleDegree(PercomatchError):
    """Requested mean degree needs an edge density K > 1."""


class CalibrationConflict(PercomatchError):
    """Model parameters over- or under-determined (C, K, target_degree)."""


class InvalidNode(PercomatchError):
    """Node id outside [0, n)."""


class ConflictingSeeds(PercomatchError):
    """Seed pairs share a first or second coordinate."""


class TooLarge(PercomatchError):
    """Instance too big for the brute-force reference path."""


class NonMonotone(PercomatchError):
    """Tabulated calibration curve failed its monotonicity check."""


class MissingPositions(PercomatchError):
    """Operation needs node positions but the graph has none."""


class BandRangeError(PercomatchError):
    """Band thresholds outside the calibration's valid range or misordered."""


class MonotonicityViolation(PercomatchError):
    """Strict acceptance sets are not contained in the loose ones."""


class EmptyBulk(PercomatchError):
    """Ring expansion asked to grow from an invalid bulk region."""


class ParseError(PercomatchError):
    """Malformed edge-list input; message carries the line number."""


class ConfigError(PercomatchError):
    """Bad CLI / experiment-spec configuration (exit code 2)."""


class RegimeWarning(UserWarning):
    """Pipeline invoked outside the parameter regime it was designed for."""
