"""Exception hierarchy shared by all chronomap modules.

Three broad families map onto the CLI exit codes: configuration errors
(bad parameters or requests), data errors (unusable input files or
samples), and compute errors (valid inputs on which the requested
quantity does not exist).
"""


class ChronoError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ChronoError):
    """Invalid parameters, grids, or requested coordinates."""


class DomainError(ConfigError):
    """A requested coordinate lies outside the representable range."""


class SynthesisError(ConfigError):
    """A pulse specification cannot be realized on the given grid."""


class ShapingError(ConfigError):
    """A shaper mask is inconsistent with the field or removes it entirely."""


class DataError(ChronoError):
    """Input data cannot be used (malformed, non-finite, ill-conditioned)."""


class ParseError(DataError):
    """A file does not parse under its declared format."""


class FormatError(DataError):
    """A file's magic header or structure does not match the format."""


class CalibrationError(DataError):
    """A wavelength/frequency calibration is degenerate or inconsistent."""


class ComputeError(ChronoError):
    """A computation cannot produce the requested result on valid inputs."""


class InsufficientStructureError(ComputeError):
    """A map lacks the interference structure the analysis requires."""
