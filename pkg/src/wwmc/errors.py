"""Exception types raised by the simulator."""


class WwmcError(Exception):
    """Base class for all package errors."""


class ConfigError(WwmcError):
    """Invalid configuration file or problem definition."""


class DomainError(WwmcError):
    """Position outside the spatial domain."""


class MeshError(WwmcError):
    """Operation requires a finer or differently shaped mesh."""


class SolverError(WwmcError):
    """The deterministic moment solve failed (singular or indefinite system)."""


class DegenerateWindowError(WwmcError):
    """Auxiliary flux is identically zero; no window centers can be formed."""


class ExtinctionError(WwmcError):
    """The particle population died out before the end of the run."""


class EmptyPopulationError(WwmcError):
    """Population control was asked to resample an empty bank."""


class CorruptedHistoryError(WwmcError):
    """A history produced a non-finite position or weight."""


class ReferenceLoadError(WwmcError):
    """Reference-solution file is missing, malformed, or mismatched."""
