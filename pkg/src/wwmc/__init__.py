"""wwmc: dynamic 1-D Monte Carlo neutron transport with automated weight
windows driven by a hybrid deterministic second-moment solve."""

__version__ = "0.1.0"

from .config import load_config
from .driver import run
from .model import (
    BoundarySpec,
    ImpulseSource,
    Material,
    Mesh1D,
    ProblemSpec,
    TimeGrid,
    WindowParams,
    effective_scattering_ratio,
    locate_cell,
)
from .reference import ReferenceTable, growth_law, load_reference, relative_error

__all__ = [
    "BoundarySpec",
    "ImpulseSource",
    "Material",
    "Mesh1D",
    "ProblemSpec",
    "ReferenceTable",
    "TimeGrid",
    "WindowParams",
    "effective_scattering_ratio",
    "growth_law",
    "load_config",
    "load_reference",
    "locate_cell",
    "relative_error",
    "run",
    "__version__",
]
