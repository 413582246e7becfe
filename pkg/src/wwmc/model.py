"""Problem definition: mesh, material, time grid, source, boundaries, run options.

Everything here is immutable after construction and shared freely across
worker threads.  Cell and edge quantities are plain float64 numpy arrays;
a field over cells has length I, a field over edges length I+1.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError

RUN_MODES = ("analog", "ww-previous", "ww-losm-be", "ww-losm-cn", "ww-reference")
BOUNDARY_KINDS = ("reflective", "vacuum", "incident")


@dataclass(frozen=True)
class Mesh1D:
    """Strictly increasing cell-edge positions (cm)."""

    edges: np.ndarray

    def __post_init__(self):
        edges = np.ascontiguousarray(np.asarray(self.edges, dtype=np.float64))
        if edges.ndim != 1 or edges.size < 2:
            raise ConfigError("mesh needs at least one cell (two edges)")
        if not np.all(np.diff(edges) > 0.0):
            raise ConfigError("mesh edges must be strictly increasing")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def uniform(cls, x_min, x_max, n_cells):
        if n_cells < 1:
            raise ConfigError("mesh needs at least one cell")
        return cls(np.linspace(x_min, x_max, int(n_cells) + 1))

    @property
    def n_cells(self):
        return self.edges.size - 1

    @property
    def widths(self):
        return np.diff(self.edges)

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def dual_width(self, edge):
        """Width of the staggered cell around an interior edge."""
        w = self.widths
        return 0.5 * (w[edge - 1] + w[edge])


def locate_cell(x, mesh):
    """Cell index containing position x.

    A point exactly on an interior edge belongs to the cell on its right;
    the right domain boundary maps to the last cell.
    """
    edges = mesh.edges
    if x < edges[0] or x > edges[-1]:
        raise DomainError(f"position {x} outside domain [{edges[0]}, {edges[-1]}]")
    if x == edges[-1]:
        return mesh.n_cells - 1
    return int(np.searchsorted(edges, x, side="right")) - 1


@dataclass(frozen=True)
class Material:
    """Macroscopic cross sections (cm^-1), constant or per cell per timestep.

    Arrays may be scalars (broadcast everywhere), (I,) per-cell, or
    (N, I) per-timestep-per-cell.
    """

    sigma_t: np.ndarray
    sigma_s: np.ndarray
    sigma_f: np.ndarray
    nu_f: float

    def __post_init__(self):
        for name in ("sigma_t", "sigma_s", "sigma_f"):
            v = np.asarray(getattr(self, name), dtype=np.float64)
            if np.any(v < 0):
                raise ConfigError(f"{name} must be nonnegative")
            object.__setattr__(self, name, v)
        if self.nu_f < 0:
            raise ConfigError("nu_f must be nonnegative")
        if np.any(self.sigma_t - self.sigma_s - self.sigma_f < -1e-14):
            raise ConfigError("capture cross section sigma_t - sigma_s - sigma_f is negative")

    def at_step(self, step, n_cells):
        """Per-cell (I,) cross-section arrays for one timestep."""
        out = []
        for v in (self.sigma_t, self.sigma_s, self.sigma_f):
            if v.ndim == 0:
                out.append(np.full(n_cells, float(v)))
            elif v.ndim == 1:
                out.append(np.ascontiguousarray(v))
            else:
                out.append(np.ascontiguousarray(v[step]))
        return out[0], out[1], out[2]


def effective_scattering_ratio(material):
    """(sigma_s + nu_f * sigma_f) / sigma_t; > 1 means a multiplying medium."""
    st = float(np.max(material.sigma_t)) if material.sigma_t.ndim else float(material.sigma_t)
    if st <= 0.0:
        raise ZeroDivisionError("effective scattering ratio undefined for sigma_t = 0")
    ss = float(material.sigma_s) if material.sigma_s.ndim == 0 else float(np.mean(material.sigma_s))
    sf = float(material.sigma_f) if material.sigma_f.ndim == 0 else float(np.mean(material.sigma_f))
    return (ss + material.nu_f * sf) / st


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing time points t[0..N] (s)."""

    t: np.ndarray

    def __post_init__(self):
        t = np.ascontiguousarray(np.asarray(self.t, dtype=np.float64))
        if t.ndim != 1 or t.size < 2:
            raise ConfigError("time grid needs at least one step")
        if not np.all(np.diff(t) > 0.0):
            raise ConfigError("time points must be strictly increasing")
        object.__setattr__(self, "t", t)

    @classmethod
    def uniform(cls, t_end, n_steps, t_start=0.0):
        if n_steps < 1:
            raise ConfigError("time grid needs at least one step")
        return cls(np.linspace(t_start, t_end, int(n_steps) + 1))

    @property
    def n_steps(self):
        return self.t.size - 1

    @property
    def dt(self):
        return np.diff(self.t)


@dataclass(frozen=True)
class BoundarySpec:
    """One side of the slab: reflective, vacuum, or incident flux data.

    ``j_in`` is the incoming partial current and ``p`` the half-range
    boundary functional used by the moment solver's Marshak-type rows.
    """

    kind: str = "reflective"
    j_in: float = 0.0
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in BOUNDARY_KINDS:
            raise ConfigError(f"unknown boundary kind {self.kind!r}")


@dataclass(frozen=True)
class ImpulseSource:
    """Point impulse: all weight emitted at one position and time."""

    x: float = 0.0
    time: float = 0.0
    weight: float = 1.0

    def __post_init__(self):
        if self.weight <= 0.0:
            raise ConfigError("source weight must be positive")


@dataclass(frozen=True)
class WindowParams:
    rho: float = 2.5
    eps_min: float = 1e-4
    front_eps: float = 1e-4
    front_wmin: float = 1e-4
    front_mod_enabled: bool = True
    split_cap: int = 1000

    def __post_init__(self):
        if self.rho < 1.0:
            raise ConfigError("window width parameter rho must be >= 1")
        if not (0.0 < self.eps_min < 1.0):
            raise ConfigError("eps_min must lie in (0, 1)")
        if self.front_eps <= 0.0 or self.front_wmin <= 0.0:
            raise ConfigError("front modification parameters must be positive")
        if self.split_cap < 1:
            raise ConfigError("split_cap must be >= 1")


@dataclass(frozen=True)
class ProblemSpec:
    """Complete run description consumed by the driver."""

    mesh: Mesh1D
    material: Material
    time: TimeGrid
    speed: float
    source: ImpulseSource
    boundary_left: BoundarySpec = field(default_factory=BoundarySpec)
    boundary_right: BoundarySpec = field(default_factory=BoundarySpec)
    mode: str = "analog"
    ww_params: WindowParams = field(default_factory=WindowParams)
    filter_k: int = 2
    n_histories: int = 100_000
    n_batches: int = 20
    seed: int = 1
    population_target: int | None = None  # None disables combing

    def __post_init__(self):
        if self.speed <= 0.0:
            raise ConfigError("particle speed must be positive")
        if self.mode not in RUN_MODES:
            raise ConfigError(f"unknown run mode {self.mode!r}")
        if self.filter_k < 0:
            raise ConfigError("filter_k must be nonnegative")
        if self.n_batches < 1:
            raise ConfigError("need at least one batch")
        if self.n_histories < self.n_batches:
            raise ConfigError("n_histories must be >= n_batches")
        if self.population_target is not None and self.population_target < 1:
            raise ConfigError("population_target must be >= 1 (or None)")
        if not (self.mesh.edges[0] <= self.source.x <= self.mesh.edges[-1]):
            raise ConfigError("source position outside the mesh")
        if self.source.time != self.time.t[0]:
            raise ConfigError("impulse emission time must equal the start of the time grid")

    def replace(self, **kwargs):
        from dataclasses import replace as _replace

        return _replace(self, **kwargs)
