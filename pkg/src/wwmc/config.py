"""Configuration files: flat key/value sections mapping onto ProblemSpec.

Example (the shipped ``azurv1_impulse`` preset)::

    [domain]
    x_min = -20.5
    x_max = 20.5
    cells = 201

    [material]
    sigma_t = 1.0
    sigma_s = 0.333333333333333333
    sigma_f = 0.333333333333333333
    nu_f = 2.3
    speed = 1.0

    [time]
    t_end = 10.0
    steps = 20

    [source]
    x = 0.0
    time = 0.0
    weight = 1.0

    [boundary]
    left = reflective
    right = reflective

    [mc]
    histories = 100000
    batches = 20
    seed = 1
    population_target = auto     ; auto = histories, none disables combing

    [windows]
    rho = 2.5
    eps_min = 1e-4
    front_eps = 1e-4
    front_wmin = 1e-4
    front_mod_enabled = true
    split_cap = 1000

    [filter]
    k = 2

    [run]
    mode = analog
"""

import configparser
from importlib import resources

from .errors import ConfigError
from .model import (
    BoundarySpec,
    ImpulseSource,
    Material,
    Mesh1D,
    ProblemSpec,
    TimeGrid,
    WindowParams,
)

_REQUIRED_SECTIONS = ("domain", "material", "time", "source", "mc")


def _get(cp, section, key, conv, default=None):
    if not cp.has_option(section, key):
        if default is None:
            raise ConfigError(f"missing [{section}] {key}")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc


def _bool(raw):
    v = raw.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def load_config(path, overrides=None):
    """Parse a config file (or preset name) into a ProblemSpec.

    `overrides` is a mapping of {mode, seed, histories, filter_k, rho}
    applied on top of the file, serving the CLI flags.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    text = _resolve_text(path)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path!r}: {exc}") from exc
    for sec in _REQUIRED_SECTIONS:
        if not cp.has_section(sec):
            raise ConfigError(f"config is missing the [{sec}] section")

    overrides = overrides or {}

    mesh = Mesh1D.uniform(
        _get(cp, "domain", "x_min", float),
        _get(cp, "domain", "x_max", float),
        _get(cp, "domain", "cells", int),
    )
    material = Material(
        sigma_t=_get(cp, "material", "sigma_t", float),
        sigma_s=_get(cp, "material", "sigma_s", float),
        sigma_f=_get(cp, "material", "sigma_f", float),
        nu_f=_get(cp, "material", "nu_f", float),
    )
    speed = _get(cp, "material", "speed", float, 1.0)
    timegrid = TimeGrid.uniform(
        _get(cp, "time", "t_end", float),
        _get(cp, "time", "steps", int),
        _get(cp, "time", "t_start", float, 0.0),
    )
    source = ImpulseSource(
        x=_get(cp, "source", "x", float, 0.0),
        time=_get(cp, "source", "time", float, 0.0),
        weight=_get(cp, "source", "weight", float, 1.0),
    )
    bc_left = BoundarySpec(
        kind=_get(cp, "boundary", "left", str, "reflective"),
        j_in=_get(cp, "boundary", "left_j_in", float, 0.0),
        p=_get(cp, "boundary", "left_p", float, 0.0),
    ) if cp.has_section("boundary") else BoundarySpec()
    bc_right = BoundarySpec(
        kind=_get(cp, "boundary", "right", str, "reflective"),
        j_in=_get(cp, "boundary", "right_j_in", float, 0.0),
        p=_get(cp, "boundary", "right_p", float, 0.0),
    ) if cp.has_section("boundary") else BoundarySpec()

    n_histories = int(overrides.get("histories") or _get(cp, "mc", "histories", int))
    pop_raw = _get(cp, "mc", "population_target", str, "none").strip().lower()
    if pop_raw == "auto":
        population_target = n_histories
    elif pop_raw == "none":
        population_target = None
    else:
        try:
            population_target = int(pop_raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for [mc] population_target: {pop_raw!r}") from exc

    ww = WindowParams(
        rho=float(overrides.get("rho") or _get(cp, "windows", "rho", float, 2.5)),
        eps_min=_get(cp, "windows", "eps_min", float, 1e-4) if cp.has_section("windows") else 1e-4,
        front_eps=_get(cp, "windows", "front_eps", float, 1e-4) if cp.has_section("windows") else 1e-4,
        front_wmin=_get(cp, "windows", "front_wmin", float, 1e-4) if cp.has_section("windows") else 1e-4,
        front_mod_enabled=_get(cp, "windows", "front_mod_enabled", _bool, True) if cp.has_section("windows") else True,
        split_cap=_get(cp, "windows", "split_cap", int, 1000) if cp.has_section("windows") else 1000,
    )

    filter_k = overrides.get("filter_k")
    if filter_k is None:
        filter_k = _get(cp, "filter", "k", int, 2) if cp.has_section("filter") else 2

    mode = overrides.get("mode") or (
        _get(cp, "run", "mode", str, "analog") if cp.has_section("run") else "analog"
    )
    seed = overrides.get("seed")
    if seed is None:
        seed = _get(cp, "mc", "seed", int, 1)

    return ProblemSpec(
        mesh=mesh,
        material=material,
        time=timegrid,
        speed=speed,
        source=source,
        boundary_left=bc_left,
        boundary_right=bc_right,
        mode=mode,
        ww_params=ww,
        filter_k=int(filter_k),
        n_histories=n_histories,
        n_batches=_get(cp, "mc", "batches", int, 20),
        seed=int(seed),
        population_target=population_target,
    )


def _resolve_text(path):
    """Read a config path; bare names resolve against the shipped presets."""
    import os

    if os.path.exists(path):
        with open(path) as fh:
            return fh.read()
    name = str(path)
    if not name.endswith(".cfg"):
        name += ".cfg"
    try:
        return resources.files("wwmc").joinpath("presets", name).read_text()
    except (FileNotFoundError, ModuleNotFoundError) as exc:
        raise ConfigError(f"config file or preset {path!r} not found") from exc


def spec_as_dict(spec):
    """Every effective parameter (defaults included) for the run manifest."""
    return {
        "domain": {
            "x_min": float(spec.mesh.edges[0]),
            "x_max": float(spec.mesh.edges[-1]),
            "cells": spec.mesh.n_cells,
        },
        "material": {
            "sigma_t": spec.material.sigma_t.tolist(),
            "sigma_s": spec.material.sigma_s.tolist(),
            "sigma_f": spec.material.sigma_f.tolist(),
            "nu_f": spec.material.nu_f,
            "speed": spec.speed,
        },
        "time": {"t_start": float(spec.time.t[0]), "t_end": float(spec.time.t[-1]), "steps": spec.time.n_steps},
        "source": {"x": spec.source.x, "time": spec.source.time, "weight": spec.source.weight},
        "boundary": {"left": spec.boundary_left.kind, "right": spec.boundary_right.kind},
        "mc": {
            "histories": spec.n_histories,
            "batches": spec.n_batches,
            "seed": spec.seed,
            "population_target": spec.population_target,
        },
        "windows": {
            "rho": spec.ww_params.rho,
            "eps_min": spec.ww_params.eps_min,
            "front_eps": spec.ww_params.front_eps,
            "front_wmin": spec.ww_params.front_wmin,
            "front_mod_enabled": spec.ww_params.front_mod_enabled,
            "split_cap": spec.ww_params.split_cap,
            "weight_scale": spec.source.weight / spec.n_histories,
        },
        "filter": {"k": spec.filter_k},
        "run": {"mode": spec.mode},
    }
