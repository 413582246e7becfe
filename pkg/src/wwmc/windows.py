"""Weight-window construction and the split/roulette policy.

Centers come from the auxiliary flux normalized to its maximum, lifted by
the minimum-center parameter so no cell window collapses to zero:

    center_i = (phi_i / max phi) * (1 - eps_min) + eps_min

An optional wavefront modification multiplies each center by
1 + (1/eps - 1) * exp(-(center - w_min)/eps), which raises near-floor
centers toward 1 and suppresses runaway splitting across steep fronts.
Ceilings and floors are center * rho and center / rho.

Centers are relative (max = 1).  When checking a particle they are scaled
by the run's birth weight so the window bracket sits on the actual weight
scale of the population.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWindowError


@dataclass
class WindowSet:
    """Per-cell window centers (relative units) with derived bounds."""

    centers_raw: np.ndarray
    centers: np.ndarray
    floors: np.ndarray
    ceilings: np.ndarray
    rho: float
    front_modified: bool
    weight_scale: float = 1.0
    split_cap: int = 1000


def compute_centers(phi_aux, eps_min):
    """Normalized window centers in [eps_min, 1]; negatives clamp to zero first."""
    phi = np.maximum(np.asarray(phi_aux, dtype=np.float64), 0.0)
    peak = phi.max() if phi.size else 0.0
    if peak <= 0.0:
        raise DegenerateWindowError("auxiliary flux is identically zero")
    return (phi / peak) * (1.0 - eps_min) + eps_min


def apply_front_modification(centers, eps, w_min):
    """Raise centers near w_min toward 1 to curb splitting at sharp fronts."""
    if eps <= 0.0:
        raise ValueError("front modification eps must be positive")
    centers = np.asarray(centers, dtype=np.float64)
    return centers * (1.0 + (1.0 / eps - 1.0) * np.exp(-(centers - w_min) / eps))


def front_modification_is_monotone(eps, w_min, lo=None, hi=1.0, n=20001):
    """Numerical monotonicity scan of the modification over [w_min, 1].

    The modification is not monotone for every (eps, w_min); a dip just
    above w_min trades window ordering for splitting control.  The driver
    records a warning when the configured parameters are in that regime.
    """
    lo = w_min if lo is None else lo
    grid = np.linspace(lo, hi, n)
    mod = apply_front_modification(grid, eps, w_min)
    return bool(np.all(np.diff(mod) >= -1e-15))


def build_window_set(phi_aux, params, weight_scale=1.0):
    """WindowSet from an auxiliary flux and WindowParams."""
    raw = compute_centers(phi_aux, params.eps_min)
    if params.front_mod_enabled:
        centers = apply_front_modification(raw, params.front_eps, params.front_wmin)
    else:
        centers = raw.copy()
    return WindowSet(
        centers_raw=raw,
        centers=centers,
        floors=centers / params.rho,
        ceilings=centers * params.rho,
        rho=params.rho,
        front_modified=params.front_mod_enabled,
        weight_scale=float(weight_scale),
        split_cap=params.split_cap,
    )


# check_particle outcomes
PASS = 0
SPLIT = 1
ROULETTE_SURVIVE = 2
ROULETTE_KILL = 3


def split_count(w, center, ceiling, cap):
    """Number of daughters for an over-ceiling particle.

    Targets the window center, capped at `cap`; if the capped count would
    leave daughters above the ceiling the cap is abandoned.  Returns
    (n, cap_was_hit).
    """
    n = math.ceil(w / center)
    if n <= cap:
        return n, False
    if w / cap <= ceiling:
        return cap, True
    return n, True


def check_particle(w, cell, windows, stream):
    """Window decision for weight w in `cell`.

    Returns (action, value): SPLIT -> daughter count, ROULETTE_SURVIVE ->
    boosted weight, PASS / ROULETTE_KILL -> 0.  Expected post-action total
    weight equals w in every branch.
    """
    if w <= 0.0:
        raise ValueError("window check requires positive weight")
    s = windows.weight_scale
    center = windows.centers[cell] * s
    floor = windows.floors[cell] * s
    ceiling = windows.ceilings[cell] * s
    if w > ceiling:
        n, _ = split_count(w, center, ceiling, windows.split_cap)
        return SPLIT, n
    if w < floor:
        if stream.uniform() < w / center:
            return ROULETTE_SURVIVE, center
        return ROULETTE_KILL, 0
    return PASS, 0
