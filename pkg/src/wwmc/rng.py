"""Reproducible counter-based random streams.

Every source history owns a substream keyed by (master seed, history id);
a draw is a pure hash of (stream base, draw counter), so results do not
depend on how many draws any other history consumed or on how histories
are scheduled across workers.  Daughter particles (fission progeny, window
splits, population-control copies) derive fresh substreams from their
parent's base and a spawn ordinal.

All 64-bit arithmetic lives in the helpers below.  Under numba the
hardware uint64 branch runs; interpreted, the Python-int branch runs with
explicit masking.  The two are bit-identical.
"""

import math

import numpy as np

from .accel import NUMBA_ENABLED, njit

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_SPAWN_SALT = 0x5851F42D4C957F2D
_COMB_SALT = 0xD1342543DE82EF95

U64_GOLDEN = np.uint64(_GOLDEN)
U64_SPAWN_SALT = np.uint64(_SPAWN_SALT)
U64_COMB_SALT = np.uint64(_COMB_SALT)
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


@njit
def mix64(z):
    """Finalizing 64-bit mix (a bijection on uint64)."""
    if NUMBA_ENABLED:
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))
    else:
        z = int(z)
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return np.uint64(z ^ (z >> 31))


@njit
def history_base(seed, history_id):
    """Stream base for one source history."""
    if NUMBA_ENABLED:
        return mix64(mix64(seed) + (history_id + np.uint64(1)) * U64_GOLDEN)
    else:
        acc = (int(mix64(seed)) + (int(history_id) + 1) * _GOLDEN) & _MASK
        return mix64(np.uint64(acc))


@njit
def child_base(base, n_spawned):
    """Substream for the n_spawned-th particle spawned from `base`."""
    if NUMBA_ENABLED:
        return mix64((base ^ U64_SPAWN_SALT) + (n_spawned + np.uint64(1)) * U64_GOLDEN)
    else:
        acc = ((int(base) ^ _SPAWN_SALT) + (int(n_spawned) + 1) * _GOLDEN) & _MASK
        return mix64(np.uint64(acc))


@njit
def domain_base(seed, salt, ordinal):
    """Stream base for per-step driver draws (population control etc.)."""
    if NUMBA_ENABLED:
        return mix64((mix64(seed) ^ salt) + (ordinal + np.uint64(1)) * U64_GOLDEN)
    else:
        acc = ((int(mix64(seed)) ^ int(salt)) + (int(ordinal) + 1) * _GOLDEN) & _MASK
        return mix64(np.uint64(acc))


@njit
def next_u01(base, ctr):
    """Uniform draw strictly inside (0, 1); returns (value, advanced counter).

    Exact zeros (probability 2**-53) are rejected so -log(u) stays finite.
    """
    while True:
        if NUMBA_ENABLED:
            ctr = ctr + np.uint64(1)
            bits = mix64(base + ctr * U64_GOLDEN) >> np.uint64(11)
        else:
            ctr = np.uint64((int(ctr) + 1) & _MASK)
            bits = np.uint64((int(mix64(np.uint64((int(base) + int(ctr) * _GOLDEN) & _MASK)))) >> 11)
        if bits != np.uint64(0):
            return float(bits) * _INV_2_53, ctr


# -- sampling transforms -------------------------------------------------
# Kept separate from the draw so closed-form examples are testable without
# a stream.


@njit
def mu_from_uniform(u):
    """Isotropic direction cosine in slab geometry."""
    return 2.0 * u - 1.0


@njit
def distance_from_uniform(u, sigma_t):
    """Analog free-flight distance for total cross section sigma_t."""
    return -math.log(u) / sigma_t


@njit
def multiplicity_from_uniform(u, nu_bar):
    """Integer secondary count with expectation exactly nu_bar."""
    base = int(nu_bar)
    frac = nu_bar - base
    if u < frac:
        return base + 1
    return base


class RngStream:
    """Convenience stateful view of one substream (key, (history id, draw index)).

    The Monte Carlo kernels use the stateless helpers directly; this class
    serves sampling at the API level and in tests.
    """

    __slots__ = ("base", "ctr")

    def __init__(self, seed, history_id, _base=None):
        if _base is not None:
            self.base = np.uint64(_base)
        else:
            self.base = np.uint64(history_base(np.uint64(seed), np.uint64(history_id)))
        self.ctr = np.uint64(0)

    def spawn(self, ordinal):
        return RngStream(0, 0, _base=child_base(self.base, np.uint64(ordinal)))

    def uniform(self):
        u, ctr = next_u01(self.base, self.ctr)
        self.ctr = np.uint64(ctr)
        return u

    def isotropic_mu(self):
        return mu_from_uniform(self.uniform())

    def flight_distance(self, sigma_t):
        if sigma_t <= 0.0:
            raise ValueError("flight sampling requires sigma_t > 0")
        return distance_from_uniform(self.uniform(), sigma_t)

    def integer_multiplicity(self, nu_bar):
        if nu_bar < 0.0:
            raise ValueError("nu_bar must be nonnegative")
        return multiplicity_from_uniform(self.uniform(), nu_bar)
