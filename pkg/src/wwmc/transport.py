"""Analog Monte Carlo history loop over one timestep.

Particles live in structured numpy arrays (one record per particle).  Each
history repeatedly picks the nearest event among collision, cell-edge
crossing, and census, scoring track-length tallies over every flight
segment.  Collisions are analog: scatter (new isotropic direction),
fission (incident killed, integer-sampled progeny emitted isotropically
with the parent weight each), or capture.  Census freezes the particle at
the exact step-end time.  Weight-window checks fire on cell entry and at
birth of source / fission / census-resumed particles; split daughters are
in-window by construction and skip the birth check.

Histories are processed in fixed-size chunks; per-chunk tallies and census
banks are merged in chunk order, so results are bit-identical for any
worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .accel import CHUNK_HISTORIES, NUMBA_ENABLED, njit
from .errors import CorruptedHistoryError, EmptyPopulationError, WwmcError
from .model import locate_cell
from .rng import (
    U64_COMB_SALT,
    child_base,
    domain_base,
    history_base,
    multiplicity_from_uniform,
    next_u01,
)

PARTICLE_DTYPE = np.dtype(
    [
        ("x", np.float64),
        ("mu", np.float64),
        ("t", np.float64),
        ("w", np.float64),
        ("cell", np.int64),
        ("batch", np.int64),
        ("fresh", np.int64),
        ("rng_base", np.uint64),
        ("rng_ctr", np.uint64),
        ("n_spawned", np.uint64),
    ]
)

# advance_chunk status codes
OK = 0
OUT_OVERFLOW = 1
STACK_OVERFLOW = 2
CORRUPT = 3

# counter slots
N_OUT = 0
N_SPLIT_EVENTS = 1
N_SPLIT_DAUGHTERS = 2
N_ROULETTE_KILLS = 3
N_ROULETTE_BOOSTS = 4
N_CAP_HITS = 5
N_MEMBERSHIP_VIOLATIONS = 6
N_COLLISIONS = 7
N_COUNTERS = 8


def new_bank(n):
    return np.zeros(int(n), dtype=PARTICLE_DTYPE)


def total_weight(bank):
    return float(np.sum(bank["w"]))


@njit
def _copy_record(dst, i, src, j):
    dst[i]["x"] = src[j]["x"]
    dst[i]["mu"] = src[j]["mu"]
    dst[i]["t"] = src[j]["t"]
    dst[i]["w"] = src[j]["w"]
    dst[i]["cell"] = src[j]["cell"]
    dst[i]["batch"] = src[j]["batch"]
    dst[i]["fresh"] = src[j]["fresh"]
    dst[i]["rng_base"] = src[j]["rng_base"]
    dst[i]["rng_ctr"] = src[j]["rng_ctr"]
    dst[i]["n_spawned"] = src[j]["n_spawned"]


@njit
def _fill_impulse(bank, seed, x0, t0, w_each, cell0, n_batches):
    n = bank.shape[0]
    for h in range(n):
        base = history_base(seed, np.uint64(h))
        u, ctr = next_u01(base, np.uint64(0))
        bank[h]["x"] = x0
        bank[h]["mu"] = 2.0 * u - 1.0
        bank[h]["t"] = t0
        bank[h]["w"] = w_each
        bank[h]["cell"] = cell0
        bank[h]["batch"] = h * n_batches // n
        bank[h]["fresh"] = 1
        bank[h]["rng_base"] = base
        bank[h]["rng_ctr"] = ctr
        bank[h]["n_spawned"] = np.uint64(0)


def impulse_source(spec, n=None):
    """Census bank of n isotropic particles at the impulse point, t = t0.

    Total weight equals the source weight exactly in expectation and in
    floating point up to the summation of n equal parts.
    """
    n = spec.n_histories if n is None else int(n)
    if n < 1:
        raise ValueError("need at least one source history")
    bank = new_bank(n)
    cell0 = locate_cell(spec.source.x, spec.mesh)
    _fill_impulse(
        bank,
        np.uint64(spec.seed),
        spec.source.x,
        spec.source.time,
        spec.source.weight / n,
        cell0,
        spec.n_batches,
    )
    return bank


def reflect(x, mu, side, edges):
    """Specular reflection at a domain boundary: direction negated."""
    boundary = edges[0] if side == "left" else edges[-1]
    if x != boundary:
        raise ValueError("particle is not on the requested boundary")
    if side == "left" and mu >= 0.0:
        raise ValueError("particle is not leaving through the left boundary")
    if side == "right" and mu <= 0.0:
        raise ValueError("particle is not leaving through the right boundary")
    return x, -mu


@njit
def _advance_chunk(
    bank,
    sel,
    edges,
    widths,
    sig_t,
    sig_s,
    sig_f,
    nu_f,
    speed,
    t_end,
    dt,
    refl_left,
    refl_right,
    has_windows,
    centers,
    floors,
    ceilings,
    w_scale,
    split_cap,
    track,
    out,
    stack,
    counters,
):
    n_cells = widths.shape[0]
    out_cap = out.shape[0]
    stack_cap = stack.shape[0]
    n_out = 0

    for si in range(sel.shape[0]):
        _copy_record(stack, 0, bank, sel[si])
        top = 0
        while top >= 0:
            x = stack[top]["x"]
            mu = stack[top]["mu"]
            t = stack[top]["t"]
            w = stack[top]["w"]
            cell = stack[top]["cell"]
            batch = stack[top]["batch"]
            fresh = stack[top]["fresh"]
            base = stack[top]["rng_base"]
            ctr = stack[top]["rng_ctr"]
            nsp = stack[top]["n_spawned"]
            top -= 1
            alive = True

            # birth check: source / fission / census-resumed particles may
            # start far outside their cell's window
            if has_windows and fresh == 1:
                c = centers[cell] * w_scale
                fl = floors[cell] * w_scale
                cl = ceilings[cell] * w_scale
                if w > cl:
                    n_split = int(math.ceil(w / c))
                    if n_split > split_cap:
                        counters[N_CAP_HITS] += 1
                        if w / split_cap <= cl:
                            n_split = split_cap
                    wd = w / n_split
                    if wd > cl or wd < fl:
                        counters[N_MEMBERSHIP_VIOLATIONS] += 1
                    counters[N_SPLIT_EVENTS] += 1
                    counters[N_SPLIT_DAUGHTERS] += n_split - 1
                    for _ in range(n_split - 1):
                        if top + 1 >= stack_cap:
                            return STACK_OVERFLOW, n_out
                        nsp = nsp + np.uint64(1)
                        top += 1
                        stack[top]["x"] = x
                        stack[top]["mu"] = mu
                        stack[top]["t"] = t
                        stack[top]["w"] = wd
                        stack[top]["cell"] = cell
                        stack[top]["batch"] = batch
                        stack[top]["fresh"] = 0
                        stack[top]["rng_base"] = child_base(base, nsp)
                        stack[top]["rng_ctr"] = np.uint64(0)
                        stack[top]["n_spawned"] = np.uint64(0)
                    w = wd
                elif w < fl:
                    u, ctr = next_u01(base, ctr)
                    if u < w / c:
                        w = c
                        counters[N_ROULETTE_BOOSTS] += 1
                    else:
                        counters[N_ROULETTE_KILLS] += 1
                        alive = False

            while alive:
                if not (math.isfinite(x) and math.isfinite(w) and w > 0.0):
                    return CORRUPT, n_out
                st = sig_t[cell]

                d_census = (t_end - t) * speed
                if d_census < 0.0:
                    d_census = 0.0
                if mu > 0.0:
                    d_edge = (edges[cell + 1] - x) / mu
                elif mu < 0.0:
                    d_edge = (edges[cell] - x) / mu
                else:
                    d_edge = math.inf
                if d_edge < 0.0:
                    d_edge = 0.0
                if st > 0.0:
                    u, ctr = next_u01(base, ctr)
                    d_coll = -math.log(u) / st
                else:
                    d_coll = math.inf

                if d_census <= d_edge and d_census <= d_coll:
                    d = d_census
                    event = 0
                elif d_edge <= d_coll:
                    d = d_edge
                    event = 1
                else:
                    d = d_coll
                    event = 2

                track[batch, cell] += w * d / (widths[cell] * dt)
                x += mu * d
                t += d / speed

                if event == 0:  # census: freeze at the exact layer time
                    if n_out >= out_cap:
                        return OUT_OVERFLOW, n_out
                    out[n_out]["x"] = x
                    out[n_out]["mu"] = mu
                    out[n_out]["t"] = t_end
                    out[n_out]["w"] = w
                    out[n_out]["cell"] = cell
                    out[n_out]["batch"] = batch
                    out[n_out]["fresh"] = 1
                    out[n_out]["rng_base"] = base
                    out[n_out]["rng_ctr"] = ctr
                    out[n_out]["n_spawned"] = nsp
                    n_out += 1
                    alive = False

                elif event == 1:  # cell-edge crossing
                    entered = False
                    if mu > 0.0:
                        edge = cell + 1
                        x = edges[edge]
                        if edge == n_cells:
                            if refl_right:
                                mu = -mu
                            else:
                                alive = False
                        else:
                            cell += 1
                            entered = True
                    else:
                        edge = cell
                        x = edges[edge]
                        if edge == 0:
                            if refl_left:
                                mu = -mu
                            else:
                                alive = False
                        else:
                            cell -= 1
                            entered = True

                    if alive and entered and has_windows:
                        c = centers[cell] * w_scale
                        fl = floors[cell] * w_scale
                        cl = ceilings[cell] * w_scale
                        if w > cl:
                            n_split = int(math.ceil(w / c))
                            if n_split > split_cap:
                                counters[N_CAP_HITS] += 1
                                if w / split_cap <= cl:
                                    n_split = split_cap
                            wd = w / n_split
                            if wd > cl or wd < fl:
                                counters[N_MEMBERSHIP_VIOLATIONS] += 1
                            counters[N_SPLIT_EVENTS] += 1
                            counters[N_SPLIT_DAUGHTERS] += n_split - 1
                            for _ in range(n_split - 1):
                                if top + 1 >= stack_cap:
                                    return STACK_OVERFLOW, n_out
                                nsp = nsp + np.uint64(1)
                                top += 1
                                stack[top]["x"] = x
                                stack[top]["mu"] = mu
                                stack[top]["t"] = t
                                stack[top]["w"] = wd
                                stack[top]["cell"] = cell
                                stack[top]["batch"] = batch
                                stack[top]["fresh"] = 0
                                stack[top]["rng_base"] = child_base(base, nsp)
                                stack[top]["rng_ctr"] = np.uint64(0)
                                stack[top]["n_spawned"] = np.uint64(0)
                            w = wd
                        elif w < fl:
                            u, ctr = next_u01(base, ctr)
                            if u < w / c:
                                w = c
                                counters[N_ROULETTE_BOOSTS] += 1
                            else:
                                counters[N_ROULETTE_KILLS] += 1
                                alive = False

                else:  # collision
                    counters[N_COLLISIONS] += 1
                    u, ctr = next_u01(base, ctr)
                    p_scatter = sig_s[cell] / st
                    p_fission = sig_f[cell] / st
                    if u < p_scatter:
                        u2, ctr = next_u01(base, ctr)
                        mu = 2.0 * u2 - 1.0
                    elif u < p_scatter + p_fission:
                        u2, ctr = next_u01(base, ctr)
                        m = multiplicity_from_uniform(u2, nu_f[cell])
                        for _ in range(m):
                            if top + 1 >= stack_cap:
                                return STACK_OVERFLOW, n_out
                            u3, ctr = next_u01(base, ctr)
                            nsp = nsp + np.uint64(1)
                            top += 1
                            stack[top]["x"] = x
                            stack[top]["mu"] = 2.0 * u3 - 1.0
                            stack[top]["t"] = t
                            stack[top]["w"] = w
                            stack[top]["cell"] = cell
                            stack[top]["batch"] = batch
                            stack[top]["fresh"] = 1
                            stack[top]["rng_base"] = child_base(base, nsp)
                            stack[top]["rng_ctr"] = np.uint64(0)
                            stack[top]["n_spawned"] = np.uint64(0)
                        alive = False
                    else:
                        alive = False

    counters[N_OUT] = n_out
    return OK, n_out


_DUMMY_WINDOW = np.zeros(1)


def advance_bank(
    bank,
    sel,
    mesh,
    xs,
    nu_f,
    speed,
    t_end,
    dt,
    refl_left,
    refl_right,
    windows=None,
    n_batches=1,
    workers=1,
):
    """Advance the selected bank entries through one step.

    Returns (census bank, track sums (B, I), counters).  Work is cut into
    fixed-size chunks merged in chunk order, so output is independent of
    `workers`.
    """
    sig_t, sig_s, sig_f = xs
    n_cells = mesh.n_cells
    nu_arr = np.full(n_cells, float(nu_f)) if np.ndim(nu_f) == 0 else np.asarray(nu_f)
    if sel.size and int(bank["batch"][sel].max()) >= n_batches:
        raise ValueError("bank batch index exceeds the tally batch count")

    if windows is not None:
        has_windows = True
        centers = windows.centers
        floors = windows.floors
        ceilings = windows.ceilings
        w_scale = windows.weight_scale
        split_cap = windows.split_cap
    else:
        has_windows = False
        centers = floors = ceilings = _DUMMY_WINDOW
        w_scale = 1.0
        split_cap = 1

    chunks = [sel[i : i + CHUNK_HISTORIES] for i in range(0, sel.size, CHUNK_HISTORIES)]

    def run_chunk(chunk_sel):
        out_cap = max(4 * chunk_sel.size + 1024, 4096)
        stack_cap = 1 << 14
        while True:
            track = np.zeros((n_batches, n_cells))
            out = new_bank(out_cap)
            stack = new_bank(stack_cap)
            counters = np.zeros(N_COUNTERS, dtype=np.int64)
            status, n_out = _advance_chunk(
                bank,
                chunk_sel,
                mesh.edges,
                mesh.widths,
                sig_t,
                sig_s,
                sig_f,
                nu_arr,
                speed,
                t_end,
                dt,
                refl_left,
                refl_right,
                has_windows,
                centers,
                floors,
                ceilings,
                w_scale,
                split_cap,
                track,
                out,
                stack,
                counters,
            )
            if status == OK:
                return out[:n_out].copy(), track, counters
            if status == OUT_OVERFLOW:
                out_cap *= 4
            elif status == STACK_OVERFLOW:
                stack_cap *= 4
                if stack_cap > 1 << 24:
                    raise WwmcError("secondary-particle stack exceeded 2^24 entries")
            else:
                raise CorruptedHistoryError(
                    "history produced a non-finite position or weight"
                )

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_chunk, chunks))
    else:
        results = [run_chunk(c) for c in chunks]

    track_total = np.zeros((n_batches, n_cells))
    counters_total = np.zeros(N_COUNTERS, dtype=np.int64)
    outs = []
    for out, track, counters in results:
        track_total += track
        counters_total += counters
        outs.append(out)
    census = np.concatenate(outs) if outs else new_bank(0)
    counters_total[N_OUT] = census.shape[0]
    return census, track_total, counters_total


@njit
def _comb_rebase(bases, ordinals, out_bases):
    for i in range(bases.shape[0]):
        out_bases[i] = domain_base(bases[i], U64_COMB_SALT, ordinals[i])


def comb_population(bank, target, u0):
    """Systematic (comb) resampling of the bank to exactly `target` particles.

    Teeth are placed at (j + u0) * W / target along the cumulative-weight
    line; each output particle is a copy of the input particle whose weight
    interval contains the tooth, at uniform weight W / target (the last
    weight absorbs the summation remainder so the total is conserved
    exactly).  Copies receive fresh derived rng substreams.
    """
    if bank.shape[0] == 0:
        raise EmptyPopulationError("cannot resample an empty bank")
    target = int(target)
    if target < 1:
        raise ValueError("population target must be >= 1")
    if not (0.0 <= u0 < 1.0):
        raise ValueError("comb offset must lie in [0, 1)")

    cw = np.cumsum(bank["w"])
    w_total = float(np.sum(bank["w"]))
    teeth = (np.arange(target) + u0) * (w_total / target)
    idx = np.searchsorted(cw, teeth, side="left")
    idx = np.minimum(idx, bank.shape[0] - 1)

    out = bank[idx].copy()
    out["w"] = w_total / target
    for _ in range(4):
        err = w_total - float(np.sum(out["w"]))
        if err == 0.0:
            break
        out["w"][-1] += err

    # copy ordinal within each parent keeps sibling substreams distinct
    ordinals = np.arange(target, dtype=np.uint64) - np.searchsorted(idx, idx, side="left").astype(np.uint64)
    new_bases = np.empty(target, dtype=np.uint64)
    _comb_rebase(out["rng_base"], ordinals, new_bases)
    out["rng_base"] = new_bases
    out["rng_ctr"] = 0
    out["n_spawned"] = 0
    out["fresh"] = 1
    return out
