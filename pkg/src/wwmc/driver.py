"""Timestep orchestration.

Each step runs in two phases.  Windows are first built from the
mode-dependent auxiliary flux (previous census flux, a semi-implicit
moment solve, or a reference table).  The even-indexed half of the census
bank is advanced; in the hybrid modes the closure functional estimated
from those histories' end-of-step states drives a fully implicit re-solve
and a window rebuild before the odd half runs.  Census moments, batch
statistics, and population control close the step.

Window centers are relative (peak = 1); applying them to particles uses
the run's source birth weight as the scale, which puts the window bracket
on the population's actual weight scale for any source normalization.
"""

import logging
import time as _time
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateWindowError, ExtinctionError, ReferenceLoadError
from .model import locate_cell
from .moment_solver import ClosureData, solve_step
from .rng import U64_COMB_SALT, domain_base, next_u01
from .smoothing import moving_average
from .tallies import census_moments, edges_from_cell_averages, finalize_statistics
from .transport import advance_bank, comb_population, impulse_source, total_weight
from .transport import (
    N_CAP_HITS,
    N_MEMBERSHIP_VIOLATIONS,
    N_ROULETTE_BOOSTS,
    N_ROULETTE_KILLS,
    N_SPLIT_DAUGHTERS,
    N_SPLIT_EVENTS,
)
from .windows import build_window_set, front_modification_is_monotone

log = logging.getLogger(__name__)


@dataclass
class TimestepRecord:
    """Everything persisted for one timestep."""

    step: int
    t_start: float
    t_end: float
    flux_mean: np.ndarray
    flux_sigma: np.ndarray
    flux_rel_sigma: np.ndarray
    fom: np.ndarray
    census_phi: np.ndarray
    census_sm_raw: np.ndarray
    census_sm_filtered: np.ndarray
    census_j: np.ndarray
    counts: np.ndarray
    census_weight: float
    census_weight_by_batch: np.ndarray
    n_census: int
    time_transport: float
    time_solver: float
    time_total: float
    aux_phi: np.ndarray | None = None
    window_center_raw: np.ndarray | None = None
    window_center_mod: np.ndarray | None = None
    window_floor: np.ndarray | None = None
    window_ceiling: np.ndarray | None = None


@dataclass
class RunResult:
    records: list
    warnings: dict = field(default_factory=dict)


@dataclass
class _CensusState:
    """Raw time-layer moments carried from step n-1 into step n."""

    phi: np.ndarray
    sm: np.ndarray
    j_cells: np.ndarray


def build_closure_from_tallies(state, mesh, filter_k, bc_left, bc_right, sm_curr=None):
    """Filtered ClosureData from raw census moments of the previous layer.

    The cell-averaged current is filtered first, then interpolated to the
    edges; the optional mid-step closure estimate is filtered the same way.
    """
    phi_f = np.maximum(moving_average(state.phi, filter_k), 0.0)
    sm_f = moving_average(state.sm, filter_k)
    j_cells_f = moving_average(state.j_cells, filter_k)
    j_edges = edges_from_cell_averages(j_cells_f, mesh.widths, bc_left.kind, bc_right.kind)
    sm_curr_f = None if sm_curr is None else moving_average(sm_curr, filter_k)
    return ClosureData(
        phi_prev=phi_f,
        j_prev_edges=j_edges,
        sm_prev=sm_f,
        sm_curr=sm_curr_f,
    )


def _impulse_state(spec):
    """Analytic time-layer moments of the isotropic point impulse."""
    n = spec.mesh.n_cells
    phi = np.zeros(n)
    cell0 = locate_cell(spec.source.x, spec.mesh)
    phi[cell0] = spec.source.weight / spec.mesh.widths[cell0]
    return _CensusState(phi=phi, sm=np.zeros(n), j_cells=np.zeros(n))


class Driver:
    def __init__(self, spec, reference=None, workers=1):
        self.spec = spec
        self.reference = reference
        self.workers = int(workers)
        if spec.mode == "ww-reference":
            if reference is None:
                raise ReferenceLoadError("ww-reference mode needs a loaded reference table")
            if not reference.covers(spec.time.t[1:]):
                raise ReferenceLoadError("reference table does not cover the run's time grid")
        self.warnings = {
            "split_cap_hits": 0,
            "membership_violations": 0,
            "degenerate_window_fallbacks": 0,
            "front_modification_non_monotone": False,
        }
        p = spec.ww_params
        if spec.mode != "analog" and p.front_mod_enabled:
            if not front_modification_is_monotone(p.front_eps, p.front_wmin):
                self.warnings["front_modification_non_monotone"] = True
                log.warning(
                    "front modification is non-monotone over [w_min, 1] for "
                    "eps=%g, w_min=%g; window ordering is not preserved there",
                    p.front_eps,
                    p.front_wmin,
                )

    # -- auxiliary flux per mode ------------------------------------------

    def _solve_aux(self, state, scheme, dt, step, sm_curr=None):
        spec = self.spec
        closure = build_closure_from_tallies(
            state, spec.mesh, spec.filter_k, spec.boundary_left, spec.boundary_right, sm_curr
        )
        n = spec.mesh.n_cells
        xs = spec.material.at_step(step, n)
        xs_curr = (xs[0], xs[1], xs[2], spec.material.nu_f)
        xsp = spec.material.at_step(max(step - 1, 0), n)
        xs_prev = (xsp[0], xsp[1], xsp[2], spec.material.nu_f)
        return solve_step(
            closure,
            spec.mesh,
            xs_curr,
            xs_prev,
            spec.speed,
            dt,
            scheme,
            spec.boundary_left,
            spec.boundary_right,
        )

    def _aux_phi(self, step, state, dt, sm_curr=None):
        """Auxiliary flux for window centers; None in analog mode."""
        spec = self.spec
        mode = spec.mode
        if mode == "analog":
            return None, 0.0
        t0 = _time.perf_counter()
        if mode == "ww-previous":
            phi = np.maximum(moving_average(state.phi, spec.filter_k), 0.0)
        elif mode == "ww-reference":
            phi = self.reference.phi_at(spec.time.t[step + 1])
        else:
            scheme = "be" if mode == "ww-losm-be" else "cn"
            phi = self._solve_aux(state, scheme, dt, step, sm_curr).phi
        return phi, _time.perf_counter() - t0

    def _windows_from_aux(self, phi_aux):
        spec = self.spec
        if phi_aux is None:
            return None
        scale = spec.source.weight / spec.n_histories
        try:
            return build_window_set(phi_aux, spec.ww_params, weight_scale=scale)
        except DegenerateWindowError:
            self.warnings["degenerate_window_fallbacks"] += 1
            log.warning("auxiliary flux is identically zero; running the step analog")
            return None

    # -- main loop ---------------------------------------------------------

    def run(self):
        spec = self.spec
        mesh = spec.mesh
        n_cells = mesh.n_cells
        refl_l = spec.boundary_left.kind == "reflective"
        refl_r = spec.boundary_right.kind == "reflective"
        hybrid = spec.mode in ("ww-losm-be", "ww-losm-cn")

        bank = impulse_source(spec)
        state = _impulse_state(spec)
        records = []

        for step in range(spec.time.n_steps):
            step_t0 = _time.perf_counter()
            t_start = spec.time.t[step]
            t_end = spec.time.t[step + 1]
            dt = t_end - t_start
            xs = spec.material.at_step(step, n_cells)
            time_solver = 0.0

            if bank.shape[0] == 0:
                raise ExtinctionError(
                    f"population died out before step {step}; increase n_histories"
                )

            # phase 0: windows from the mode's auxiliary flux
            phi_aux, t_solve = self._aux_phi(step, state, dt)
            time_solver += t_solve
            windows = self._windows_from_aux(phi_aux)

            sel_even = np.arange(0, bank.shape[0], 2)
            sel_odd = np.arange(1, bank.shape[0], 2)
            w_bank = total_weight(bank)

            # phase 1: first half of the histories
            t0 = _time.perf_counter()
            out1, track1, ctr1 = advance_bank(
                bank, sel_even, mesh, xs, spec.material.nu_f, spec.speed,
                t_end, dt, refl_l, refl_r, windows,
                n_batches=spec.n_batches, workers=self.workers,
            )
            time_transport = _time.perf_counter() - t0

            # phase 2 (hybrid modes): mid-step closure update and re-solve
            if hybrid:
                w_half = float(np.sum(bank["w"][sel_even]))
                if out1.shape[0] and w_half > 0.0:
                    _, sm_mid, _, _ = census_moments(
                        out1["x"], out1["mu"], out1["w"], out1["cell"], n_cells, mesh.widths
                    )
                    sm_mid *= w_bank / w_half
                    t0 = _time.perf_counter()
                    scheme = "be" if spec.mode == "ww-losm-be" else "cn"
                    phi_aux2 = self._solve_aux(state, scheme, dt, step, sm_curr=sm_mid).phi
                    time_solver += _time.perf_counter() - t0
                    updated = self._windows_from_aux(phi_aux2)
                    if updated is not None:
                        windows = updated
                        phi_aux = phi_aux2

            # phase 3: remaining histories
            t0 = _time.perf_counter()
            out2, track2, ctr2 = advance_bank(
                bank, sel_odd, mesh, xs, spec.material.nu_f, spec.speed,
                t_end, dt, refl_l, refl_r, windows,
                n_batches=spec.n_batches, workers=self.workers,
            )
            time_transport += _time.perf_counter() - t0

            census = np.concatenate([out1, out2])
            track = track1 + track2
            counters = ctr1 + ctr2
            self.warnings["split_cap_hits"] += int(counters[N_CAP_HITS])
            self.warnings["membership_violations"] += int(counters[N_MEMBERSHIP_VIOLATIONS])

            if census.shape[0] == 0:
                raise ExtinctionError(
                    f"no particles reached census at step {step}; increase n_histories"
                )

            phi_c, sm_c, j_c, counts = census_moments(
                census["x"], census["mu"], census["w"], census["cell"], n_cells, mesh.widths
            )
            stats = finalize_statistics(track, time_transport)

            records.append(
                TimestepRecord(
                    step=step,
                    t_start=t_start,
                    t_end=t_end,
                    flux_mean=stats.mean,
                    flux_sigma=stats.sigma,
                    flux_rel_sigma=stats.rel_sigma,
                    fom=stats.fom,
                    census_phi=phi_c,
                    census_sm_raw=sm_c,
                    census_sm_filtered=moving_average(sm_c, spec.filter_k),
                    census_j=j_c,
                    counts=counts,
                    census_weight=total_weight(census),
                    census_weight_by_batch=np.bincount(
                        census["batch"], weights=census["w"], minlength=spec.n_batches
                    ),
                    n_census=census.shape[0],
                    time_transport=time_transport,
                    time_solver=time_solver,
                    time_total=_time.perf_counter() - step_t0,
                    aux_phi=None if phi_aux is None else np.asarray(phi_aux, dtype=np.float64),
                    window_center_raw=None if windows is None else windows.centers_raw,
                    window_center_mod=None if windows is None else windows.centers,
                    window_floor=None if windows is None else windows.floors,
                    window_ceiling=None if windows is None else windows.ceilings,
                )
            )

            state = _CensusState(phi=phi_c, sm=sm_c, j_cells=j_c)

            # population control: comb back to the target when exceeded
            if (
                spec.population_target is not None
                and census.shape[0] > spec.population_target
            ):
                base = domain_base(np.uint64(spec.seed), U64_COMB_SALT, np.uint64(step))
                u0, _ = next_u01(np.uint64(base), np.uint64(0))
                bank = comb_population(census, spec.population_target, u0)
            else:
                bank = census

        return RunResult(records=records, warnings=self.warnings)


def run(spec, reference=None, workers=1):
    """Run the full time-dependent simulation described by `spec`."""
    return Driver(spec, reference=reference, workers=workers).run()
