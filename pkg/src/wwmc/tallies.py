"""Monte Carlo estimators and their batch statistics.

Track-length tallies accumulate w * path / (dx * dt) per (batch, cell) and
give the time-averaged scalar flux over a step.  Time-layer (census)
tallies score the banked particles at the step boundary and provide the
inputs for the deterministic closure:

    phi_i += w / dx_i
    sm_i  += w * (1/3 - mu^2) / dx_i      (second-moment functional)
    j_i   += w * mu / dx_i                (cell-averaged current)

Census moments are in banked-weight units; every closure input carries the
same normalization, and window centers are invariant under common
rescaling, so the absolute unit drops out of the hybrid solve.
"""

from dataclasses import dataclass

import numpy as np

from .errors import MeshError


class TrackLengthTally:
    """Per-(cell, batch) sums of w * length / (dx * dt)."""

    def __init__(self, n_cells, n_batches, widths, dt):
        self.n_cells = int(n_cells)
        self.n_batches = int(n_batches)
        self.widths = np.asarray(widths, dtype=np.float64)
        self.dt = float(dt)
        self.sums = np.zeros((self.n_batches, self.n_cells))

    def score(self, cell, batch, w, length):
        if length < 0.0 or w <= 0.0:
            raise ValueError("track score needs length >= 0 and w > 0")
        self.sums[batch, cell] += w * length / (self.widths[cell] * self.dt)

    def merge(self, other_sums):
        self.sums += other_sums


def census_moments(xs, mus, ws, cells, n_cells, widths):
    """Time-layer moments (phi, sm, j, counts) of a banked ensemble."""
    dx = np.asarray(widths, dtype=np.float64)[cells]
    phi = np.bincount(cells, weights=ws / dx, minlength=n_cells)
    sm = np.bincount(cells, weights=ws * (1.0 / 3.0 - mus * mus) / dx, minlength=n_cells)
    j = np.bincount(cells, weights=ws * mus / dx, minlength=n_cells)
    counts = np.bincount(cells, minlength=n_cells)
    return phi, sm, j, counts


def edges_from_cell_averages(j_cells, widths, left_kind="reflective", right_kind="reflective"):
    """Cell-edge values from cell averages by width-weighted interpolation.

    Interior edge e between cells e-1 and e gets the linear interpolant at
    the edge position; reflective boundary edges are exactly zero, other
    boundary kinds take the nearest cell value.
    """
    j_cells = np.asarray(j_cells, dtype=np.float64)
    widths = np.asarray(widths, dtype=np.float64)
    n = j_cells.size
    if n < 2:
        raise MeshError("edge interpolation needs at least 2 cells")
    edges = np.empty(n + 1)
    wl = widths[:-1]
    wr = widths[1:]
    edges[1:-1] = (j_cells[:-1] * wr + j_cells[1:] * wl) / (wl + wr)
    edges[0] = 0.0 if left_kind == "reflective" else j_cells[0]
    edges[-1] = 0.0 if right_kind == "reflective" else j_cells[-1]
    return edges


@dataclass
class Statistics:
    """Per-cell batch statistics for one timestep."""

    mean: np.ndarray
    sigma: np.ndarray
    rel_sigma: np.ndarray
    fom: np.ndarray
    wall_time: float
    n_infinite_fom: int = 0


def finalize_statistics(track_sums, wall_time):
    """Mean / sigma-of-the-mean / relative sigma / figure of merit per cell.

    Each batch alone is an independent estimate (scaled by the batch
    count); sigma is the standard error of their mean.  FOM = 1/(sigma^2 T)
    with T the transport wall time of the step.  Conventions: cells with
    zero flux report rel_sigma = 0 and FOM = 0; sigma = 0 with nonzero
    flux reports FOM = +inf (counted, excluded from plots downstream).
    """
    track_sums = np.asarray(track_sums, dtype=np.float64)
    n_batches = track_sums.shape[0]
    if n_batches < 2:
        raise ValueError("batch statistics need at least 2 batches")
    batch_est = n_batches * track_sums
    mean = track_sums.sum(axis=0)
    sigma = batch_est.std(axis=0, ddof=1) / np.sqrt(n_batches)

    rel_sigma = np.zeros_like(mean)
    nz = mean > 0.0
    rel_sigma[nz] = sigma[nz] / mean[nz]

    fom = np.zeros_like(mean)
    t = max(float(wall_time), 0.0)
    live = nz & (sigma > 0.0)
    if t > 0.0:
        fom[live] = 1.0 / (sigma[live] ** 2 * t)
    exact = nz & (sigma == 0.0)
    fom[exact] = np.inf
    return Statistics(
        mean=mean,
        sigma=sigma,
        rel_sigma=rel_sigma,
        fom=fom,
        wall_time=t,
        n_infinite_fom=int(np.count_nonzero(exact)),
    )
