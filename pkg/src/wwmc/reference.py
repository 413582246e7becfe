"""Reference solutions and error metrics.

The benchmark's analytic flux is consumed as a tabulated CSV (header
``t,cell_index,x_center,phi``) rather than evaluated in closed form; a
high-resolution run of this code (or published benchmark tables) fills it.
Also provides the exact total-weight growth law of the homogeneous
multiplying medium and pointwise relative error against a reference field.
"""

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ReferenceLoadError
from .model import effective_scattering_ratio

TIME_MATCH_TOL = 1e-9
REFERENCE_HEADER = ["t", "cell_index", "x_center", "phi"]


@dataclass
class ReferenceTable:
    times: np.ndarray  # (T,)
    phi: np.ndarray  # (T, I) cell-averaged flux
    x_centers: np.ndarray  # (I,)
    provenance: str = ""

    def phi_at(self, t):
        """Reference flux row whose time matches t within the tolerance."""
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > TIME_MATCH_TOL:
            raise ReferenceLoadError(
                f"reference table has no entry for t = {t!r} (nearest {self.times[k]!r})"
            )
        return self.phi[k]

    def covers(self, times):
        return all(np.min(np.abs(self.times - t)) <= TIME_MATCH_TOL for t in times)


def load_reference(path, n_cells=None):
    """Load and validate a reference table; errors name the offending field."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != REFERENCE_HEADER:
                raise ReferenceLoadError(
                    f"reference header must be exactly {','.join(REFERENCE_HEADER)!r}, got {header!r}"
                )
            rows = [(float(r[0]), int(r[1]), float(r[2]), float(r[3])) for r in reader if r]
    except OSError as exc:
        raise ReferenceLoadError(f"cannot read reference file {path!r}: {exc}") from exc
    except (ValueError, IndexError) as exc:
        raise ReferenceLoadError(f"malformed reference row in {path!r}: {exc}") from exc
    if not rows:
        raise ReferenceLoadError("reference file has no data rows")

    times = []
    for t, _, _, _ in rows:
        if not times or t != times[-1]:
            times.append(t)
    times = np.asarray(times)
    if np.any(np.diff(times) <= 0):
        raise ReferenceLoadError("reference times are not strictly increasing")

    per_time = len(rows) // times.size
    if per_time * times.size != len(rows):
        raise ReferenceLoadError("reference rows are not a complete (time x cell) grid")
    if n_cells is not None and per_time != n_cells:
        raise ReferenceLoadError(
            f"reference cell count {per_time} does not match the run mesh ({n_cells} cells)"
        )

    phi = np.empty((times.size, per_time))
    x_centers = np.empty(per_time)
    for k, (t, ci, xc, val) in enumerate(rows):
        ti, cj = divmod(k, per_time)
        if cj != ci:
            raise ReferenceLoadError(
                f"cell_index out of order at data row {k}: expected {cj}, got {ci}"
            )
        if abs(rows[ti * per_time][0] - t) > 0:
            raise ReferenceLoadError(f"time changes mid-block at data row {k}")
        phi[ti, cj] = val
        if ti == 0:
            x_centers[cj] = xc
    return ReferenceTable(times=times, phi=phi, x_centers=x_centers, provenance=str(path))


def save_reference(path, times, phi, x_centers):
    """Write a table in the exact load format."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REFERENCE_HEADER)
        for k, t in enumerate(times):
            for c in range(len(x_centers)):
                writer.writerow([repr(float(t)), c, repr(float(x_centers[c])), repr(float(phi[k][c]))])


def growth_law(t, spec):
    """Total weight W0 * exp((c - 1) * sigma_t * v * t) of the unbounded medium.

    Valid while the wavefront stays inside the slab; outside that regime a
    warning is issued and the value returned anyway.
    """
    c = effective_scattering_ratio(spec.material)
    sigma_t = float(np.max(spec.material.sigma_t))
    half_width = 0.5 * (spec.mesh.edges[-1] - spec.mesh.edges[0])
    if spec.speed * t >= half_width:
        warnings.warn(
            "growth law evaluated outside the infinite-medium regime "
            f"(v*t = {spec.speed * t:g} >= half-width {half_width:g})",
            stacklevel=2,
        )
    return spec.source.weight * np.exp((c - 1.0) * sigma_t * spec.speed * t)


def relative_error(run_phi, ref_phi, threshold=0.0):
    """|phi - phi_ref| / phi_ref where phi_ref > threshold, NaN elsewhere."""
    run_phi = np.asarray(run_phi, dtype=np.float64)
    ref_phi = np.asarray(ref_phi, dtype=np.float64)
    if run_phi.shape != ref_phi.shape:
        raise ValueError("flux and reference must have matching shapes")
    out = np.full_like(run_phi, np.nan)
    ok = ref_phi > threshold
    out[ok] = np.abs(run_phi[ok] - ref_phi[ok]) / ref_phi[ok]
    return out
