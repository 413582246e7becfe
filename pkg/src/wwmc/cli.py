"""Command-line entry point: run configs, emit CSVs and a run manifest.

Output schema: one CSV per quantity with columns ``step,t,cell,x_center,value``
(the windows file carries ``center_raw,center_modified,floor,ceiling``
instead of ``value``).  ``manifest.json`` echoes every effective parameter
plus timings and warning counters.  All CSVs except ``fom.csv`` are
byte-reproducible for a fixed seed; the figure of merit divides by measured
wall time and is therefore machine-dependent.
"""

import argparse
import datetime
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .accel import NUMBA_ENABLED
from .config import load_config, spec_as_dict
from .driver import run as run_driver
from .errors import ConfigError, ReferenceLoadError, WwmcError
from .reference import load_reference, save_reference

log = logging.getLogger("wwmc")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_REFERENCE = 3


def _fmt(v):
    return repr(float(v))


def _write_quantity(path, records, centers, getter):
    with open(path, "w") as fh:
        fh.write("step,t,cell,x_center,value\n")
        for rec in records:
            values = getter(rec)
            if values is None:
                continue
            for c in range(centers.size):
                fh.write(f"{rec.step},{_fmt(rec.t_end)},{c},{_fmt(centers[c])},{_fmt(values[c])}\n")


def _write_windows(path, records, centers):
    wrote_any = False
    rows = []
    for rec in records:
        if rec.window_center_raw is None:
            continue
        wrote_any = True
        for c in range(centers.size):
            rows.append(
                f"{rec.step},{_fmt(rec.t_end)},{c},{_fmt(centers[c])},"
                f"{_fmt(rec.window_center_raw[c])},{_fmt(rec.window_center_mod[c])},"
                f"{_fmt(rec.window_floor[c])},{_fmt(rec.window_ceiling[c])}\n"
            )
    if not wrote_any:
        return False
    with open(path, "w") as fh:
        fh.write("step,t,cell,x_center,center_raw,center_modified,floor,ceiling\n")
        fh.writelines(rows)
    return True


def write_outputs(records, outdir, spec, warnings, reference=None, extra_manifest=None):
    """Persist one run: quantity CSVs plus manifest.json."""
    if not records:
        raise WwmcError("no timestep records to write")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    centers = spec.mesh.centers

    _write_quantity(outdir / "flux.csv", records, centers, lambda r: r.flux_mean)
    _write_quantity(outdir / "rel_sdev.csv", records, centers, lambda r: r.flux_rel_sigma)
    _write_quantity(outdir / "fom.csv", records, centers, lambda r: r.fom)
    _write_quantity(outdir / "census_phi.csv", records, centers, lambda r: r.census_phi)
    _write_quantity(outdir / "census_current.csv", records, centers, lambda r: r.census_j)
    _write_quantity(outdir / "sm_raw.csv", records, centers, lambda r: r.census_sm_raw)
    _write_quantity(outdir / "sm_filtered.csv", records, centers, lambda r: r.census_sm_filtered)
    _write_quantity(outdir / "particles.csv", records, centers, lambda r: r.counts)
    if any(r.aux_phi is not None for r in records):
        _write_quantity(outdir / "aux_flux.csv", records, centers, lambda r: r.aux_phi)
    _write_windows(outdir / "windows.csv", records, centers)

    if reference is not None and any(r.aux_phi is not None for r in records):
        from .reference import relative_error

        def rel_err(rec):
            if rec.aux_phi is None:
                return None
            return relative_error(rec.aux_phi, reference.phi_at(rec.t_end))

        _write_quantity(outdir / "rel_error.csv", records, centers, rel_err)

    manifest = {
        "version": __version__,
        "numba": NUMBA_ENABLED,
        "config": spec_as_dict(spec),
        "warnings": warnings,
        "per_step": [
            {
                "step": r.step,
                "t_end": r.t_end,
                "time_transport": r.time_transport,
                "time_solver": r.time_solver,
                "time_total": r.time_total,
                "n_census": r.n_census,
                "census_weight": r.census_weight,
            }
            for r in records
        ],
    }
    if extra_manifest:
        manifest.update(extra_manifest)
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _build_parser():
    parser = argparse.ArgumentParser(prog="wwmc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configuration and write result CSVs")
    p_run.add_argument("config", help="config file path or preset name (e.g. azurv1_impulse)")
    p_run.add_argument("--mode", help="analog | ww-previous | ww-losm-be | ww-losm-cn | ww-reference")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--histories", type=int)
    p_run.add_argument("--out", default="out", help="output directory (default: ./out)")
    p_run.add_argument("--reference", help="reference CSV (required for ww-reference)")
    p_run.add_argument("--filter-k", type=int, dest="filter_k")
    p_run.add_argument("--rho", type=float)
    p_run.add_argument("--workers", type=int, default=1)

    p_ref = sub.add_parser(
        "make-reference", help="produce a self-reference table from a fine analog run"
    )
    p_ref.add_argument("config")
    p_ref.add_argument("--out", default="reference.csv")
    p_ref.add_argument("--histories", type=int, default=10_000_000)
    p_ref.add_argument("--seed", type=int)
    p_ref.add_argument("--batches", type=int)
    p_ref.add_argument("--workers", type=int, default=1)
    return parser


def _cmd_run(args):
    overrides = {
        "mode": args.mode,
        "seed": args.seed,
        "histories": args.histories,
        "filter_k": args.filter_k,
        "rho": args.rho,
    }
    spec = load_config(args.config, overrides)

    reference = None
    if spec.mode == "ww-reference" and not args.reference:
        log.error("mode ww-reference requires --reference <path>")
        return EXIT_CONFIG
    if args.reference:
        reference = load_reference(args.reference, n_cells=spec.mesh.n_cells)

    started = datetime.datetime.now(datetime.timezone.utc)
    result = run_driver(spec, reference=reference, workers=args.workers)
    finished = datetime.datetime.now(datetime.timezone.utc)
    write_outputs(
        result.records,
        args.out,
        spec,
        result.warnings,
        reference=reference,
        extra_manifest={
            "started": started.isoformat(),
            "finished": finished.isoformat(),
            "workers": args.workers,
        },
    )
    log.info(
        "wrote %d timesteps to %s (census weight at t=%g: %.6f)",
        len(result.records),
        args.out,
        result.records[-1].t_end,
        result.records[-1].census_weight,
    )
    return EXIT_OK


def _cmd_make_reference(args):
    overrides = {"mode": "analog", "seed": args.seed, "histories": args.histories}
    spec = load_config(args.config, overrides)
    if args.batches:
        spec = spec.replace(n_batches=args.batches)
    result = run_driver(spec, workers=args.workers)
    times = [spec.time.t[0]] + [r.t_end for r in result.records]
    from .driver import _impulse_state

    phi_rows = [_impulse_state(spec).phi] + [r.census_phi for r in result.records]
    save_reference(args.out, times, phi_rows, spec.mesh.centers)
    log.info("wrote reference table %s (%d times x %d cells)", args.out, len(times), spec.mesh.n_cells)
    return EXIT_OK


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK

    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "make-reference":
            return _cmd_make_reference(args)
        return EXIT_CONFIG
    except ReferenceLoadError as exc:
        log.error("reference error: %s", exc)
        return EXIT_REFERENCE
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except (WwmcError, OSError) as exc:
        log.error("runtime error: %s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
