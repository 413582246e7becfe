#!/usr/bin/env python3
"""Timing comparison of the jitted kernels against the pure-numpy fallback.

The fallback is selected at import time by WWMC_DISABLE_NUMBA=1, so this
script re-executes itself in a subprocess for the second column.

    python3 benchmarks/bench_kernels.py [--histories N] [--steps S]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def measure(histories, steps):
    import numpy as np

    from wwmc.accel import NUMBA_ENABLED
    from wwmc.config import load_config
    from wwmc.driver import run
    from wwmc.model import TimeGrid
    from wwmc.rng import history_base, next_u01
    from wwmc.accel import njit

    results = {"numba": NUMBA_ENABLED}

    @njit
    def draw_block(base, n):
        acc = 0.0
        ctr = np.uint64(0)
        for _ in range(n):
            u, ctr = next_u01(base, ctr)
            acc += u
        return acc

    n_draws = 2_000_000 if NUMBA_ENABLED else 200_000
    base = np.uint64(history_base(np.uint64(1), np.uint64(0)))
    draw_block(base, 10)  # warm the jit
    t0 = time.perf_counter()
    draw_block(base, n_draws)
    dt = time.perf_counter() - t0
    results["rng_draws_per_s"] = n_draws / dt

    spec = load_config("azurv1_impulse", {"histories": histories, "seed": 1, "mode": "analog"})
    spec = spec.replace(time=TimeGrid(np.linspace(0.0, 0.5 * steps, steps + 1)))
    t0 = time.perf_counter()
    res = run(spec)
    results["analog_wall_s"] = time.perf_counter() - t0
    results["analog_transport_s"] = sum(r.time_transport for r in res.records)

    spec = spec.replace(mode="ww-losm-cn")
    t0 = time.perf_counter()
    res = run(spec)
    results["wwcn_wall_s"] = time.perf_counter() - t0
    results["wwcn_transport_s"] = sum(r.time_transport for r in res.records)
    return results


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--histories", type=int, default=20_000)
    parser.add_argument("--steps", type=int, default=6)
    parser.add_argument("--emit-json", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.emit_json:
        print(json.dumps(measure(args.histories, args.steps)))
        return

    jit = measure(args.histories, args.steps)

    env = dict(os.environ, WWMC_DISABLE_NUMBA="1")
    proc = subprocess.run(
        [sys.executable, __file__, "--histories", str(max(args.histories // 20, 500)),
         "--steps", str(args.steps), "--emit-json"],
        env=env, capture_output=True, text=True,
    )
    fallback = json.loads(proc.stdout.splitlines()[-1])
    scale = args.histories / max(args.histories // 20, 500)

    print(f"{'kernel':<28}{'numba':>14}{'pure numpy':>16}{'speedup':>10}")
    print("-" * 68)
    print(f"{'rng draws / s':<28}{jit['rng_draws_per_s']:>14.3e}{fallback['rng_draws_per_s']:>16.3e}"
          f"{jit['rng_draws_per_s'] / fallback['rng_draws_per_s']:>10.1f}")
    for key, label in (
        ("analog_transport_s", f"analog transport ({args.histories} hist)"),
        ("wwcn_transport_s", f"ww-losm-cn transport"),
    ):
        fb = fallback[key] * scale  # fallback ran fewer histories
        print(f"{label:<28}{jit[key]:>13.2f}s{fb:>15.2f}s{fb / jit[key]:>10.1f}")
    print(f"\n(fallback columns scaled from a {max(args.histories // 20, 500)}-history run; "
          f"rows are per-run transport seconds)")


if __name__ == "__main__":
    main()
