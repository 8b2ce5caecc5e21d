#!/usr/bin/env python3
"""Benchmark the compiled kernel against the numpy fallback.

Runs the two hot entry points on a realistic workload (the default battery
against a fair coin, plus a depth-indexed divergence pair) and prints a
timing table.  The two backends are also cross-checked for agreement.

    python benchmarks/bench_core.py [--paths 50] [--length 10000]
"""

import argparse
import math
import time
from fractions import Fraction as F

import numpy as np

from imprand import _core_py, precise
from imprand.audit import compile_state_tables, default_battery
from imprand.pathsim import policy, sample_path

try:
    from imprand import _core

    HAVE_EXT = True
except ImportError:
    _core = None
    HAVE_EXT = False


def bench(fn, repeats=3):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--paths", type=int, default=50)
    parser.add_argument("--length", type=int, default=10_000)
    args = parser.parse_args()

    phi = precise(F(1, 2))
    battery = default_battery(phi)
    logf, sel, rates = compile_state_tables(battery)
    logw = np.log(np.full(len(battery), 1.0 / len(battery)))
    paths = [
        np.asarray(
            sample_path(phi, policy("precise-as-given"), args.length, 7000 + i),
            dtype=np.uint8,
        )
        for i in range(args.paths)
    ]
    work = args.paths * args.length * len(battery)

    def run(mod):
        def inner():
            out = []
            for bits in paths:
                out.append(
                    mod.state_battery_run(
                        bits, logf, sel, logw, math.log(50.0), rates, 1
                    )
                )
            return out

        return inner

    rows = []
    t_py, ref = bench(run(_core_py))
    rows.append(("state_battery_run", "numpy", t_py, work / t_py / 1e6))
    if HAVE_EXT:
        t_c, got = bench(run(_core))
        rows.append(("state_battery_run", "cext", t_c, work / t_c / 1e6))
        for a, b in zip(ref, got):
            np.testing.assert_allclose(a.final_log, b.final_log, rtol=1e-10)
            assert a.mix_first_reach == b.mix_first_reach

    # step-indexed product kernel
    rng = np.random.default_rng(1)
    logf1 = np.log(rng.uniform(0.8, 1.25, size=args.length))
    logf0 = np.log(rng.uniform(0.8, 1.25, size=args.length))

    def run_step(mod):
        def inner():
            for bits in paths:
                mod.step_product_run(bits, logf1, logf0)

        return inner

    t_py, _ = bench(run_step(_core_py))
    rows.append(("step_product_run", "numpy", t_py, args.paths * args.length / t_py / 1e6))
    if HAVE_EXT:
        t_c, _ = bench(run_step(_core))
        rows.append(("step_product_run", "cext", t_c, args.paths * args.length / t_c / 1e6))

    print(f"\n{args.paths} paths x {args.length} steps x {len(battery)} strategies\n")
    print(f"{'kernel':<22}{'backend':<9}{'seconds':>9}{'Msteps/s':>11}")
    for name, backend, secs, rate in rows:
        print(f"{name:<22}{backend:<9}{secs:>9.3f}{rate:>11.1f}")
    if HAVE_EXT:
        speedup = rows[0][2] / rows[1][2]
        print(f"\nbattery speedup cext/numpy: {speedup:.1f}x")
    else:
        print("\ncompiled kernel not available; numpy timings only")


if __name__ == "__main__":
    main()
