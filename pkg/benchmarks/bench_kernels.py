#!/usr/bin/env python3
"""Timing and agreement harness for the compiled vs. pure-Python kernels.

Runs each summation kernel on identical inputs through both lanes, checks
bitwise agreement, and prints a timing table.  Usage::

    python3 benchmarks/bench_kernels.py [--sizes 1000,100000,1000000] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qclab import _kernels
from qclab._kernels import fallback


def _compiled_lane():
    if _kernels._core is None:
        return None

    core = _kernels._core

    def ordered_sum(values):
        return core.ordered_sum(np.ascontiguousarray(values, dtype=np.float64))

    def ordered_dot(weights, values):
        return core.ordered_dot(
            np.ascontiguousarray(weights, dtype=np.float64),
            np.ascontiguousarray(values, dtype=np.float64),
        )

    return {"ordered_sum": ordered_sum, "ordered_dot": ordered_dot}


def _time(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="1000,100000,1000000")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)
    compiled = _compiled_lane()

    print(f"active backend: {_kernels.backend_name()}")
    if compiled is None:
        print("compiled extension not importable; timing the fallback lane only")
    header = f"{'kernel':<12} {'n':>9} {'fallback':>12} {'compiled':>12} {'speedup':>8}  agree"
    print(header)
    print("-" * len(header))

    mismatches = 0
    for n in sizes:
        scale = np.exp(rng.uniform(-12.0, 12.0, size=n))
        values = rng.normal(size=n) * scale
        weights = rng.normal(size=n)

        for name, fb_fn, fn_args in (
            ("ordered_sum", fallback.ordered_sum, (values,)),
            ("ordered_dot", fallback.ordered_dot, (weights, values)),
        ):
            t_fb = _time(fb_fn, fn_args, args.repeats)
            if compiled is None:
                print(f"{name:<12} {n:>9} {t_fb * 1e3:>10.3f}ms {'-':>12} {'-':>8}")
                continue
            co_fn = compiled[name]
            t_co = _time(co_fn, fn_args, args.repeats)
            same = fb_fn(*fn_args) == co_fn(*fn_args)  # bitwise, not approx
            mismatches += 0 if same else 1
            print(
                f"{name:<12} {n:>9} {t_fb * 1e3:>10.3f}ms {t_co * 1e3:>10.3f}ms"
                f" {t_fb / t_co:>7.1f}x  {'yes' if same else 'NO'}"
            )

    if mismatches:
        print(f"\n{mismatches} bitwise mismatches between lanes")
        return 1
    print("\nall kernels agree bitwise across lanes")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
