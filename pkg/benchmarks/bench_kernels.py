"""Benchmark the compiled kernel extension against the NumPy fallback.

Usage:
    python benchmarks/bench_kernels.py [--perm-max 18] [--haf-max 16] [--repeats 3]

Both backends compute identical values; this script reports wall time and
speedup for the Gray-code permanent walks, the batched small-permanent
kernel, and the power-trace Hafnian.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qrslab._kernels import available_backends
from qrslab.linalg import ginibre_matrix
from qrslab.rng import RngStream


def time_call(fn, *args, repeats=3):
    best = float("inf")
    value = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        value = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, value


def run(perm_max: int, haf_max: int, repeats: int) -> None:
    backends = available_backends()
    ref = backends["fallback"]
    fast = backends.get("compiled")
    if fast is None:
        print("compiled extension not importable; timing the fallback only")

    rng = RngStream(2718)
    rows = []

    for n in range(8, perm_max + 1, 2):
        a = ginibre_matrix(n, n, 1.0, rng)
        t_ref, v_ref = time_call(ref.perm_ryser, a, repeats=repeats)
        if fast:
            t_fast, v_fast = time_call(fast.perm_ryser, a, repeats=repeats)
            assert abs(v_ref - v_fast) <= 1e-9 * max(1.0, abs(v_ref))
            rows.append((f"perm_ryser n={n}", t_ref, t_fast))
        else:
            rows.append((f"perm_ryser n={n}", t_ref, None))

    for n in range(8, perm_max + 1, 2):
        a = ginibre_matrix(n, n, 1.0, rng)
        t_ref, v_ref = time_call(ref.perm_glynn, a, repeats=repeats)
        if fast:
            t_fast, v_fast = time_call(fast.perm_glynn, a, repeats=repeats)
            assert abs(v_ref - v_fast) <= 1e-9 * max(1.0, abs(v_ref))
            rows.append((f"perm_glynn n={n}", t_ref, t_fast))
        else:
            rows.append((f"perm_glynn n={n}", t_ref, None))

    stack = np.stack([ginibre_matrix(4, 4, 1.0, rng) for _ in range(50_000)])
    t_ref, v_ref = time_call(ref.perm_glynn_batch, stack, repeats=repeats)
    if fast:
        t_fast, v_fast = time_call(fast.perm_glynn_batch, stack, repeats=repeats)
        assert np.allclose(v_ref, v_fast)
        rows.append(("perm_batch 50k@n=4", t_ref, t_fast))
    else:
        rows.append(("perm_batch 50k@n=4", t_ref, None))

    for n2 in range(8, haf_max + 1, 4):
        a = ginibre_matrix(n2, n2, 1.0, rng)
        a = (a + a.T) / 2
        np.fill_diagonal(a, 0.0)
        t_ref, v_ref = time_call(ref.haf_trace, a, repeats=repeats)
        if fast:
            t_fast, v_fast = time_call(fast.haf_trace, a, repeats=repeats)
            assert abs(v_ref - v_fast) <= 1e-9 * max(1.0, abs(v_ref))
            rows.append((f"haf_trace 2n={n2}", t_ref, t_fast))
        else:
            rows.append((f"haf_trace 2n={n2}", t_ref, None))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}} {'fallback':>12} {'compiled':>12} {'speedup':>9}")
    for name, t_ref, t_fast in rows:
        if t_fast is None:
            print(f"{name:<{width}} {t_ref * 1e3:>10.2f}ms {'-':>12} {'-':>9}")
        else:
            print(f"{name:<{width}} {t_ref * 1e3:>10.2f}ms {t_fast * 1e3:>10.2f}ms {t_ref / t_fast:>8.1f}x")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--perm-max", type=int, default=18)
    parser.add_argument("--haf-max", type=int, default=16)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    run(args.perm_max, args.haf_max, args.repeats)
