#!/usr/bin/env python3
"""Benchmark the compiled loss kernels against the pure-Python fallback.

The kernels run once per candidate set, so per-call overhead on small
vectors is exactly what matters; this measures single-call throughput for
each loss plus the finite-difference verification loop.

    python benchmarks/bench_kernels.py [--rows 50000] [--size 7]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from quadpref.prefloss import LossBatch, _pure, gradient_max_rel_error

try:
    from quadpref.prefloss import _core
except ImportError:
    _core = None


def make_rows(n_rows: int, size: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    return [
        (rng.uniform(-20, 0, size), rng.uniform(-20, 0, size))
        for _ in range(n_rows)
    ]


def bench(label, fn, rows, beta=0.05, lam=0.5, hybrid=False):
    start = time.perf_counter()
    sink = 0.0
    for policy, ref in rows:
        if hybrid:
            value, *_ = fn(policy, ref, beta, lam)
        else:
            value, *_ = fn(policy, ref, beta)
        sink += value
    elapsed = time.perf_counter() - start
    return elapsed, sink


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=50_000)
    parser.add_argument("--size", type=int, default=7)
    args = parser.parse_args()

    rows = make_rows(args.rows, args.size)
    backends = [("pure", _pure)]
    if _core is not None:
        backends.append(("compiled", _core))
    else:
        print("compiled extension not built; benchmarking pure backend only")

    print(f"{args.rows} single-call rows, {args.size} candidates each\n")
    print(f"{'kernel':<12} {'backend':<9} {'total s':>9} {'rows/s':>12} {'speedup':>8}")
    for kernel, hybrid in (
        ("loss_ce", False),
        ("loss_listwise", False),
        ("loss_hybrid", True),
    ):
        base_time = None
        for name, backend in backends:
            elapsed, sink = bench(
                name, getattr(backend, kernel), rows, hybrid=hybrid
            )
            if base_time is None:
                base_time = elapsed
                speedup = ""
            else:
                speedup = f"{base_time / elapsed:6.1f}x"
            print(
                f"{kernel:<12.12} {name:<9} {elapsed:9.3f} "
                f"{args.rows / elapsed:12.0f} {speedup:>8}"
            )
        print()

    # Gradient verification workload (the loss-check hot path).
    from quadpref.prefloss import BACKEND, loss_listwise

    batches = [LossBatch(p, r, 0.05) for p, r in rows[: max(1, args.rows // 50)]]
    start = time.perf_counter()
    for batch in batches:
        gradient_max_rel_error(loss_listwise, batch)
    elapsed = time.perf_counter() - start
    print(
        f"finite-difference verification: {len(batches)} batches in "
        f"{elapsed:.3f} s on the {BACKEND} backend "
        "(set QUADPREF_PURE=1 to compare)"
    )


if __name__ == "__main__":
    main()
