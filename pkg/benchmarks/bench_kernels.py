"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py --n 18 --m 32 --repeat 5
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from gapless_mec import _pykernels

try:
    from gapless_mec import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=18, help="rows (2^(n-1) partitions)")
    ap.add_argument("--m", type=int, default=32)
    ap.add_argument("--strings", type=int, default=256, help="candidate strings for the pair matrix")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    S = rng.integers(-1, 2, size=(args.n, args.m)).astype(np.int8)
    masks = 1 | (np.arange(1 << (args.n - 1), dtype=np.int64) << 1)
    zeros = np.zeros(args.n, dtype=np.int64)
    D = rng.integers(0, args.m, size=(args.n, args.strings)).astype(np.int64)

    backends = [("numpy", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    results = {}
    print(f"{'kernel':<18}{'backend':<10}{'seconds':>10}")
    for name, mod in backends:
        t = _time(lambda: mod.partition_costs(S, masks, zeros, zeros), args.repeat)
        results[("partition_costs", name)] = mod.partition_costs(S, masks, zeros, zeros)
        print(f"{'partition_costs':<18}{name:<10}{t:>10.4f}")
        t = _time(lambda: mod.pair_cost_matrix(D), args.repeat)
        results[("pair_cost_matrix", name)] = mod.pair_cost_matrix(D)
        print(f"{'pair_cost_matrix':<18}{name:<10}{t:>10.4f}")
    if _ckernels is not None:
        for kernel in ("partition_costs", "pair_cost_matrix"):
            same = np.array_equal(results[(kernel, "numpy")], results[(kernel, "cython")])
            print(f"{kernel}: outputs agree = {same}")
    else:
        print("compiled extension not available; only the numpy backend was timed")


if __name__ == "__main__":
    main()
