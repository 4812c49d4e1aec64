"""Compare the compiled and numpy orbit kernels on the same workloads.

Run ``python benchmarks/bench_kernels.py`` (add ``--quick`` for a short run).
Both backends must return identical arrays; the script checks that before
timing.
"""

import argparse
import time

import numpy as np

from schottky._kernels import backends
from schottky.construct import build_fat_limit_set
from schottky.orbit import pack


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    n, depth = (4, 6) if args.quick else (8, 6)
    gens, base = pack(build_fat_limit_set(n, 1.0))
    impls = backends()
    cases = {
        "word_tree": lambda k: k.word_tree(gens, 0, depth - 1),
        "level_stats": lambda k: k.level_stats(gens, base, 0, depth, 1e-2),
        "census": lambda k: k.census(gens, base, 0, depth + 4, 1e-3, 10**9),
    }
    print(f"workload: {2 * n} generators, depth {depth}, first letter subtree")
    print(f"{'kernel':<12}" + "".join(f"{name:>12}" for name in impls) + f"{'speedup':>10}")
    for label, run in cases.items():
        outs = [run(k) for k in impls.values()]
        for a, b in zip(outs[0], outs[-1]):
            assert np.array_equal(a, b), f"{label}: backends disagree"
        times = [_best(lambda k=k: run(k), args.repeat) for k in impls.values()]
        speed = times[0] / times[-1] if len(times) > 1 else 1.0
        print(f"{label:<12}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
