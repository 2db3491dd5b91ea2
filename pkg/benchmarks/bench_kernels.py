#!/usr/bin/env python3
"""Timing comparison of the pure-Python kernels vs the compiled extension.

Each hot kernel runs the same fixed workload under both implementations;
the table reports best-of-three wall times and the speedup factor.  The
compiled column is skipped when the extension is not importable (for
example after installing with TARSKICERT_NO_EXT=1).

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import time

from tarskicert import _speedups_py
from tarskicert.freewords import inv, nielsen_reduce, reduce_word
from tarskicert.stallings import core_graph

try:
    from tarskicert import _speedups
except ImportError:
    _speedups = None


def random_word(rng, rank, length):
    w, prev = [], None
    for _ in range(length):
        d = rng.randrange(2 * rank)
        while prev is not None and d == prev ^ 1:
            d = rng.randrange(2 * rank)
        w.append(d)
        prev = d
    return tuple(w)


def workloads():
    rng = random.Random(2024)
    words = [random_word(rng, 3, 24) for _ in range(200)]

    def series(mod):
        for w in words:
            mod.word_series(w, 3, 6, 2)

    def scan(mod):
        mod.collision_scan(3, 5, tuple(range(2, 10)), 2, 64)

    core = core_graph(2, [(0, 0), (2, 2), (0, 2, 0, 2)])
    flat = [w for row in core.trans for w in row]

    def loops(mod):
        mod.loop_words(flat, core.nv, 4, 0, 16)

    gens = [reduce_word(random_word(rng, 3, 6)) for _ in range(3)]
    basis = nielsen_reduce(gens)
    factors = []
    for b in basis:
        factors.append(bytes(b))
        factors.append(bytes(inv(b)))

    def products(mod):
        mod.nielsen_products(factors, 9, 9)

    return [
        ("word_series   (200 words, len 24, degree 6)", series),
        ("collision_scan (rank 3, radius 5, 8 levels)", scan),
        ("loop_words    (squares core, length 16)", loops),
        ("nielsen_products (3 factors, 9 deep, len 9)", products),
    ]


def best_time(fn, mod, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(mod)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3,
                    help="timing repetitions per cell (default 3)")
    args = ap.parse_args()

    impls = [("pure", _speedups_py)]
    if _speedups is not None:
        impls.append(("cython", _speedups))
    else:
        print("compiled extension not available; timing pure only\n")

    header = f"{'kernel':<45}" + "".join(f"{name:>10}" for name, _ in impls)
    if len(impls) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, fn in workloads():
        row = f"{label:<45}"
        times = []
        for _, mod in impls:
            t = best_time(fn, mod, args.repeat)
            times.append(t)
            row += f"{t * 1000:>8.1f}ms"
        if len(times) == 2 and times[1] > 0:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
