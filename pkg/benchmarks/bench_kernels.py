"""Compare the numba kernels with their pure numpy/Python paths.

Usage::

    python3 benchmarks/bench_kernels.py [--rank 5] [--length 1000] [--repeat 20]

The in-process comparison calls each kernel's ``py_func``.  Only the outer
loop is uncompiled there: helpers it calls stay jitted, which is why the
``image_lengths`` and ``first_reducing`` rows look close.  ``--subprocess``
times a full WR sweep in a child started with
``WHMIN_DISABLE_NUMBA=1``, which is the switch end users flip.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from whmin import kernels
from whmin._accel import NUMBA_ENABLED, python_path
from whmin.automorphisms import whitehead_tables
from whmin.words import random_cyclically_reduced_word


def best_of(fn, repeat):
    fn()  # warm-up (and JIT compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rank, length, seed):
    w = random_cyclically_reduced_word(rank, length, seed).letters
    imgs, lens = whitehead_tables(rank)
    order = np.arange(imgs.shape[0], dtype=np.int64)
    raw = np.random.default_rng(seed).choice([-1, 1], size=4 * length) * np.random.default_rng(seed + 1).integers(
        1, rank + 1, size=4 * length
    )
    raw = raw.astype(np.int32)
    return {
        "free_reduce_array": (kernels.free_reduce_array, (raw,)),
        "apply_table": (kernels.apply_table, (w, imgs[0], lens[0])),
        "edge_counts": (kernels.edge_counts, (w, rank, True)),
        "image_lengths (all of W)": (kernels.image_lengths, (w, imgs, lens, order)),
        "first_reducing (no hit)": (kernels.first_reducing, (w, imgs, lens, order, 0)),
    }


SWEEP = (
    "import time; from whmin.automorphisms import find_whitehead_reducer;"
    "from whmin.words import random_cyclically_reduced_word as r;"
    "w = r({rank}, {length}, 0); find_whitehead_reducer(w); t = time.perf_counter();"
    "find_whitehead_reducer(w); print(time.perf_counter() - t)"
)


def sweep_in_child(rank, length, disable):
    env = dict(os.environ, WHMIN_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run(
        [sys.executable, "-c", SWEEP.format(rank=rank, length=length)], env=env, capture_output=True, text=True, check=True
    )
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--rank", type=int, default=5)
    ap.add_argument("--length", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--subprocess", action="store_true", help="also time a WR sweep with the env switch")
    args = ap.parse_args(argv)

    if not NUMBA_ENABLED:
        print("numba is disabled in this process; both columns use the python path")
    print(f"rank {args.rank}, word length {args.length}, best of {args.repeat}")
    print(f"{'kernel':28s} {'numba [ms]':>12s} {'python [ms]':>12s} {'speedup':>9s}")
    for name, (kern, call_args) in cases(args.rank, args.length, args.seed).items():
        fast = best_of(lambda: kern(*call_args), args.repeat)
        slow_fn = python_path(kern)
        slow = best_of(lambda: slow_fn(*call_args), max(1, args.repeat // 5))
        print(f"{name:28s} {fast * 1e3:12.3f} {slow * 1e3:12.3f} {slow / fast:8.1f}x")

    if args.subprocess:
        on = sweep_in_child(args.rank, args.length, disable=False)
        off = sweep_in_child(args.rank, args.length, disable=True)
        print(f"{'WR sweep (env switch)':28s} {on * 1e3:12.3f} {off * 1e3:12.3f} {off / on:8.1f}x")


if __name__ == "__main__":
    main()
