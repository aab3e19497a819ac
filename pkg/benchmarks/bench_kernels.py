"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]

Each case runs both implementations on the same input, checks that the
results match, and prints the best-of-N wall time and the speedup.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from infinite_bins import _fallback

try:
    from infinite_bins import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def case_universe(mod, scale):
    # every 14-ball configuration through the (2, 14) coupling-sized word
    l = 14
    masks = np.arange(1 << (l - 1), dtype=np.int64)
    types = np.array([2, 2, 14, 2], dtype=np.int64)
    reps = np.array([14, 12, int(40 * scale), 12], dtype=np.int64)
    return lambda: mod.apply_word_masks(l, masks, types, reps).tolist()


def case_chain(mod, scale):
    rng = np.random.default_rng(0)
    xis = rng.choice(np.array([2, 5], dtype=np.int64), size=int(500_000 * scale))

    def run():
        c = mod.LazyChain(1)
        keys = np.empty(len(xis), dtype=np.int64)
        c.run(xis, keys, 2, 64)
        return c.shift, c.window(), int(keys.sum())
    return run


def case_pair(mod, scale):
    rng = np.random.default_rng(1)
    xis = rng.choice(np.array([2, 5], dtype=np.int64), size=int(500_000 * scale))

    def run():
        a, b = mod.LazyChain(1), mod.LazyChain(3)
        return mod.pair_run(a, b, xis, 5, mod.projections_agree(a, b, 5)), a.window(), b.window()
    return run


CASES = {
    "apply_word_masks (l=14, 8192 states)": case_universe,
    "LazyChain.run (unif:2,5, depth-2 keys)": case_chain,
    "pair_run (two chains, shared moves)": case_pair,
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0, help="multiply the workload size")
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the fallback can run")
    print(f"{'case':42s} {'python [s]':>11s} {'compiled [s]':>13s} {'speedup':>8s}")
    for name, make in CASES.items():
        t_py, r_py = best_of(make(_fallback, args.scale), args.repeat)
        if _kernels is None:
            print(f"{name:42s} {t_py:11.4f} {'-':>13s} {'-':>8s}")
            continue
        t_c, r_c = best_of(make(_kernels, args.scale), args.repeat)
        if r_py != r_c:
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:42s} {t_py:11.4f} {t_c:13.4f} {t_py / t_c:7.0f}x")


if __name__ == "__main__":
    main()
