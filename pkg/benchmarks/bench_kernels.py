"""Compare the numba and pure-numpy kernels.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from linopt import kernels
from linopt._accel import HAVE_NUMBA


def best_of(fn, repeat):
    fn()  # warm-up, triggers JIT compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba not installed; nothing to compare")
    rng = np.random.default_rng(args.seed)

    cases = []
    for n in (6, 10, 14, 18):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        cases.append((f"permanent n={n}", lambda a=a: kernels.permanent_numba(a),
                      lambda a=a: kernels.permanent_numpy(a)))
    for k, n in ((54264, 6), (5000, 4)):
        stack = rng.standard_normal((k, n, n)) + 1j * rng.standard_normal((k, n, n))
        cases.append((f"permanents {k}x{n}x{n}", lambda s=stack: kernels.permanents_numba(s),
                      lambda s=stack: kernels.permanents_numpy(s)))
    counts = rng.poisson(0.3, size=(1_000_000, 4))
    cases.append(("tally 1e6 frames x 4", lambda: kernels.tally_clicks_numba(counts),
                  lambda: kernels.tally_clicks_numpy(counts)))

    print(f"{'kernel':<28}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, fast, slow in cases:
        t_nb = best_of(fast, args.repeat)
        t_np = best_of(slow, args.repeat)
        print(f"{name:<28}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
