"""Time the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so the result does not depend on
PROJEVO_PURE_PYTHON.  Each line reports the best of N runs and the
largest absolute difference between the two outputs.
"""

import argparse
import timeit

import numpy as np

from projevo import _pykernels as py

try:
    from projevo import _ckernels as cy
except ImportError:
    cy = None


def cases(rng):
    x = rng.uniform(-60, 60, 100_000)
    centers = rng.uniform(-20, 30, 100_000)
    xs = rng.uniform(-10, 10, 512)
    ks = rng.uniform(-3, 3, 2048)
    cs = rng.standard_normal(2048) + 1j * rng.standard_normal(2048)
    return [
        ("si_array (1e5 points)", lambda m: m.si_array(x)),
        ("sinc_sq_array (1e5 points)", lambda m: m.sinc_sq_array(centers, 0.7)),
        ("pi_d_1d_array (1e5 centres)", lambda m: m.pi_d_1d_array(5.0, 10.0, 0.7, centers)),
        ("phase_sum (512 x 2048)", lambda m: m.phase_sum(xs, ks, cs)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled extension not built; only the fallback can be timed")
    print(f"{'kernel':30s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speedup':>8s} {'max diff':>9s}")
    for name, fn in cases(np.random.default_rng(0)):
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        if cy is None:
            print(f"{name:30s} {t_py:11.2f}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        diff = float(np.max(np.abs(np.asarray(fn(py)) - np.asarray(fn(cy)))))
        print(f"{name:30s} {t_py:11.2f} {t_cy:12.2f} {t_py / t_cy:8.1f} {diff:9.1e}")


if __name__ == "__main__":
    main()
