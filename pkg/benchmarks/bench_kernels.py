"""Compare the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from fastconv import _pykernels, fastexec

try:
    from fastconv import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
        return 1
    rng = np.random.default_rng(0)
    cases = [
        ("direct 1d n=256", lambda k: fastexec.direct_conv_nd(rng_f1, rng_g1, kernels=k)),
        ("direct 2d 16x16", lambda k: fastexec.direct_conv_nd(rng_f2, rng_g2, kernels=k)),
        ("direct 3d 6^3", lambda k: fastexec.direct_conv_nd(rng_f3, rng_g3, kernels=k)),
        ("fft n=4096", lambda k: fastexec.fft(rng_x, kernels=k)),
    ]
    rng_f1, rng_g1 = rng.random(256), rng.random(256)
    rng_f2, rng_g2 = rng.random((16, 16)), rng.random((16, 16))
    rng_f3, rng_g3 = rng.random((6,) * 3), rng.random((6,) * 3)
    rng_x = rng.random(4096) + 1j * rng.random(4096)
    print(f"{'case':<18}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, fn in cases:
        a, b = fn(_pykernels), fn(_kernels)
        assert np.allclose(a, b), name
        tp = best_of(lambda: fn(_pykernels), args.repeat)
        tc = best_of(lambda: fn(_kernels), args.repeat)
        print(f"{name:<18}{tp:>12.5f}{tc:>12.5f}{tp / tc:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
