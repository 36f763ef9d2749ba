"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run with the default environment to compare both paths; run with
WALLACH_GEO_NO_NUMBA=1 to confirm the fallback is the active path.
"""

import time

import numpy as np

from wallach_geo import accel
from wallach_geo.accel import _ad_matrix_py, _bracket_py, _expm_impl, _logm_impl

SIZES = (9, 15, 36)
REPS = 200


def _time(fn, *args, reps=REPS):
    fn(*args)  # warm up (numba JIT, caches)
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args)
    return (time.perf_counter() - t0) / reps


def main():
    rng = np.random.default_rng(np.random.Philox(0))
    print(f"active path: {'numba' if accel.USE_NUMBA else 'numpy'}")
    header = f"{'kernel':14s} {'size':>5s} {'numpy (us)':>12s} {'active (us)':>12s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for n in SIZES:
        M = rng.standard_normal((n, n))
        A = 0.5 * (M - M.T)  # skew, the typical input
        E = _expm_impl(A)
        c = rng.standard_normal((n, n, n)) * 0.1
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        for name, pure, active, args in (
            ("expm", _expm_impl, accel.expm, (A,)),
            ("logm", _logm_impl, accel.logm, (E,)),
            ("bracket", _bracket_py, accel.bracket_coeffs, (c, x, y)),
            ("ad_matrix", _ad_matrix_py, accel.ad_matrix, (c, x)),
        ):
            tp = _time(pure, *args)
            ta = _time(active, *args)
            print(
                f"{name:14s} {n:5d} {tp * 1e6:12.2f} {ta * 1e6:12.2f} {tp / ta:8.2f}x"
            )


if __name__ == "__main__":
    main()
