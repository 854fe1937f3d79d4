"""Compare the numba kernels against the pure-numpy fallbacks.

Run:  python3 benchmarks/bench_kernels.py
(The active backend used by the package itself is selected at import time
from IMEXRELAX_NUMBA; this script always times both.)
"""

import time

import numpy as np

from imexrelax import _kernels


def timeit(fn, *args, repeat=200):
    fn(*args)  # warm up / jit compile
    best = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best


def main():
    numpy_be = _kernels.get_backend("numpy")
    backends = [("numpy", numpy_be)]
    if _kernels.USING_NUMBA:
        backends.append(("numba", _kernels.get_backend("numba")))
    else:
        print("numba disabled/unavailable; timing the numpy path only")

    rng = np.random.default_rng(0)
    print(f"{'kernel':24s} {'n':>6s} " + "".join(f"{name:>12s}" for name, _ in backends)
          + "     speedup")
    for n in (64, 450, 4096):
        f = rng.standard_normal(n + 6)
        lower = rng.standard_normal(n)
        upper = rng.standard_normal(n)
        diag = 4.0 + np.abs(rng.standard_normal(n))
        rhs = rng.standard_normal(n)
        r = rng.standard_normal(n) * 2.0
        cases = [
            ("weno5_left", (f,)),
            ("weno5_right", (f,)),
            ("thomas", (lower, diag, upper, rhs)),
            ("solve_abs_power", (r, 1e4, 2.0, 1e-12, 50)),
        ]
        for name, args in cases:
            times = [timeit(be[name], *args) for _, be in backends]
            cols = "".join(f"{t * 1e6:10.1f}us" for t in times)
            speedup = times[0] / times[-1] if len(times) > 1 else 1.0
            print(f"{name:24s} {n:6d} {cols}     x{speedup:.1f}")


if __name__ == "__main__":
    main()
