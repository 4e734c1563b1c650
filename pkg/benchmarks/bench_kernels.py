"""Compare the numba kernels with the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Both paths are imported from the same module regardless of the env flag,
so one process times both.  The first numba call (compilation or cache
load) is excluded from the timings.
"""
import argparse
import time

import numpy as np

from fatsub import _kernels, fatness
from fatsub.submersion import make_triple


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    tri = make_triple("sp3", "sp2xsp1", "sp2")
    T = np.ascontiguousarray(tri.c[tri.sm, tri.sm, tri.sp])
    pts = fatness.sphere_grid(tri.dp, 64)
    yield "sigma_min_sweep sp(3) grid 64", "sigma_min_sweep", (T, pts)
    rng = np.random.default_rng(0)
    M = rng.normal(size=(6, 6))
    M = M - M.T
    yield "rk4_linear dim 6, 10^4 steps", "rk4_linear", (M, rng.normal(size=6), 1e-3, 10_000)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _kernels.USE_NUMBA:
        print("numba unavailable or disabled; timing the numpy path only")
    print(f"{'kernel':<34}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}{'max diff':>12}")
    for label, name, call_args in cases():
        np_fn = getattr(_kernels, f"{name}_numpy")
        t_np = _best(lambda: np_fn(*call_args), args.repeat)
        if _kernels.USE_NUMBA:
            nb_fn = getattr(_kernels, f"{name}_numba")
            diff = float(np.abs(nb_fn(*call_args) - np_fn(*call_args)).max())
            t_nb = _best(lambda: nb_fn(*call_args), args.repeat)
            print(f"{label:<34}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}{diff:>12.2e}")
        else:
            print(f"{label:<34}{t_np:>12.4f}{'-':>12}{'-':>10}{'-':>12}")


if __name__ == "__main__":
    main()
