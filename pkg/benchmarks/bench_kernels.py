"""Time the numba kernels against their pure-numpy fallbacks.

Runs each hot kernel on a workload sized like a degree-30 extraction and
reports the median wall time per backend plus the speedup.  The numba
functions are called once before timing so compilation (or cache
loading) stays out of the measurement.

Usage:
    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --repeats 9 --kernel select_pivots
"""

import argparse
import time

import numpy as np

from fekmesh._kernels import _impl_numpy

try:
    from fekmesh._kernels import _impl_numba
except ImportError:
    _impl_numba = None

KERNELS = ("select_pivots", "chebyshev_table", "logan_shepp_matrix", "points_in_polygon")


def make_workloads(rng):
    n_basis, n_points = 496, 1891
    gauss = rng.standard_normal((n_points, n_basis))
    ortho, _ = np.linalg.qr(gauss)
    rows = np.ascontiguousarray(ortho.T)

    x = rng.uniform(-1.0, 1.0, 200_000)

    disk = rng.standard_normal((60_000, 2))
    disk /= np.maximum(1.0, np.hypot(disk[:, 0], disk[:, 1]))[:, None]

    verts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [0.5, 0.5], [0.5, 1.0], [0.0, 1.0]])
    cloud = rng.uniform(0.0, 1.0, (1_000_000, 2))

    return {
        "select_pivots": lambda impl: impl.select_pivots(rows.copy(), 1e-14, 1e-12),
        "chebyshev_table": lambda impl: impl.chebyshev_table(x, 30),
        "logan_shepp_matrix": lambda impl: impl.logan_shepp_matrix(disk[:, 0], disk[:, 1], 30),
        "points_in_polygon": lambda impl: impl.points_in_polygon(
            cloud[:, 0], cloud[:, 1], verts[:, 0], verts[:, 1], 1e-10
        ),
    }


def median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="timed runs per kernel (median reported)")
    parser.add_argument("--kernel", choices=KERNELS, help="benchmark a single kernel")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if _impl_numba is None:
        print("numba backend unavailable; nothing to compare")
        return 1

    workloads = make_workloads(np.random.default_rng(args.seed))
    names = [args.kernel] if args.kernel else list(KERNELS)

    print(f"{'kernel':22s} {'numpy':>10s} {'numba':>10s} {'speedup':>9s}")
    for name in names:
        run = workloads[name]
        run(_impl_numba)  # compile before timing
        t_np = median_time(lambda: run(_impl_numpy), args.repeats)
        t_nb = median_time(lambda: run(_impl_numba), args.repeats)
        print(f"{name:22s} {t_np * 1e3:9.2f}ms {t_nb * 1e3:9.2f}ms {t_np / t_nb:8.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
