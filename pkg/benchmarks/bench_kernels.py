#!/usr/bin/env python3
"""Compare the compiled kernel backend against the NumPy fallback.

Times the individual hot kernels in-process (both implementations are
importable side by side) and, for the end-to-end rows, re-runs this
interpreter with ``HGMEANS_PURE_PYTHON=1`` so each measurement goes
through the normal import-time backend selection.

Usage:
    python benchmarks/bench_kernels.py [--n 20000] [--d 20] [--m 50]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from hgmeans import _purepy

try:
    from hgmeans import _core
except ImportError:
    _core = None


def time_call(fn, *args, repeat=5):
    best = np.inf
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(n, d, m):
    rng = np.random.default_rng(0)
    points = np.ascontiguousarray(rng.normal(size=(n, d)))
    centers = np.ascontiguousarray(rng.normal(size=(m, d)))
    assign = rng.integers(0, m, size=n).astype(np.int64)
    cost = np.ascontiguousarray(rng.random((max(m, 2), max(m, 2))))

    cases = [
        ("nearest_center", lambda impl: impl.nearest_center(points, centers)),
        ("nearest_two", lambda impl: impl.nearest_two(points, centers)),
        ("centroid_sums", lambda impl: impl.centroid_sums(points, assign, m)),
        ("cost_of", lambda impl: impl.cost_of(points, centers, assign)),
        ("solve_assignment", lambda impl: impl.solve_assignment(cost)),
    ]
    rows = []
    for name, call in cases:
        t_py = time_call(call, _purepy)
        t_c = time_call(call, _core) if _core is not None else None
        rows.append((name, t_py, t_c))
    return rows


def bench_end_to_end(n, d, m):
    """Run a seeded hgmeans-fast solve in a child interpreter per backend."""
    snippet = (
        "import time, numpy as np\n"
        "import hgmeans\n"
        "from hgmeans import Dataset, HgParams, hgmeans_run\n"
        f"rng = np.random.default_rng(1)\n"
        f"pts = rng.normal(size=({n}, {d}))\n"
        "ds = Dataset(points=pts)\n"
        "start = time.perf_counter()\n"
        f"best, _ = hgmeans_run(ds, HgParams.fast({m}, seed=2))\n"
        "print(hgmeans.kernel_backend(), time.perf_counter() - start, best.cost)\n"
    )
    rows = []
    for pure in ("0", "1"):
        env = dict(os.environ, HGMEANS_PURE_PYTHON=pure)
        out = subprocess.run(
            [sys.executable, "-c", snippet], env=env,
            capture_output=True, text=True, check=True,
        ).stdout.split()
        rows.append((out[0], float(out[1]), float(out[2])))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=20_000)
    parser.add_argument("--d", type=int, default=20)
    parser.add_argument("--m", type=int, default=50)
    args = parser.parse_args()

    if _core is None:
        print("note: compiled extension not built; fallback timings only\n")

    print(f"kernel timings (n={args.n}, d={args.d}, m={args.m}; best of 5)")
    print(f"{'kernel':<18} {'python':>10} {'compiled':>10} {'speedup':>9}")
    for name, t_py, t_c in bench_kernels(args.n, args.d, args.m):
        if t_c is None:
            print(f"{name:<18} {t_py * 1e3:>8.2f}ms {'-':>10} {'-':>9}")
        else:
            print(f"{name:<18} {t_py * 1e3:>8.2f}ms {t_c * 1e3:>8.2f}ms "
                  f"{t_py / t_c:>8.1f}x")

    small_n = min(args.n, 5000)
    print(f"\nend-to-end hgmeans-fast (n={small_n}, d={args.d}, m={min(args.m, 20)})")
    rows = bench_end_to_end(small_n, args.d, min(args.m, 20))
    for backend, seconds, cost in rows:
        print(f"{backend:<10} {seconds:>8.2f}s  objective={cost:.6g}")
    if len(rows) == 2 and rows[0][0] != rows[1][0]:
        delta = abs(rows[0][2] - rows[1][2]) / max(rows[0][2], rows[1][2])
        # backends differ in float summation order, so the stochastic
        # search paths need not coincide; objectives should still be close
        print(f"speedup: {rows[1][1] / rows[0][1]:.1f}x; "
              f"relative objective delta: {delta:.2e}")


if __name__ == "__main__":
    main()
