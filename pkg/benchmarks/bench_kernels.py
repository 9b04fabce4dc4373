"""Compare the compiled and pure-Python kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from midspec import _kernels_py

try:
    from midspec import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def _cases():
    rng = np.random.default_rng(7)
    p0 = np.array([1.0, 0.4, -0.3, 1.0])
    ptau = np.array([0.2, -0.5])
    z_scalar = complex(-0.3, 2.1)
    z_batch = rng.normal(size=2000) + 1j * rng.normal(size=2000) * 10

    a0 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    atau = np.array([[0.0, 0.0], [0.73, -0.08]])
    n_delay = 90
    grid = np.tile([1.0, 0.0], (n_delay + 1, 1))
    half = np.tile([1.0, 0.0], (n_delay, 1))
    return {
        "qp_eval scalar": lambda k: k.qp_eval(p0, ptau, 0.9, z_scalar),
        "qp_eval 2000 pts": lambda k: k.qp_eval(p0, ptau, 0.9, z_batch),
        "kummer_series |z|=30": lambda k: k.kummer_series(1.0, 3.0, 30.0j),
        "rk4_dde 2000 steps": lambda k: k.rk4_dde(a0, atau, grid, half, 2000, 0.01),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [("python", _kernels_py)] + ([("cython", _kernels_c)] if _kernels_c else [])
    print(f"{'kernel':<24}" + "".join(f"{name:>14}" for name, _ in backends) + ("  speedup" if _kernels_c else ""))
    for label, fn in _cases().items():
        times = []
        for _, mod in backends:
            number = max(1, int(0.2 / max(timeit.timeit(lambda: fn(mod), number=1), 1e-7)))
            best = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
            times.append(best)
        row = f"{label:<24}" + "".join(f"{t * 1e6:>12.1f}us" for t in times)
        if len(times) == 2:
            row += f"  {times[0] / times[1]:7.1f}x"
        print(row)
    if _kernels_c is None:
        print("compiled extension not built; only the pure-Python backend was timed")


if __name__ == "__main__":
    main()
