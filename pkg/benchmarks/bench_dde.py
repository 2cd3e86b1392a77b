"""Time the compiled and pure-Python delay-equation kernels on the figure presets.

    python benchmarks/bench_dde.py [--repeat N]
"""
import argparse
import time

import numpy as np

from piezomag_saw import dynamics
from piezomag_saw._dde_py import rk4_delay as python_kernel

PRESETS = ("fig7a", "fig8c", "fig10c")


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if dynamics.KERNEL != "compiled":
        raise SystemExit("compiled kernel not available; build with pip install -e .")
    from piezomag_saw._dde_kernel import rk4_delay as compiled_kernel

    print(f"{'preset':8} {'steps':>8} {'compiled_s':>11} {'python_s':>10} {'speedup':>8} {'max_diff':>9}")
    for name in PRESETS:
        p = dynamics.figure_preset(name)
        t_fast, fast = best_time(lambda: dynamics.integrate(p, kernel=compiled_kernel), args.repeat)
        t_slow, slow = best_time(lambda: dynamics.integrate(p, kernel=python_kernel), args.repeat)
        diff = max(np.abs(fast.alpha_a - slow.alpha_a).max(), np.abs(fast.alpha_b - slow.alpha_b).max())
        print(f"{name:8} {len(fast.times) - 1:8d} {t_fast:11.4f} {t_slow:10.4f} "
              f"{t_slow / t_fast:8.1f} {diff:9.1e}")


if __name__ == "__main__":
    main()
