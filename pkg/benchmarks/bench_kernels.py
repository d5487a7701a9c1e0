"""Benchmark the compiled kernels against the pure-Python fallback.

Run from the repository root::

    python3 benchmarks/bench_kernels.py

Measures the two hot kernels (dense matrix exponential; fixed-step RK4
for the right-invariant group equation) and one end-to-end solve, then
prints a table with the speedup.  Falls back to timing the Python
kernels twice when the compiled extension is unavailable.
"""

from __future__ import annotations

import time

import numpy as np

from lieflow import (
    CoefficientCurve,
    USING_COMPILED_KERNELS,
    builtin_representation,
    solve_group_direct,
)
from lieflow.kernels import (
    expm,
    expm_python,
    rk4_group_stack,
    rk4_group_stack_python,
)


def _best_of(fn, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _bench_expm(rng) -> tuple[float, float]:
    mats = [rng.normal(size=(3, 3)) for _ in range(2000)]

    def compiled():
        for m in mats:
            expm(m)

    def python():
        for m in mats:
            expm_python(m)

    return _best_of(compiled), _best_of(python)


def _bench_rk4(rng) -> tuple[float, float]:
    stack = rng.normal(size=(20001, 3, 3))

    def compiled():
        rk4_group_stack(stack, 1e-3)

    def python():
        rk4_group_stack_python(stack, 1e-3)

    return _best_of(compiled), _best_of(python)


def _bench_solve() -> tuple[float, float]:
    rep = builtin_representation("sl2-defining")
    b = CoefficientCurve.from_tokens(["cos", "0.3", "sin"])

    def run():
        solve_group_direct(rep, b, (0.0, 2.0), 2000)

    import lieflow.kernels as kernels

    compiled_time = _best_of(run)
    saved = kernels.rk4_group_stack
    import lieflow.groupflow as groupflow
    saved_gf = groupflow.kernels.rk4_group_stack
    try:
        groupflow.kernels.rk4_group_stack = rk4_group_stack_python
        python_time = _best_of(run)
    finally:
        groupflow.kernels.rk4_group_stack = saved_gf
        kernels.rk4_group_stack = saved
    return compiled_time, python_time


def main() -> None:
    rng = np.random.default_rng(20260816)
    print(f"compiled kernels active: {USING_COMPILED_KERNELS}")
    rows = [
        ("expm 3x3 x2000", *_bench_expm(rng)),
        ("rk4 stack 10k steps 3x3", *_bench_rk4(rng)),
        ("solve_group sl2 2k steps", *_bench_solve()),
    ]
    print(f"{'benchmark':<28} {'selected':>10} {'python':>10} {'speedup':>9}")
    for name, fast, slow in rows:
        ratio = slow / fast if fast > 0 else float('inf')
        print(f"{name:<28} {fast * 1e3:>8.2f}ms {slow * 1e3:>8.2f}ms "
              f"{ratio:>8.1f}x")


if __name__ == "__main__":
    main()
