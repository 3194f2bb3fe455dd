"""Benchmark: compiled elimination kernel vs the pure-Python fallback.

The linear solve is the hot kernel: every S-matrix evaluation (device
sweeps, property suites, compound-graph wave matching) funnels through it
with matrices of order 2..20. Run as

    python benchmarks/bench_solve.py

numpy.linalg.solve is included as a reference point.
"""

import time

import numpy as np

from qstar import _solve_py

try:
    from qstar import _solve_cy
except ImportError:
    _solve_cy = None

from qstar import FilterN3, smatrix
from qstar.numerics import backend


def time_backend(solver, a, b, reps):
    start = time.perf_counter()
    for _ in range(reps):
        aw = a.copy()
        bw = b.copy()
        solver(aw, bw)
    return (time.perf_counter() - start) / reps


def time_numpy(a, b, reps):
    start = time.perf_counter()
    for _ in range(reps):
        np.linalg.solve(a, b)
    return (time.perf_counter() - start) / reps


def bench_kernel():
    rng = np.random.default_rng(7)
    print(f"{'n':>4} {'python':>12} {'compiled':>12} {'numpy':>12} {'speedup':>9}")
    for n in (2, 3, 4, 8, 16):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) + 3 * np.eye(n)
        b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        a = np.ascontiguousarray(a, dtype=np.complex128)
        b = np.ascontiguousarray(b, dtype=np.complex128)
        reps = max(200, 20000 // n**2)
        t_py = time_backend(_solve_py.solve_inplace, a, b, reps)
        t_np = time_numpy(a, b, reps)
        if _solve_cy is not None:
            t_cy = time_backend(_solve_cy.solve_inplace, a, b, reps)
            print(
                f"{n:>4} {t_py * 1e6:>10.2f}us {t_cy * 1e6:>10.2f}us "
                f"{t_np * 1e6:>10.2f}us {t_py / t_cy:>8.1f}x"
            )
        else:
            print(f"{n:>4} {t_py * 1e6:>10.2f}us {'n/a':>12} {t_np * 1e6:>10.2f}us")


def bench_sweep():
    f = FilterN3(a=1.0, b=3.0, U=1.0)
    bc = f.boundary_condition()
    ks = np.linspace(0.11, 5.0, 2000)
    start = time.perf_counter()
    acc = 0.0
    for k in ks:
        acc += abs(smatrix(bc, f.channels(float(k))).S[1, 0]) ** 2
    elapsed = time.perf_counter() - start
    print(
        f"\nend-to-end: 2000-point engine sweep with the '{backend()}' "
        f"backend: {elapsed * 1e3:.1f} ms ({elapsed / len(ks) * 1e6:.1f} us/point, "
        f"checksum {acc:.6f})"
    )


if __name__ == "__main__":
    print(f"active backend: {backend()}\n")
    print("kernel: solve of an (n x n) complex system with n right-hand sides")
    bench_kernel()
    bench_sweep()
    print(
        "\nforce the fallback with QSTAR_PURE_PYTHON=1 to compare "
        "end-to-end timings."
    )
