"""Numerical kernels: small dense complex solves, adaptive quadrature with
breakpoints, and bracketed root finding.

The linear solver dispatches to a compiled extension when it is installed;
set ``QSTAR_PURE_PYTHON=1`` to force the pure-Python backend.
"""

from __future__ import annotations

import os
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

from . import _solve_py
from .exceptions import (
    DimensionMismatchError,
    NoConvergenceError,
    NoSignChangeError,
)

if os.environ.get("QSTAR_PURE_PYTHON"):
    _backend = _solve_py
else:
    try:
        from . import _solve_cy as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = _solve_py


def backend() -> str:
    """Name of the active linear-solve backend: 'compiled' or 'python'."""
    return _backend.BACKEND_NAME


@dataclass(frozen=True)
class Tolerance:
    """Mixed absolute/relative tolerance; at least one must be positive."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("abs_tol and rel_tol cannot both be zero")


def solve_linear(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` for square complex ``a`` by partial-pivot
    elimination.

    ``b`` may be a vector or a matrix of stacked right-hand sides; the
    result has the same shape. Raises SingularMatrixError when a pivot
    falls below 1e-14 times the largest entry of ``a``.
    """
    a = np.array(a, dtype=np.complex128, order="C")
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatchError(f"expected square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    b = np.array(b, dtype=np.complex128, order="C")
    vector = b.ndim == 1
    if vector:
        b = b.reshape(-1, 1)
    if b.ndim != 2 or b.shape[0] != a.shape[0] or b.shape[1] < 1:
        raise DimensionMismatchError(
            f"right-hand side shape {b.shape} incompatible with {a.shape}"
        )
    if not np.isfinite(b).all():
        raise ValueError("right-hand side entries must be finite")
    _backend.solve_inplace(a, b)
    return b[:, 0] if vector else b


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return (h / 6.0) * (fa + 4.0 * fm + fb)


def _adaptive_simpson(f, a, fa, b, fb, m, fm, whole, eps, depth) -> float:
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    delta = left + right - whole
    # Second test: the interval is at the floating-point resolution limit
    # (an integrand corner can sit within one ulp of a panel edge, where
    # further bisection cannot separate it).
    if abs(delta) <= 15.0 * eps or (b - a) <= 64.0 * np.finfo(float).eps * max(
        abs(a), abs(b), 1.0
    ):
        return left + right + delta / 15.0
    if depth <= 0:
        raise NoConvergenceError(
            f"quadrature depth limit reached on [{a!r}, {b!r}]"
        )
    return _adaptive_simpson(
        f, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth - 1
    ) + _adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth - 1)


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance | None = None,
    breakpoints: Iterable[float] = (),
    max_depth: int = 48,
) -> float:
    """Adaptive Simpson quadrature of ``f`` over ``[lo, hi]``.

    ``breakpoints`` lists interior abscissae where the integrand has a kink
    (e.g. a channel threshold); the interval is split there so each panel
    sees a smooth function. Panel-edge samples are taken one ulp inside the
    panel, so breakpoint and bound values always come from the correct
    branch of a piecewise integrand. Error target is
    ``max(abs_tol, rel_tol * |integral|)``, distributed over panels by
    length. Raises NoConvergenceError past ``max_depth`` bisections.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo!r}, {hi!r}]")
    tol = tol or Tolerance()
    cuts = sorted({float(p) for p in breakpoints if lo < p < hi})
    edges = [lo, *cuts, hi]
    panels = list(zip(edges[:-1], edges[1:]))

    # Coarse composite pass fixes the scale for the relative tolerance.
    rough = 0.0
    for a, b in panels:
        xs = np.linspace(a, b, 17)
        xs[0] = np.nextafter(a, b)
        xs[-1] = np.nextafter(b, a)
        fx = np.array([f(x) for x in xs])
        rough += (b - a) / 48.0 * np.sum(fx[:-2:2] + 4.0 * fx[1::2] + fx[2::2])
    eps = max(tol.abs_tol, tol.rel_tol * abs(rough))
    if eps == 0.0:
        eps = np.finfo(float).eps

    total = 0.0
    span = hi - lo
    for a, b in panels:
        fa, fb = f(np.nextafter(a, b)), f(np.nextafter(b, a))
        m = 0.5 * (a + b)
        fm = f(m)
        whole = _simpson(fa, fm, fb, b - a)
        total += _adaptive_simpson(
            f, a, fa, b, fb, m, fm, whole, eps * (b - a) / span, max_depth
        )
    return total


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance | None = None,
    max_iter: int = 500,
    trace: list | None = None,
) -> float:
    """Locate a root of ``f`` inside the bracket ``[lo, hi]``.

    Secant steps (Illinois weighting) accelerate plain bisection, with a
    forced bisection whenever the bracket fails to halve, so convergence is
    guaranteed. Stops when the bracket width drops below
    ``max(abs_tol, rel_tol * |x|)``. Raises NoSignChangeError when
    ``f(lo)`` and ``f(hi)`` have the same sign.

    ``trace``, if given, collects the (lo, hi) bracket per iteration.
    """
    tol = tol or Tolerance(abs_tol=1e-12, rel_tol=4e-16)
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        raise NoSignChangeError(f"f({lo!r}) and f({hi!r}) have the same sign")

    side = 0
    force_bisect = False
    for _ in range(max_iter):
        if trace is not None:
            trace.append((a, b))
        width = b - a
        if width <= max(tol.abs_tol, tol.rel_tol * max(abs(a), abs(b))):
            return 0.5 * (a + b)
        if force_bisect or fb == fa:
            x = 0.5 * (a + b)
        else:
            x = b - fb * (b - a) / (fb - fa)
            margin = 0.01 * width
            if not (a + margin < x < b - margin):
                x = 0.5 * (a + b)
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx > 0) == (fa > 0):
            a, fa = x, fx
            if side == -1:
                fb *= 0.5  # Illinois: damp the stale endpoint
            side = -1
        else:
            b, fb = x, fx
            if side == 1:
                fa *= 0.5
            side = 1
        force_bisect = (b - a) > 0.5 * width
    raise NoConvergenceError(f"no root to tolerance within {max_iter} iterations")
