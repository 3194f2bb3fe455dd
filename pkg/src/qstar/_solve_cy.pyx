# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination kernel for small dense complex systems.

Semantics are identical to ``qstar._solve_py``; this version runs the
inner loops in C, which matters because every scattering evaluation in the
package funnels through one of these solves.
"""

from libc.math cimport hypot

from qstar.exceptions import SingularMatrixError

BACKEND_NAME = "compiled"

cdef double PIVOT_FLOOR = 1e-14

ctypedef double complex cplx


def solve_inplace(cplx[:, ::1] a, cplx[:, ::1] b):
    """Overwrite ``b`` with the solution of ``a @ x = b`` (both destroyed)."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[1]
    cdef Py_ssize_t i, j, k, p
    cdef double amax = 0.0, best, mag, floor_
    cdef cplx lam, piv, acc, tmp

    for i in range(n):
        for j in range(n):
            mag = hypot(a[i, j].real, a[i, j].imag)
            if mag > amax:
                amax = mag
    floor_ = PIVOT_FLOOR * amax

    for k in range(n):
        p = k
        best = hypot(a[k, k].real, a[k, k].imag)
        for i in range(k + 1, n):
            mag = hypot(a[i, k].real, a[i, k].imag)
            if mag > best:
                best = mag
                p = i
        if best < floor_ or best == 0.0:
            raise SingularMatrixError(
                f"pivot {best:.3e} below floor {floor_:.3e} at column {k}"
            )
        if p != k:
            for j in range(k, n):
                tmp = a[k, j]
                a[k, j] = a[p, j]
                a[p, j] = tmp
            for j in range(m):
                tmp = b[k, j]
                b[k, j] = b[p, j]
                b[p, j] = tmp
        piv = a[k, k]
        for i in range(k + 1, n):
            lam = a[i, k] / piv
            if lam != 0:
                for j in range(k + 1, n):
                    a[i, j] = a[i, j] - lam * a[k, j]
                for j in range(m):
                    b[i, j] = b[i, j] - lam * b[k, j]
            a[i, k] = 0

    for k in range(n - 1, -1, -1):
        piv = a[k, k]
        for j in range(m):
            acc = b[k, j]
            for i in range(k + 1, n):
                acc = acc - a[k, i] * b[i, j]
            b[k, j] = acc / piv
