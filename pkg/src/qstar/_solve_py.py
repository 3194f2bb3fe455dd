"""Pure-Python elimination backend.

Mirrors the compiled kernel in ``_solve_cy`` exactly: same pivoting rule,
same singularity floor, same in-place contract. Selected at import time by
:mod:`qstar.numerics` when the extension is unavailable (or when the
``QSTAR_PURE_PYTHON`` environment variable is set).
"""

from __future__ import annotations

import numpy as np

from .exceptions import SingularMatrixError

BACKEND_NAME = "python"

#: Pivots below this multiple of the largest input entry abort the solve.
PIVOT_FLOOR = 1e-14


def solve_inplace(a: np.ndarray, b: np.ndarray) -> None:
    """Overwrite ``b`` with the solution of ``a @ x = b``.

    ``a`` is an (n, n) and ``b`` an (n, m) C-contiguous complex128 array;
    both are destroyed. Gaussian elimination with partial pivoting by
    modulus.
    """
    n = a.shape[0]
    floor = PIVOT_FLOOR * (np.abs(a).max() if a.size else 0.0)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        best = abs(a[p, k])
        if best < floor or best == 0.0:
            raise SingularMatrixError(
                f"pivot {best:.3e} below floor {floor:.3e} at column {k}"
            )
        if p != k:
            a[[k, p], k:] = a[[p, k], k:]
            b[[k, p]] = b[[p, k]]
        lam = a[k + 1 :, k] / a[k, k]
        if lam.size:
            a[k + 1 :, k + 1 :] -= lam[:, None] * a[k, k + 1 :]
            b[k + 1 :] -= lam[:, None] * b[k]
    for k in range(n - 1, -1, -1):
        b[k] = (b[k] - a[k, k + 1 :] @ b[k + 1 :]) / a[k, k]
