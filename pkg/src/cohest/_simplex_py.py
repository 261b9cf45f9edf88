"""Pure-Python simplex kernel, used when the compiled extension is missing.

Mirrors ``_simplex.pyx`` function for function.  The tableau ``T`` has
constraint rows ``0..m-1`` and the reduced-cost row ``m``; the last
column holds the right-hand side (``-z`` in the cost row).
"""

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


def pivot(T, basis, r, j):
    T[r] /= T[r, j]
    f = T[:, j].copy()
    f[r] = 0.0
    T -= np.outer(f, T[r])
    T[:, j] = 0.0
    T[r, j] = 1.0
    basis[r] = j


def iterate(T, basis, ncols, tol, max_iter):
    """Bland's-rule primal simplex on columns ``< ncols``.

    Returns ``(status, iterations)``.
    """
    m = T.shape[0] - 1
    for it in range(max_iter):
        neg = np.flatnonzero(T[m, :ncols] < -tol)
        if neg.size == 0:
            return OPTIMAL, it
        j = neg[0]
        col = T[:m, j]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return UNBOUNDED, it
        ratios = T[rows, -1] / col[rows]
        cand = rows[ratios <= ratios.min() + 1e-12]
        r = cand[np.argmin(basis[cand])]
        pivot(T, basis, r, j)
    return ITERATION_LIMIT, max_iter
