# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex kernel; see ``_simplex_py.py`` for the reference version."""

cdef enum:
    OPTIMAL_C = 0
    UNBOUNDED_C = 1
    ITERATION_LIMIT_C = 2

OPTIMAL = OPTIMAL_C
UNBOUNDED = UNBOUNDED_C
ITERATION_LIMIT = ITERATION_LIMIT_C


cdef void _pivot(double[:, ::1] T, Py_ssize_t[::1] basis,
                 Py_ssize_t r, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t i, c
    cdef Py_ssize_t nrow = T.shape[0], ncol = T.shape[1]
    cdef double inv = 1.0 / T[r, j]
    cdef double f
    for c in range(ncol):
        T[r, c] *= inv
    for i in range(nrow):
        if i == r:
            continue
        f = T[i, j]
        if f == 0.0:
            continue
        for c in range(ncol):
            T[i, c] -= f * T[r, c]
        T[i, j] = 0.0
    T[r, j] = 1.0
    basis[r] = j


def pivot(double[:, ::1] T, Py_ssize_t[::1] basis, Py_ssize_t r, Py_ssize_t j):
    _pivot(T, basis, r, j)


cdef int _iterate(double[:, ::1] T, Py_ssize_t[::1] basis, Py_ssize_t ncols,
                  double tol, Py_ssize_t max_iter, Py_ssize_t* n_iter) noexcept nogil:
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef Py_ssize_t it, i, j, r
    cdef double ratio, best
    for it in range(max_iter):
        n_iter[0] = it
        j = -1
        for i in range(ncols):
            if T[m, i] < -tol:
                j = i
                break
        if j < 0:
            return OPTIMAL_C
        r = -1
        best = 0.0
        for i in range(m):
            if T[i, j] > tol:
                ratio = T[i, rhs] / T[i, j]
                if r < 0 or ratio < best:
                    r = i
                    best = ratio
        if r < 0:
            return UNBOUNDED_C
        # Bland: among near-minimal ratios leave on the smallest basic index
        for i in range(m):
            if T[i, j] > tol and basis[i] < basis[r]:
                if T[i, rhs] / T[i, j] <= best + 1e-12:
                    r = i
        _pivot(T, basis, r, j)
    n_iter[0] = max_iter
    return ITERATION_LIMIT_C


def iterate(double[:, ::1] T, Py_ssize_t[::1] basis, Py_ssize_t ncols,
            double tol, Py_ssize_t max_iter):
    """Bland's-rule primal simplex on columns ``< ncols``; ``(status, iterations)``."""
    cdef Py_ssize_t n_iter = 0
    cdef int status
    with nogil:
        status = _iterate(T, basis, ncols, tol, max_iter, &n_iter)
    return status, n_iter
