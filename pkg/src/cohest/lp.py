"""Dense two-phase primal simplex with Bland's anti-cycling rule.

The pivot loop runs in the compiled ``cohest._simplex`` extension when it
is importable and falls back to the numpy version in
``cohest._simplex_py`` otherwise.  Set ``COHEST_PURE_PYTHON=1`` to force
the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

if os.environ.get("COHEST_PURE_PYTHON"):
    from cohest import _simplex_py as _kernel
else:
    try:
        from cohest import _simplex as _kernel
    except ImportError:  # extension not built
        from cohest import _simplex_py as _kernel

KERNEL = "compiled" if _kernel.__name__.endswith("_simplex") else "python"

__all__ = ["LinearProgram", "LpOutcome", "Status", "SolverError", "solve", "solve_many", "KERNEL"]

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
MAX_VARIABLES = 200
MAX_ROWS = 1000


class Status(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class SolverError(RuntimeError):
    """The simplex iteration limit was hit."""


def _rows(a, nvar):
    a = np.zeros((0, nvar)) if a is None else np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        a = a.reshape(0, nvar)
    return a


@dataclass
class LinearProgram:
    """``min c.x`` s.t. ``A_eq x = b_eq``, ``A_ub x <= b_ub``, ``x >= lower``.

    ``lower`` defaults to zero; use ``-np.inf`` for free variables.
    """

    objective: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    lower: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        nvar = self.objective.size
        self.A_eq = _rows(self.A_eq, nvar)
        self.A_ub = _rows(self.A_ub, nvar)
        self.b_eq = np.asarray([] if self.b_eq is None else self.b_eq, dtype=float).ravel()
        self.b_ub = np.asarray([] if self.b_ub is None else self.b_ub, dtype=float).ravel()
        if self.lower is None:
            self.lower = np.zeros(nvar)
        self.lower = np.asarray(self.lower, dtype=float).ravel()
        if (self.A_eq.shape[1] != nvar or self.A_ub.shape[1] != nvar
                or self.lower.size != nvar):
            raise ValueError("row length does not match variable count")
        if self.A_eq.shape[0] != self.b_eq.size or self.A_ub.shape[0] != self.b_ub.size:
            raise ValueError("row count does not match right-hand side length")
        for arr in (self.objective, self.A_eq, self.A_ub, self.b_eq, self.b_ub):
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite coefficient")
        if np.any(np.isposinf(self.lower)) or np.any(np.isnan(self.lower)):
            raise ValueError("lower bounds must be finite or -inf")

    @property
    def nvar(self) -> int:
        return self.objective.size


@dataclass
class LpOutcome:
    status: Status
    x: np.ndarray | None = None
    value: float | None = None
    iterations: int = field(default=0, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def solve(lp: LinearProgram, max_iter: int | None = None) -> LpOutcome:
    return solve_many(lp, [lp.objective], max_iter)[0]


def solve_many(lp: LinearProgram, objectives, max_iter: int | None = None) -> list[LpOutcome]:
    """Solve ``lp`` once per objective vector (``lp.objective`` is ignored).

    Phase 1 does not depend on the objective, so it runs once and every
    phase 2 starts from that same feasible basis.  Each result is identical
    to what :func:`solve` returns for the corresponding program.
    """
    objectives = [np.asarray(c, dtype=float).ravel() for c in objectives]
    nvar = lp.nvar
    if any(c.size != nvar for c in objectives):
        raise ValueError("objective length does not match variable count")
    n_eq, n_ub = lp.A_eq.shape[0], lp.A_ub.shape[0]
    if nvar > MAX_VARIABLES or n_eq + n_ub > MAX_ROWS:
        raise ValueError(
            f"program too large ({nvar} variables, {n_eq + n_ub} rows)")

    # x = lower + x' for bounded variables, x = x+ - x- for free ones
    free = np.isneginf(lp.lower)
    shift = np.where(free, 0.0, lp.lower)
    if free.any():
        expand = np.hstack([np.eye(nvar), -np.eye(nvar)[:, free]])
    else:
        expand = None
    A_eq, A_ub = lp.A_eq, lp.A_ub
    b_eq = lp.b_eq - A_eq @ shift
    b_ub = lp.b_ub - A_ub @ shift
    if expand is not None:
        A_eq, A_ub = A_eq @ expand, A_ub @ expand
    n_y = A_eq.shape[1]

    m = n_eq + n_ub
    n_struct = n_y + n_ub
    b = np.concatenate([b_eq, b_ub])
    flip = b < 0
    # rows whose slack has +1 start with the slack basic
    slack_ok = np.zeros(m, dtype=bool)
    slack_ok[n_eq:] = ~flip[n_eq:]
    need_art = np.flatnonzero(~slack_ok)
    n_art = need_art.size
    ncol = n_struct + n_art

    T = np.zeros((m + 1, ncol + 1))
    T[:n_eq, :n_y] = A_eq
    T[n_eq:m, :n_y] = A_ub
    T[n_eq + np.arange(n_ub), n_y + np.arange(n_ub)] = 1.0
    T[:m, -1] = b
    T[:m][flip] *= -1
    basis = np.empty(m, dtype=np.intp)
    basis[slack_ok] = n_y + np.flatnonzero(slack_ok) - n_eq
    T[need_art, n_struct + np.arange(n_art)] = 1.0
    basis[need_art] = n_struct + np.arange(n_art)

    if max_iter is None:
        max_iter = 50 * (m + ncol) + 1000
    phase1_iter = 0

    if n_art:
        T[m, n_struct:ncol] = 1.0
        T[m] -= T[need_art].sum(axis=0)
        status, phase1_iter = _kernel.iterate(T, basis, ncol, PIVOT_TOL, max_iter)
        if status == _kernel.ITERATION_LIMIT:
            raise SolverError("phase 1 hit the iteration limit")
        if -T[m, -1] > FEAS_TOL:
            return [LpOutcome(Status.INFEASIBLE, iterations=phase1_iter)
                    for _ in objectives]
        for row in range(m):
            if basis[row] >= n_struct:
                cand = np.flatnonzero(np.abs(T[row, :n_struct]) > PIVOT_TOL)
                if cand.size:
                    _kernel.pivot(T, basis, row, cand[0])
        # artificials left basic sit in redundant rows at value zero

    outcomes = []
    for c_x in objectives:
        c = c_x if expand is None else c_x @ expand
        T2 = T.copy()
        B = basis.copy()
        T2[m] = 0.0
        T2[m, :n_y] = c
        basic = B < n_y
        cb = np.zeros(m)
        cb[basic] = c[B[basic]]
        T2[m] -= cb @ T2[:m]
        status, it = _kernel.iterate(T2, B, n_struct, PIVOT_TOL, max_iter)
        it += phase1_iter
        if status == _kernel.ITERATION_LIMIT:
            raise SolverError("phase 2 hit the iteration limit")
        if status == _kernel.UNBOUNDED:
            outcomes.append(LpOutcome(Status.UNBOUNDED, iterations=it))
            continue
        y = np.zeros(ncol)
        y[B] = T2[:m, -1]
        x = y[:n_y] if expand is None else expand @ y[:n_y]
        x = x + shift
        outcomes.append(LpOutcome(Status.OPTIMAL, x, float(c_x @ x), it))
    return outcomes
