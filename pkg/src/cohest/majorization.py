"""Majorization order, join and meet of probability vectors, and the meet
of every distribution in a polytope cut out by stabilizer measurements.

Distributions are compared through their cumulative curves: for ``a``
sorted in decreasing order, ``s_k = a_1 + ... + a_k``.  ``a`` majorizes
``b`` when its curve lies above ``b``'s everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cohest import lp

__all__ = [
    "ConstraintSet",
    "ConcavityViolation",
    "sorted_desc",
    "cumulative",
    "from_cumulative",
    "majorizes",
    "meet_pair",
    "join_pair",
    "flatten",
    "meet_over_polytope",
    "compact_meet_program",
]

MAJ_TOL = 1e-9
REPAIR_TOL = 1e-7


class ConcavityViolation(RuntimeError):
    """The LP-derived cumulative curve is non-concave beyond solver noise."""


def sorted_desc(a) -> np.ndarray:
    return np.sort(np.asarray(a, dtype=float), kind="stable")[::-1]


def cumulative(a) -> np.ndarray:
    """Partial sums of ``a`` sorted in decreasing order (without ``s_0``)."""
    return np.cumsum(sorted_desc(a))


def from_cumulative(s) -> np.ndarray:
    d = np.diff(np.concatenate([[0.0], s]))
    d[d < 0] = 0.0
    d = d / d.sum()
    return sorted_desc(d)


def majorizes(a, b, tol: float = MAJ_TOL) -> bool:
    """True when ``a`` majorizes ``b`` (``b`` is the flatter one)."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("vectors have different dimensions")
    return bool(np.all(cumulative(a) >= cumulative(b) - tol))


def meet_pair(a, b) -> np.ndarray:
    """Greatest lower bound: the pointwise minimum of the two curves.

    The minimum of two concave curves is concave, so no repair step is
    needed.
    """
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("vectors have different dimensions")
    return from_cumulative(np.minimum(cumulative(a), cumulative(b)))


def flatten(s) -> np.ndarray:
    """Upper concave envelope of ``(0, 0), (1, s_1), ..., (n, s_n)``.

    Returns the envelope evaluated at ``k = 1..n``.  Uses a monotone-chain
    upper hull, so the cost is linear in ``n``.
    """
    s = np.asarray(s, dtype=float)
    ys = np.concatenate([[0.0], s])
    hull = [0]
    for k in range(1, ys.size):
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            # drop j if it lies on or below the chord from i to k
            if (ys[j] - ys[i]) * (k - i) <= (ys[k] - ys[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    return np.interp(np.arange(1, ys.size), hull, ys[hull])


def join_pair(a, b) -> np.ndarray:
    """Least upper bound: flatten the pointwise maximum of the two curves."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("vectors have different dimensions")
    return from_cumulative(flatten(np.maximum(cumulative(a), cumulative(b))))


@dataclass(frozen=True)
class ConstraintSet:
    """Polytope ``{p >= 0, sum(p) = 1, lower <= coeffs @ p <= upper}``.

    Normalization is implicit; ``coeffs`` holds one row per measured
    stabilizer element.
    """

    dim: int
    coeffs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float).reshape(-1, self.dim)
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        if not (coeffs.shape[0] == lower.size == upper.size):
            raise ValueError("coefficient rows and bounds differ in length")
        if np.any(lower > upper):
            raise ValueError("row with lower bound above upper bound")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def simplex(cls, dim: int) -> ConstraintSet:
        return cls(dim, np.zeros((0, dim)), [], [])

    def contains(self, p, tol: float = 1e-9) -> bool:
        p = np.asarray(p, dtype=float)
        if p.min() < -tol or abs(p.sum() - 1) > tol:
            return False
        v = self.coeffs @ p
        return bool(np.all(v >= self.lower - tol) and np.all(v <= self.upper + tol))


def compact_meet_program(cs: ConstraintSet) -> tuple[lp.LinearProgram, list[np.ndarray]]:
    """LP whose k-th objective gives the smallest top-k sum over the polytope.

    Variables are ``(p, theta, u)``.  For fixed ``p``,
    ``min k*theta + sum(u)`` subject to ``u_i >= p_i - theta``, ``u >= 0``
    equals the sum of the ``k`` largest entries of ``p``; an optimal
    ``theta`` is the ``k``-th largest entry, so ``theta >= 0`` loses
    nothing.
    """
    dim = cs.dim
    nv = 2 * dim + 1
    eye = np.eye(dim)
    ub = [np.hstack([eye, -np.ones((dim, 1)), -eye])]
    b_ub = [np.zeros(dim)]
    eq = [np.concatenate([np.ones(dim), np.zeros(dim + 1)])]
    b_eq = [1.0]
    pad = np.zeros(dim + 1)
    for row, lo, hi in zip(cs.coeffs, cs.lower, cs.upper):
        full = np.concatenate([row, pad])
        if lo == hi:
            eq.append(full)
            b_eq.append(lo)
            continue
        # +-1 coefficient rows satisfy |row @ p| <= 1 on the simplex already
        if hi < 1:
            ub.append(full[None, :])
            b_ub.append([hi])
        if lo > -1:
            ub.append(-full[None, :])
            b_ub.append([-lo])
    prog = lp.LinearProgram(
        np.zeros(nv), np.array(eq), np.array(b_eq),
        np.vstack(ub), np.concatenate([np.ravel(b) for b in b_ub]))
    objectives = []
    for k in range(1, dim):
        c = np.zeros(nv)
        c[dim] = k
        c[dim + 1:] = 1.0
        objectives.append(c)
    return prog, objectives


def meet_over_polytope(cs: ConstraintSet) -> np.ndarray | None:
    """Majorization meet of every distribution in ``cs``.

    Returns ``None`` when the polytope is empty.

    Raises
    ------
    ConcavityViolation
        If the solved curve is non-concave by more than ``REPAIR_TOL``.
    """
    dim = cs.dim
    if dim == 1:
        return np.ones(1)
    prog, objectives = compact_meet_program(cs)
    outcomes = lp.solve_many(prog, objectives)
    if outcomes[0].status is lp.Status.INFEASIBLE:
        return None
    if any(not o.optimal for o in outcomes):
        raise ConcavityViolation("top-k program did not reach an optimum")
    s = np.array([o.value for o in outcomes] + [1.0])
    s = np.clip(s, 0.0, 1.0)
    full = np.concatenate([[0.0], s])
    for k in range(1, dim):
        deficit = (full[k - 1] + full[k + 1]) / 2 - full[k]
        if deficit > REPAIR_TOL:
            raise ConcavityViolation(
                f"cumulative curve dips {deficit:.3g} below its chord at k={k}")
        if deficit > 0:
            full[k] += deficit
    return from_cumulative(full[1:])
