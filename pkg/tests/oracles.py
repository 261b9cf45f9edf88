"""Independent reference implementations used only by the tests.

Everything here is deliberately slow and definition-level: exhaustive
vertex enumeration, all-segment concave envelopes, the exponential
subset-enumeration LP for the polytope meet (solved with scipy/HiGHS),
and grid search for least upper bounds.
"""

from itertools import combinations

import numpy as np
from scipy.optimize import linprog


def prefix_sums(a):
    return np.cumsum(np.sort(np.asarray(a, dtype=float))[::-1])


def envelope_all_segments(s):
    """Upper concave envelope of (0,0),(1,s_1),...,(n,s_n) by brute force.

    Value at k is the max over all chords (i, j) with i <= k <= j.
    """
    ys = np.concatenate([[0.0], np.asarray(s, dtype=float)])
    n = ys.size - 1
    out = ys.copy()
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            for k in range(i, j + 1):
                v = ys[i] + (ys[j] - ys[i]) * (k - i) / (j - i)
                out[k] = max(out[k], v)
    return out[1:]


def join_oracle(a, b):
    s = envelope_all_segments(np.maximum(prefix_sums(a), prefix_sums(b)))
    return np.diff(np.concatenate([[0.0], s]))


def meet_oracle(a, b):
    s = np.minimum(prefix_sums(a), prefix_sums(b))
    return np.diff(np.concatenate([[0.0], s]))


def grid_distributions(dim, denom):
    """All sorted-descending vectors with entries in (1/denom)Z summing to 1."""
    def parts(total, k, cap):
        if k == 0:
            if total == 0:
                yield ()
            return
        for first in range(min(total, cap), -1, -1):
            if first * k < total:
                break
            for rest in parts(total - first, k - 1, first):
                yield (first,) + rest
    for p in parts(denom, dim, denom):
        yield np.array(p, dtype=float) / denom


def grid_least_upper_bound(a, b, denom):
    """Least element (in majorization) among grid vectors above a and b."""
    pa, pb = prefix_sums(a), prefix_sums(b)
    above = [c for c in grid_distributions(len(a), denom)
             if np.all(prefix_sums(c) >= np.maximum(pa, pb) - 1e-12)]
    curves = np.array([prefix_sums(c) for c in above])
    least = [c for c, s in zip(above, curves) if np.all(s <= curves.min(axis=0) + 1e-12)]
    return least


def lp_vertices(A_eq, b_eq, A_ub, b_ub, tol=1e-9):
    """Exhaustive vertices of {x >= 0, A_eq x = b_eq, A_ub x <= b_ub}.

    Every choice of ``nvar - n_eq`` active inequalities is solved together
    with the equalities; nonsingular, feasible solutions are the vertices.
    """
    A_eq, A_ub = np.asarray(A_eq, dtype=float), np.asarray(A_ub, dtype=float)
    nvar = A_eq.shape[1] if A_eq.size else A_ub.shape[1]
    A_eq = A_eq.reshape(-1, nvar)
    A_ub = A_ub.reshape(-1, nvar)
    ineq_A = np.vstack([A_ub, -np.eye(nvar)])
    ineq_b = np.concatenate([np.asarray(b_ub, dtype=float), np.zeros(nvar)])
    b_eq = np.asarray(b_eq, dtype=float)
    need = nvar - A_eq.shape[0]
    combos = np.array(list(combinations(range(ineq_A.shape[0]), need)), dtype=int)
    verts = []
    for chunk in np.array_split(combos, max(1, len(combos) // 20000)):
        M = np.concatenate([np.broadcast_to(A_eq, (len(chunk),) + A_eq.shape),
                            ineq_A[chunk]], axis=1)
        rhs = np.concatenate([np.broadcast_to(b_eq, (len(chunk), b_eq.size)),
                              ineq_b[chunk]], axis=1)
        ok = np.abs(np.linalg.det(M)) > 1e-9
        if not ok.any():
            continue
        x = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
        feas = np.all(x @ ineq_A.T <= ineq_b + tol, axis=1)
        if A_eq.size:
            feas &= np.all(np.abs(x @ A_eq.T - b_eq) <= tol, axis=1)
        verts.extend(x[feas])
    return verts


def polytope_vertices(cs):
    """Vertices of a majorization ConstraintSet (probability simplex slice)."""
    dim = cs.dim
    A_ub = np.vstack([cs.coeffs, -cs.coeffs]) if cs.coeffs.size else np.zeros((0, dim))
    b_ub = np.concatenate([cs.upper, -cs.lower])
    return lp_vertices(np.ones((1, dim)), np.array([1.0]), A_ub, b_ub)


def subset_enumeration_meet(cs):
    """Meet of a ConstraintSet via min t s.t. t >= sum_{i in S} p_i for all |S| = k.

    Returns None when the polytope is empty.
    """
    dim = cs.dim
    s = []
    for k in range(1, dim):
        rows, rhs = [], []
        for S in combinations(range(dim), k):
            r = np.zeros(dim + 1)
            r[list(S)] = 1.0
            r[dim] = -1.0
            rows.append(r)
            rhs.append(0.0)
        for c, lo, hi in zip(cs.coeffs, cs.lower, cs.upper):
            rows.append(np.concatenate([c, [0.0]]))
            rhs.append(hi)
            rows.append(np.concatenate([-c, [0.0]]))
            rhs.append(-lo)
        cost = np.zeros(dim + 1)
        cost[dim] = 1.0
        res = linprog(cost, A_ub=np.array(rows), b_ub=np.array(rhs),
                      A_eq=np.concatenate([np.ones(dim), [0.0]])[None, :], b_eq=[1.0],
                      bounds=[(0, None)] * dim + [(None, None)], method="highs")
        if res.status == 2:
            return None
        assert res.status == 0, res.message
        s.append(res.fun)
    s.append(1.0)
    return np.diff(np.concatenate([[0.0], s]))


def random_constraint_set(rng, dim, rows, width=0.3, infeasible=None):
    """+-1 rows with intervals around a random point of the simplex.

    Power-of-two dims draw rows from the eigenvalue matrix; other dims use
    random sign vectors.

    ``infeasible='pair'`` adds a copy of one row with a disjoint interval;
    ``infeasible='negative'`` pins every row to the values of a vector with
    a negative entry, so the unique solution leaves the simplex.
    """
    from cohest.majorization import ConstraintSet
    from cohest.stabilizer import eigenvalue_matrix

    if dim & (dim - 1) == 0:
        B = eigenvalue_matrix(int(np.log2(dim))).astype(float)
    else:
        B = np.vstack([np.ones(dim), rng.choice([-1.0, 1.0], size=(dim - 1, dim))])
    masks = rng.choice(np.arange(1, dim), size=min(rows, dim - 1), replace=False)
    p = rng.dirichlet(np.ones(dim) * 0.7)
    coeffs = B[masks]
    centre = coeffs @ p
    half = rng.uniform(0, width, size=len(masks))
    lower = np.maximum(-1, centre - half)
    upper = np.minimum(1, centre + half)
    if infeasible == "negative":
        q = p * 1.05 / p[1:].sum()
        q[0] = -0.05
        coeffs = B[1:]
        lower = upper = coeffs @ q
        return ConstraintSet(dim, coeffs, lower, upper.copy())
    if infeasible == "pair":
        # the same row pinned to +1 and to [-1, -0.5]
        i = 0
        lower[i] = upper[i] = 1.0
        coeffs = np.vstack([coeffs, coeffs[i]])
        lower = np.append(lower, -1.0)
        upper = np.append(upper, -0.5)
    return ConstraintSet(dim, coeffs, lower, upper)
