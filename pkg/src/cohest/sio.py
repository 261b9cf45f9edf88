"""Executable check that ``|psi_d> = sum_i sqrt(d_i)|i>`` reaches every
state with diagonal ``d`` under a strictly incoherent channel.

For an ensemble ``rho = sum_a lam_a |phi_a><phi_a|`` with
``|phi_a> = sum_i c_ai |i>``, the diagonal Kraus operators
``K_a = sum_i sqrt(lam_a) c_ai / sqrt(d_i) |i><i|`` map ``|psi_d><psi_d|``
to ``rho``.  Indices with ``d_i = 0`` are permuted to the end, the
construction runs on the support block, and the result is permuted back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cohest.qsim import (
    diagonal_distribution,
    exact_relative_entropy_coherence,
    random_density_matrix,
    shannon_entropy,
)

__all__ = [
    "EnsembleDecomposition",
    "KrausSet",
    "SioCheck",
    "eigen_ensemble",
    "kraus_from_ensemble",
    "apply_and_verify",
    "psi_d",
    "is_strictly_incoherent",
    "verify_random",
]

SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class EnsembleDecomposition:
    weights: np.ndarray
    states: np.ndarray  # row a holds the amplitudes c_a

    def density(self) -> np.ndarray:
        return (self.states.T * self.weights) @ self.states.conj()


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators in the original basis plus the support permutation.

    ``perm`` lists basis indices with the support first; ``support`` is
    its length.  When some ``d_i`` vanish, a final operator projecting on
    the zero-population indices is appended so the set is trace
    preserving on the whole space; it annihilates ``|psi_d>``.
    """

    operators: tuple[np.ndarray, ...]
    perm: np.ndarray
    support: int

    @property
    def permutation_matrix(self) -> np.ndarray:
        dim = self.perm.size
        M = np.zeros((dim, dim))
        M[np.arange(dim), self.perm] = 1.0
        return M


@dataclass(frozen=True)
class SioCheck:
    deviation: float
    completeness: float
    strictly_incoherent: bool
    coherence_gap: float  # H(d) - C_RE(target), nonnegative by the theorem
    support: int = 0  # nonzero entries of d
    dim: int = 0

    def passed(self, tol: float = 1e-9) -> bool:
        return (self.deviation <= tol and self.completeness <= tol
                and self.strictly_incoherent and self.coherence_gap >= -tol)


def eigen_ensemble(rho) -> EnsembleDecomposition:
    rho = np.asarray(rho, dtype=complex)
    evals, evecs = np.linalg.eigh(rho)
    keep = evals > SUPPORT_TOL
    return EnsembleDecomposition(evals[keep], evecs[:, keep].T.copy())


def psi_d(d) -> np.ndarray:
    return np.sqrt(np.asarray(d, dtype=float)).astype(complex)


def kraus_from_ensemble(ens: EnsembleDecomposition, d) -> KrausSet:
    d = np.asarray(d, dtype=float)
    diag = np.einsum("a,ai->i", ens.weights, np.abs(ens.states) ** 2)
    if diag.size != d.size or np.max(np.abs(diag - d)) > 1e-9:
        raise ValueError("distribution does not match the ensemble's diagonal")
    dim = d.size
    on = d > SUPPORT_TOL
    perm = np.concatenate([np.flatnonzero(on), np.flatnonzero(~on)])
    support = int(on.sum())
    M = np.zeros((dim, dim))
    M[np.arange(dim), perm] = 1.0

    d_perm = d[perm][:support]
    ops = []
    for lam, c in zip(ens.weights, ens.states):
        block = np.zeros(dim, dtype=complex)
        block[:support] = np.sqrt(lam) * c[perm][:support] / np.sqrt(d_perm)
        ops.append(M.T @ np.diag(block) @ M)
    if support < dim:
        rest = np.zeros(dim)
        rest[support:] = 1.0
        ops.append((M.T @ np.diag(rest) @ M).astype(complex))
    return KrausSet(tuple(ops), perm, support)


def is_strictly_incoherent(op, tol: float = 0.0) -> bool:
    """At most one nonzero entry in every row and every column."""
    nz = np.abs(np.asarray(op)) > tol
    return bool(nz.sum(axis=0).max() <= 1 and nz.sum(axis=1).max() <= 1)


def apply_and_verify(ks: KrausSet, d, target) -> SioCheck:
    target = np.asarray(target, dtype=complex)
    d = np.asarray(d, dtype=float)
    if np.max(np.abs(diagonal_distribution(target) - d)) > 1e-9:
        raise ValueError("target diagonal differs from d")
    psi = psi_d(d)
    source = np.outer(psi, psi.conj())
    out = sum(K @ source @ K.conj().T for K in ks.operators)
    complete = sum(K.conj().T @ K for K in ks.operators)
    return SioCheck(
        deviation=float(np.max(np.abs(out - target))),
        completeness=float(np.max(np.abs(complete - np.eye(d.size)))),
        strictly_incoherent=all(is_strictly_incoherent(K) for K in ks.operators),
        coherence_gap=shannon_entropy(d) - exact_relative_entropy_coherence(target),
        support=ks.support,
        dim=d.size,
    )


def verify_random(count: int, qubits=(2, 3), seed: int = 0) -> list[SioCheck]:
    """Run the construction on random states, a third of them with zero
    populations on part of the basis."""
    rng = np.random.default_rng(seed)
    checks = []
    for i in range(count):
        n = qubits[i % len(qubits)]
        dim = 2 ** n
        rank = int(rng.integers(1, dim + 1))
        if i % 3 == 2:
            k = int(rng.integers(1, dim))
            live = np.sort(rng.choice(dim, k, replace=False))
            sub = random_density_matrix(k, rng, min(rank, k))
            rho = np.zeros((dim, dim), dtype=complex)
            rho[np.ix_(live, live)] = sub
        else:
            rho = random_density_matrix(dim, rng, rank)
        d = diagonal_distribution(rho)
        ks = kraus_from_ensemble(eigen_ensemble(rho), d)
        checks.append(apply_and_verify(ks, d, rho))
    return checks
