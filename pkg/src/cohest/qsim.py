"""Small dense-matrix quantum state simulator.

States are plain numpy arrays: a density matrix is a complex
``(2**n, 2**n)`` array, a pure state a complex vector and a probability
vector a float vector.  Entropies are in bits.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from cohest.stabilizer import pauli_matrix

__all__ = [
    "as_density_matrix",
    "as_prob_vector",
    "pure_density",
    "diagonal_distribution",
    "von_neumann_entropy",
    "shannon_entropy",
    "exact_relative_entropy_coherence",
    "apply_depolarizing",
    "apply_dephasing",
    "expectation",
    "sample_observable",
    "sample_computational_basis",
    "BasisSample",
    "fidelity",
    "random_density_matrix",
]

_EIG_ZERO = 1e-12


def _qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2 ** n != dim or n > 6:
        raise ValueError(f"dimension {dim} is not 2**n with 1 <= n <= 6")
    return n


def as_density_matrix(rho, check: bool = True) -> np.ndarray:
    """Return ``rho`` as a complex array, validating it is a state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    _qubits(rho.shape[0])
    if check:
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > 1e-10:
            raise ValueError(f"density matrix trace {np.trace(rho).real} != 1")
        if np.linalg.eigvalsh(rho).min() < -1e-9:
            raise ValueError("density matrix is not positive semidefinite")
    return rho


def as_prob_vector(p) -> np.ndarray:
    """Clamp tiny negatives to zero and check normalization."""
    p = np.array(p, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("empty probability vector")
    if p.min() < -1e-12:
        raise ValueError(f"negative probability {p.min()}")
    p[p < 0] = 0.0
    if abs(p.sum() - 1) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum()}")
    return p


def pure_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    if abs(np.vdot(psi, psi).real - 1) > 1e-10:
        raise ValueError("state vector is not normalized")
    return np.outer(psi, psi.conj())


def diagonal_distribution(rho) -> np.ndarray:
    """Computational-basis populations of ``rho``."""
    d = np.real(np.diag(np.asarray(rho))).copy()
    d[d < 0] = 0.0
    return d / d.sum()


def von_neumann_entropy(rho) -> float:
    evals = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    evals = evals[evals > _EIG_ZERO]
    return max(0.0, float(-np.sum(evals * np.log2(evals))))


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return max(0.0, float(-np.sum(p * np.log2(p))))


def exact_relative_entropy_coherence(rho) -> float:
    """Relative entropy of coherence ``S(diag(rho)) - S(rho)``."""
    c = shannon_entropy(diagonal_distribution(rho)) - von_neumann_entropy(rho)
    return max(0.0, c)


def apply_depolarizing(rho, lam: float) -> np.ndarray:
    """Global white noise ``(1 - lam) rho + lam I / 2**n``."""
    if not 0 <= lam <= 1:
        raise ValueError(f"depolarizing strength {lam} outside [0, 1]")
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    return (1 - lam) * rho + lam * np.eye(dim) / dim


def apply_dephasing(rho, gamma: float) -> np.ndarray:
    """Independent phase damping on every qubit.

    Each qubit undergoes ``rho -> (1 - gamma/2) rho + (gamma/2) Z rho Z``,
    so a coherence between basis states that differ on ``h`` qubits is
    multiplied by ``(1 - gamma)**h``.
    """
    if not 0 <= gamma <= 1:
        raise ValueError(f"dephasing strength {gamma} outside [0, 1]")
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    idx = np.arange(dim)
    x = idx[:, None] ^ idx[None, :]
    hamming = np.zeros_like(x)
    for bit in range(_qubits(dim)):
        hamming += (x >> bit) & 1
    return rho * (1 - gamma) ** hamming


def _obs_matrix(obs):
    return obs if isinstance(obs, np.ndarray) else obs.matrix()


def expectation(rho, obs) -> float:
    """``tr(obs rho)`` for an :class:`ObservableSum` or a Hermitian matrix."""
    val = np.trace(_obs_matrix(obs) @ np.asarray(rho))
    if abs(val.imag) >= 1e-9:
        raise ValueError(f"observable expectation has imaginary part {val.imag}")
    return float(val.real)


def _sample_pauli(e, shots, rng):
    e = min(1.0, max(-1.0, e))
    plus = rng.binomial(shots, (1 + e) / 2)
    mean = (2 * plus - shots) / shots
    var = max(0.0, 1 - mean * mean) * shots / (shots - 1)
    return mean, np.sqrt(var / shots)


def sample_observable(rho, obs, shots: int, rng) -> tuple[float, float]:
    """Finite-shot estimate of ``<obs>`` and its standard error.

    Each Pauli term of ``obs`` is measured separately with ``shots``
    repetitions of +-1 outcomes; term estimates are combined linearly and
    their standard errors in quadrature.
    """
    if shots < 2:
        raise ValueError("need at least 2 shots")
    rho = np.asarray(rho, dtype=complex)
    mean = 0.0
    var = 0.0
    for letters, w in obs.terms:
        if set(letters) == {"I"}:
            mean += w
            continue
        e = expectation(rho, pauli_matrix(letters))
        m, s = _sample_pauli(e, shots, rng)
        mean += w * m
        var += (w * s) ** 2
    return float(mean), float(np.sqrt(var))


class BasisSample(NamedTuple):
    probs: np.ndarray
    sigma: np.ndarray
    counts: np.ndarray
    shots: int


def sample_computational_basis(rho, shots: int, rng) -> BasisSample:
    if shots < 1:
        raise ValueError("need at least 1 shot")
    d = diagonal_distribution(rho)
    counts = rng.multinomial(shots, d)
    probs = counts / shots
    sigma = np.sqrt(probs * (1 - probs) / shots)
    return BasisSample(probs, sigma, counts, shots)


def fidelity(rho, psi) -> float:
    psi = np.asarray(psi, dtype=complex).ravel()
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[0] != psi.size:
        raise ValueError("dimension mismatch between state and density matrix")
    return float(np.real(np.vdot(psi, rho @ psi)))


def random_density_matrix(dim: int, rng, rank: int | None = None) -> np.ndarray:
    """Random state ``G G^dagger / tr`` from a complex Ginibre matrix."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
