"""Pauli algebra and stabilizer groups for the supported multi-qubit states.

Stabilizer group elements are indexed by a generator-subset bitmask ``T``:
bit ``i`` of ``T`` set means generator ``i`` (0-based) is a factor, so
``T = 0`` is the identity and ``T = 0b011`` is ``S_1 S_2``.  The same
bitmask indexes the rows of :func:`eigenvalue_matrix`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Callable

import numpy as np

__all__ = [
    "PauliString",
    "ObservableSum",
    "StabilizerSet",
    "StateSpec",
    "NonHermitianProductError",
    "pauli_product",
    "observable_product",
    "ghz_generators",
    "cluster_c4_generators",
    "linear_cluster_generators",
    "conjugated_generators",
    "eigenvalue_matrix",
    "matrix_representation",
    "pauli_matrix",
    "get_state",
    "state_labels",
]

_COEFF_TOL = 1e-12

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (a, b) -> (power of i, letter) with a.b = i**power * letter
_MULT: dict[tuple[str, str], tuple[int, str]] = {}
for _a in "IXYZ":
    _MULT["I", _a] = (0, _a)
    _MULT[_a, "I"] = (0, _a)
    _MULT[_a, _a] = (0, "I")
_MULT["X", "Y"] = (1, "Z")
_MULT["Y", "X"] = (3, "Z")
_MULT["Y", "Z"] = (1, "X")
_MULT["Z", "Y"] = (3, "X")
_MULT["Z", "X"] = (1, "Y")
_MULT["X", "Z"] = (3, "Y")

_PHASES = (1, 1j, -1, -1j)


class NonHermitianProductError(ValueError):
    """A product of observables left an imaginary residue."""


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis with a phase ``i**power``."""

    letters: str
    power: int = 0

    def __post_init__(self):
        if not self.letters or set(self.letters) - set("IXYZ"):
            raise ValueError(f"invalid Pauli letters {self.letters!r}")
        object.__setattr__(self, "power", self.power % 4)

    @classmethod
    def parse(cls, text: str) -> PauliString:
        """Parse ``'XXX'``, ``'-YYX'``, ``'+iZ'`` or ``'-iXY'``."""
        text = text.strip()
        power = 0
        if text[0] in "+-":
            power = 2 if text[0] == "-" else 0
            text = text[1:]
        if text.startswith("i"):
            power += 1
            text = text[1:]
        return cls(text, power)

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def phase(self) -> complex:
        return _PHASES[self.power]

    @property
    def is_hermitian(self) -> bool:
        return self.power % 2 == 0

    def matrix(self) -> np.ndarray:
        mats = [_SINGLE[c] for c in self.letters]
        return self.phase * reduce(np.kron, mats)

    def __mul__(self, other: PauliString) -> PauliString:
        return pauli_product(self, other)

    def __str__(self):
        sign = {0: "", 1: "i", 2: "-", 3: "-i"}[self.power]
        return sign + self.letters


def pauli_product(a: PauliString, b: PauliString) -> PauliString:
    if a.n != b.n:
        raise ValueError("Pauli strings act on different qubit counts")
    power = a.power + b.power
    letters = []
    for x, y in zip(a.letters, b.letters):
        p, c = _MULT[x, y]
        power += p
        letters.append(c)
    return PauliString("".join(letters), power)


@dataclass(frozen=True)
class ObservableSum:
    """Real linear combination of Hermitian Pauli strings.

    ``terms`` maps Pauli letters to real weights; the sign of a signed
    string such as ``-YYX`` lives in its weight.
    """

    n: int
    terms: tuple[tuple[str, float], ...]

    @classmethod
    def from_terms(cls, n: int, terms) -> ObservableSum:
        """Build from ``(weight, PauliString | str)`` pairs, merging like terms."""
        acc: dict[str, complex] = {}
        for weight, pauli in terms:
            if isinstance(pauli, str):
                pauli = PauliString.parse(pauli)
            if pauli.n != n:
                raise ValueError(f"term {pauli} does not act on {n} qubits")
            acc[pauli.letters] = acc.get(pauli.letters, 0) + weight * pauli.phase
        return cls._from_accumulator(n, acc)

    @classmethod
    def pauli(cls, text: str) -> ObservableSum:
        p = PauliString.parse(text)
        return cls.from_terms(p.n, [(1.0, p)])

    @classmethod
    def identity(cls, n: int) -> ObservableSum:
        return cls(n, (("I" * n, 1.0),))

    @classmethod
    def _from_accumulator(cls, n, acc):
        terms = []
        for letters in sorted(acc):
            c = complex(acc[letters])
            if abs(c.imag) > 1e-9:
                raise NonHermitianProductError(
                    f"term {letters} has imaginary weight {c}")
            if abs(c.real) >= _COEFF_TOL:
                terms.append((letters, c.real))
        return cls(n, tuple(terms))

    def as_dict(self) -> dict[str, float]:
        return dict(self.terms)

    @property
    def is_pauli(self) -> bool:
        """True for a single signed Pauli string with weight +-1."""
        return len(self.terms) == 1 and abs(abs(self.terms[0][1]) - 1) < 1e-12

    def matrix(self) -> np.ndarray:
        return matrix_representation(self)

    def __mul__(self, other: ObservableSum) -> ObservableSum:
        return observable_product(self, other)

    def __str__(self):
        parts = []
        for letters, w in self.terms:
            parts.append(f"{w:+.6g}*{letters}")
        return " ".join(parts) if parts else "0"


def observable_product(a: ObservableSum, b: ObservableSum) -> ObservableSum:
    """Distribute ``a * b`` over Pauli terms.

    Raises
    ------
    NonHermitianProductError
        If an imaginary coefficient survives, i.e. ``a`` and ``b`` do not
        commute on the terms that matter.
    """
    if a.n != b.n:
        raise ValueError("observables act on different qubit counts")
    acc: dict[str, complex] = {}
    for la, wa in a.terms:
        for lb, wb in b.terms:
            p = pauli_product(PauliString(la), PauliString(lb))
            acc[p.letters] = acc.get(p.letters, 0) + wa * wb * p.phase
    return ObservableSum._from_accumulator(a.n, acc)


def pauli_matrix(letters: str) -> np.ndarray:
    return reduce(np.kron, [_SINGLE[c] for c in letters])


def matrix_representation(obs: ObservableSum) -> np.ndarray:
    if obs.n > 6:
        raise ValueError("matrix representation limited to 6 qubits")
    dim = 2 ** obs.n
    out = np.zeros((dim, dim), dtype=complex)
    for letters, w in obs.terms:
        out += w * pauli_matrix(letters)
    return out


@dataclass(frozen=True)
class StabilizerSet:
    """Generators and the full ``2**n``-element group they generate."""

    n: int
    generators: tuple[ObservableSum, ...]
    elements: tuple[ObservableSum, ...]

    @classmethod
    def from_generators(cls, generators) -> StabilizerSet:
        generators = tuple(
            ObservableSum.pauli(g) if isinstance(g, str) else g for g in generators)
        n = generators[0].n
        if len(generators) != n:
            raise ValueError(f"need {n} generators, got {len(generators)}")
        elements = [ObservableSum.identity(n)]
        # element(T) = element(T without its highest bit) * generator(highest bit)
        for i, g in enumerate(generators):
            elements.extend(observable_product(e, g) for e in elements[: 1 << i])
        return cls(n, generators, tuple(elements))

    def element(self, mask: int) -> ObservableSum:
        return self.elements[mask]

    def __len__(self):
        return len(self.elements)


def _check_n(n, lo=2, hi=6):
    if not lo <= n <= hi:
        raise ValueError(f"qubit count must be in [{lo}, {hi}], got {n}")


def ghz_generators(n: int) -> StabilizerSet:
    """``X...X`` followed by nearest-neighbour ``ZZ`` pairs."""
    _check_n(n)
    gens = ["X" * n]
    for i in range(1, n):
        gens.append("I" * (i - 1) + "ZZ" + "I" * (n - i - 1))
    return StabilizerSet.from_generators(gens)


def linear_cluster_generators(n: int) -> StabilizerSet:
    """Linear-graph generators ``Z_{i-1} X_i Z_{i+1}`` (open boundary)."""
    _check_n(n)
    gens = []
    for i in range(n):
        s = ["I"] * n
        s[i] = "X"
        if i > 0:
            s[i - 1] = "Z"
        if i < n - 1:
            s[i + 1] = "Z"
        gens.append("".join(s))
    return StabilizerSet.from_generators(gens)


def cluster_c4_generators() -> StabilizerSet:
    """Generators of ``(|0000> + |0011> + |1100> - |1111>)/2``.

    These are the linear-cluster generators conjugated by ``H I I H``.
    """
    return StabilizerSet.from_generators(["ZZII", "XXZI", "IZXX", "IIZZ"])


def _pauli_decompose(mat: np.ndarray, n: int) -> ObservableSum:
    dim = 2 ** n
    terms = []
    for letters in map("".join, product("IXYZ", repeat=n)):
        c = np.trace(pauli_matrix(letters) @ mat) / dim
        if abs(c) >= _COEFF_TOL:
            if abs(c.imag) > 1e-9:
                raise NonHermitianProductError(f"{letters} has weight {c}")
            terms.append((c.real, letters))
    return ObservableSum.from_terms(n, terms)


def conjugated_generators(U: np.ndarray, n: int) -> StabilizerSet:
    """Stabilizers ``U Z_i U^dagger`` of the state ``U|0...0>``."""
    U = np.asarray(U, dtype=complex)
    dim = 2 ** n
    if U.shape != (dim, dim):
        raise ValueError(f"unitary must be {dim}x{dim}")
    if np.max(np.abs(U @ U.conj().T - np.eye(dim))) > 1e-9:
        raise ValueError("matrix is not unitary")
    gens = []
    for i in range(n):
        z = pauli_matrix("I" * i + "Z" + "I" * (n - i - 1))
        gens.append(_pauli_decompose(U @ z @ U.conj().T, n))
    # snap weights like 0.6666666666666666 so products merge exactly
    gens = [ObservableSum(g.n, tuple((l, _snap(w)) for l, w in g.terms)) for g in gens]
    return StabilizerSet.from_generators(gens)


def _snap(w: float) -> float:
    for den in (1, 2, 3, 4, 6, 8, 9, 12, 16):
        r = round(w * den)
        if abs(w * den - r) < 1e-10:
            return r / den
    return w


def eigenvalue_matrix(n: int) -> np.ndarray:
    """``B[T, k] = (-1)**popcount(T & k)`` as an int8 array.

    Column ``k`` labels the common eigenvector whose eigenvalue under
    generator ``i`` is ``(-1)**(bit i of k)``; ``k = 0`` is the stabilized
    state itself.
    """
    _check_n(n, 1, 6)
    idx = np.arange(2 ** n)
    anded = idx[:, None] & idx[None, :]
    parity = np.zeros_like(anded)
    for bit in range(n):
        parity ^= (anded >> bit) & 1
    return (1 - 2 * parity).astype(np.int8)


# --- state registry --------------------------------------------------------

@dataclass(frozen=True)
class StateSpec:
    label: str
    n: int
    amplitudes: np.ndarray
    stabilizers: StabilizerSet


def _basis_amplitudes(n, entries):
    psi = np.zeros(2 ** n, dtype=complex)
    for bits, amp in entries.items():
        psi[int(bits, 2)] = amp
    return psi


def _w_unitary(n):
    if n == 3:
        terms = ["XZI", "IXZ", "ZIX"]
    elif n == 4:
        terms = ["ZZZX", "ZZXI", "ZXII", "XIII"]
    else:
        raise ValueError("W unitaries known for n = 3, 4 only")
    return sum(pauli_matrix(t) for t in terms) / np.sqrt(len(terms))


def _stabilized_state(stab: StabilizerSet) -> np.ndarray:
    proj = sum(e.matrix() for e in stab.elements) / len(stab)
    col = proj[:, np.argmax(np.abs(np.diag(proj)))]
    col = col / np.linalg.norm(col)
    # fix global phase so the first nonzero amplitude is real positive
    j = np.flatnonzero(np.abs(col) > 1e-12)[0]
    return col * (abs(col[j]) / col[j])


def _ghz(n):
    a = 1 / np.sqrt(2)
    return StateSpec(f"ghz{n}", n, _basis_amplitudes(n, {"0" * n: a, "1" * n: a}),
                     ghz_generators(n))


def _w(n):
    a = 1 / np.sqrt(n)
    entries = {format(1 << j, f"0{n}b"): a for j in range(n)}
    stab = conjugated_generators(_w_unitary(n), n)
    if n == 4:
        # conventional W4 numbering: generator i is U Z_{5-i} U^dagger
        stab = StabilizerSet.from_generators(stab.generators[::-1])
    return StateSpec(f"w{n}", n, _basis_amplitudes(n, entries), stab)


def _c4():
    amps = _basis_amplitudes(4, {"0000": .5, "0011": .5, "1100": .5, "1111": -.5})
    return StateSpec("c4", 4, amps, cluster_c4_generators())


def _bell():
    a = 1 / np.sqrt(2)
    return StateSpec("bell", 2, _basis_amplitudes(2, {"00": a, "11": a}),
                     StabilizerSet.from_generators(["XX", "ZZ"]))


def _cluster(n):
    stab = linear_cluster_generators(n)
    return StateSpec(f"cluster-{n}", n, _stabilized_state(stab), stab)


_REGISTRY: dict[str, Callable[[], StateSpec]] = {
    "ghz3": lambda: _ghz(3),
    "ghz4": lambda: _ghz(4),
    "c4": _c4,
    "w3": lambda: _w(3),
    "w4": lambda: _w(4),
    "bell": _bell,
}


def state_labels() -> list[str]:
    return list(_REGISTRY) + ["cluster-<n> (2 <= n <= 6)"]


def get_state(label: str) -> StateSpec:
    """Look up an ideal state and its stabilizer group by CLI label."""
    key = label.lower()
    if key in _REGISTRY:
        return _REGISTRY[key]()
    if key.startswith("cluster-"):
        try:
            n = int(key.split("-", 1)[1])
        except ValueError:
            raise KeyError(label) from None
        _check_n(n)
        return _cluster(n)
    raise KeyError(f"unknown state label {label!r}")
