"""Lower and upper bounds on the relative entropy of coherence.

The lower bound needs the computational-basis distribution ``d`` and a
set of stabilizer expectation records; the upper bound needs ``d`` only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cohest.majorization import ConstraintSet, join_pair, meet_over_polytope
from cohest.qsim import shannon_entropy

__all__ = [
    "MeasurementRecord",
    "LowerBound",
    "BoundReport",
    "NO_SOLUTION",
    "NON_POSITIVE",
    "build_constraints",
    "lower_bound",
    "upper_bound",
    "uncertainty_u_c",
    "normalized_distance",
]

NO_SOLUTION = "no_solution"
NON_POSITIVE = "non_positive"
_LC_FLOOR = 1e-12


@dataclass(frozen=True)
class MeasurementRecord:
    """Estimated expectation of stabilizer element ``mask``."""

    mask: int
    mean: float
    sigma: float = 0.0
    shots: int = 0

    def __post_init__(self):
        if self.mask < 0:
            raise ValueError("negative subset mask")
        if self.sigma < 0:
            raise ValueError("negative standard error")
        object.__setattr__(self, "mean", float(min(1.0, max(-1.0, self.mean))))
        if self.mask == 0 and (self.mean != 1.0 or self.sigma != 0.0):
            raise ValueError("identity record must have mean 1 and sigma 0")

    @classmethod
    def identity(cls) -> MeasurementRecord:
        return cls(0, 1.0, 0.0, 0)


@dataclass(frozen=True)
class LowerBound:
    value: float | None
    reason: str | None = None
    meet: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def valid(self) -> bool:
        return self.reason is None


def build_constraints(records, w: float, B) -> ConstraintSet:
    """Interval rows ``mean -+ w*sigma`` (clamped to [-1, 1]) on ``B[mask] @ p``.

    ``w = 0`` gives equality rows.  The identity record adds nothing beyond
    the implicit normalization and is skipped.
    """
    records = list(records)
    if not records:
        raise ValueError("no measurement records")
    if w < 0:
        raise ValueError(f"w must be nonnegative, got {w}")
    B = np.asarray(B)
    masks = [r.mask for r in records]
    if len(set(masks)) != len(masks):
        raise ValueError("duplicate stabilizer element in records")
    if max(masks) >= B.shape[0]:
        raise ValueError("record mask outside the stabilizer group")
    rows = [r for r in records if r.mask != 0]
    coeffs = np.array([B[r.mask] for r in rows], dtype=float).reshape(-1, B.shape[1])
    lower = np.array([max(-1.0, r.mean - w * r.sigma) for r in rows])
    upper = np.array([min(1.0, r.mean + w * r.sigma) for r in rows])
    return ConstraintSet(B.shape[1], coeffs, lower, upper)


def lower_bound(d, cs: ConstraintSet) -> LowerBound:
    """``S(d) - S(d join meet(X))``; invalid when X is empty or the value is <= 0."""
    d = np.asarray(d, dtype=float)
    if d.size != cs.dim:
        raise ValueError(f"distribution has {d.size} entries, polytope {cs.dim}")
    q = meet_over_polytope(cs)
    if q is None:
        return LowerBound(None, NO_SOLUTION)
    lc = shannon_entropy(d) - shannon_entropy(join_pair(d, q))
    if lc <= _LC_FLOOR:
        return LowerBound(lc, NON_POSITIVE, q)
    return LowerBound(lc, None, q)


def upper_bound(d) -> float:
    """Coherence of ``sum_i sqrt(d_i)|i>``, which is just ``H(d)``."""
    return shannon_entropy(d)


def uncertainty_u_c(counts, shots: int, resamples: int, rng) -> float:
    """Bootstrap standard deviation of ``H(counts / shots)``.

    ``shots == 0`` means the distribution is known exactly.
    """
    if shots == 0:
        return 0.0
    if resamples < 100:
        raise ValueError("need at least 100 bootstrap resamples")
    d = np.asarray(counts, dtype=float) / shots
    draws = rng.multinomial(shots, d, size=resamples) / shots
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(draws > 0, draws * np.log2(draws), 0.0)
    return float(np.std(-terms.sum(axis=1), ddof=1))


def normalized_distance(c_re: float, l_c: float) -> float:
    if c_re <= 0:
        raise ValueError("normalized distance needs positive coherence")
    return (c_re - l_c) / c_re


CSV_FIELDS = (
    "state", "n", "noise", "param", "shots", "w", "m", "subset_mask_hex",
    "valid", "invalid_reason", "l_c", "u_c", "u_c_sigma", "c_re_exact",
    "distance_D", "fidelity", "seed",
)


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


@dataclass
class BoundReport:
    state: str
    n: int
    w: float
    masks: tuple[int, ...]
    l_c: LowerBound
    u_c: float
    u_c_sigma: float = 0.0
    c_re_exact: float | None = None
    fidelity: float | None = None
    noise: str = "none"
    param: float = 0.0
    shots: int = 0
    seed: int | None = None
    elapsed: float = field(default=0.0, compare=False)

    @property
    def m(self) -> int:
        """Number of non-identity stabilizer elements constrained."""
        return sum(1 for t in self.masks if t != 0)

    @property
    def distance(self) -> float | None:
        if not self.l_c.valid or self.c_re_exact is None or self.c_re_exact <= 0:
            return None
        return normalized_distance(self.c_re_exact, self.l_c.value)

    @property
    def subset_mask(self) -> int:
        return sum(1 << t for t in self.masks)

    def to_record(self) -> dict:
        """Field values keyed by CSV column, as native Python types."""
        return {
            "state": self.state,
            "n": self.n,
            "noise": self.noise,
            "param": float(self.param),
            "shots": self.shots,
            "w": float(self.w),
            "m": self.m,
            "subset_mask_hex": f"{self.subset_mask:0{2 ** self.n // 4 or 1}x}",
            "valid": self.l_c.valid,
            "invalid_reason": self.l_c.reason,
            "l_c": self.l_c.value,
            "u_c": self.u_c,
            "u_c_sigma": self.u_c_sigma,
            "c_re_exact": self.c_re_exact,
            "distance_D": self.distance,
            "fidelity": self.fidelity,
            "seed": self.seed,
        }

    def to_row(self) -> dict[str, str]:
        values = self.to_record()
        return {k: _fmt(values[k]) for k in CSV_FIELDS}

    def to_dict(self) -> dict:
        row = self.to_record()
        row["elapsed_s"] = self.elapsed
        return row
