import numpy as np
import pytest

from cohest import qsim
from cohest.bounds import (
    CSV_FIELDS,
    NO_SOLUTION,
    NON_POSITIVE,
    BoundReport,
    LowerBound,
    MeasurementRecord,
    build_constraints,
    lower_bound,
    normalized_distance,
    uncertainty_u_c,
    upper_bound,
)
from cohest.majorization import ConstraintSet
from cohest.stabilizer import eigenvalue_matrix, get_state


def exact_records(rho, stab, masks):
    return [MeasurementRecord.identity()] + [
        MeasurementRecord(t, qsim.expectation(rho, stab.element(t))) for t in masks]


def test_record_invariants():
    r = MeasurementRecord(3, 1.2, 0.1)
    assert r.mean == 1.0
    assert MeasurementRecord(3, -1.5).mean == -1.0
    with pytest.raises(ValueError):
        MeasurementRecord(0, 0.9)
    with pytest.raises(ValueError):
        MeasurementRecord(1, 0.5, -0.1)


def test_build_constraints_examples():
    B = eigenvalue_matrix(3)
    recs = [MeasurementRecord.identity()] + [MeasurementRecord(t, 1.0) for t in range(1, 8)]
    cs = build_constraints(recs, 2.0, B)
    assert cs.contains(np.eye(8)[0])
    assert cs.lower.size == 7
    only_identity = build_constraints([MeasurementRecord.identity()], 3, B)
    assert only_identity.coeffs.shape == (0, 8)
    cs = build_constraints([MeasurementRecord(1, 0.9, 0.05)], 3, eigenvalue_matrix(1))
    np.testing.assert_allclose([cs.lower[0], cs.upper[0]], [0.75, 1.0])
    np.testing.assert_array_equal(cs.coeffs, [[1, -1]])


def test_build_constraints_errors():
    B = eigenvalue_matrix(2)
    with pytest.raises(ValueError):
        build_constraints([MeasurementRecord(1, 0.5), MeasurementRecord(1, 0.4)], 1, B)
    with pytest.raises(ValueError):
        build_constraints([MeasurementRecord(1, 0.5)], -1, B)
    with pytest.raises(ValueError):
        build_constraints([MeasurementRecord(4, 0.5)], 1, B)
    with pytest.raises(ValueError):
        build_constraints([], 1, B)


def test_w_zero_gives_equalities():
    B = eigenvalue_matrix(2)
    cs = build_constraints([MeasurementRecord(1, 0.4, 0.1), MeasurementRecord(2, 0.2, 0.1)],
                           0, B)
    np.testing.assert_array_equal(cs.lower, cs.upper)


def test_lower_bound_examples():
    spec = get_state("ghz3")
    rho = qsim.pure_density(spec.amplitudes)
    d = qsim.diagonal_distribution(rho)
    cs = build_constraints(exact_records(rho, spec.stabilizers, range(1, 8)), 0,
                           eigenvalue_matrix(3))
    lc = lower_bound(d, cs)
    assert lc.valid and lc.value == pytest.approx(1.0, abs=1e-9)

    uniform = np.full(4, 0.25)
    lc = lower_bound(uniform, ConstraintSet.simplex(4))
    assert not lc.valid and lc.reason == NON_POSITIVE

    cs = ConstraintSet(2, [[1, -1]], [0.8], [1.0])
    lc = lower_bound([0.5, 0.5], cs)
    h = -(0.9 * np.log2(0.9) + 0.1 * np.log2(0.1))
    assert lc.value == pytest.approx(1 - h, abs=1e-12)
    assert lc.value == pytest.approx(0.531, abs=1e-3)


def test_lower_bound_no_solution_and_dimension():
    cs = ConstraintSet(2, [[1, -1], [1, -1]], [0.9, -1], [1.0, 0.0])
    lc = lower_bound([0.5, 0.5], cs)
    assert lc == LowerBound(None, NO_SOLUTION)
    with pytest.raises(ValueError):
        lower_bound([1.0, 0, 0], ConstraintSet.simplex(2))


@pytest.mark.parametrize("label", ["ghz3", "ghz4", "c4", "w3", "w4"])
def test_sandwich_exact_constraints(label):
    # exact records of a noisy state: l_c <= C_RE <= u_c
    spec = get_state(label)
    B = eigenvalue_matrix(spec.n)
    rng = np.random.default_rng(0)
    for _ in range(5):
        rho = qsim.apply_depolarizing(qsim.pure_density(spec.amplitudes), rng.uniform(0, 0.5))
        rho = qsim.apply_dephasing(rho, rng.uniform(0, 0.3))
        d = qsim.diagonal_distribution(rho)
        recs = exact_records(rho, spec.stabilizers, range(1, 2 ** spec.n))
        lc = lower_bound(d, build_constraints(recs, 0, B))
        c = qsim.exact_relative_entropy_coherence(rho)
        assert lc.valid
        assert lc.value <= c + 1e-8
        assert c <= upper_bound(d) + 1e-8


def test_constraint_monotonicity_in_subsets():
    spec = get_state("c4")
    B = eigenvalue_matrix(4)
    rng = np.random.default_rng(3)
    rho = qsim.apply_depolarizing(qsim.pure_density(spec.amplitudes), 0.1)
    d = qsim.diagonal_distribution(rho)
    stab_rng = np.random.default_rng(4)
    records = {t: MeasurementRecord(t, *qsim.sample_observable(rho, spec.stabilizers.element(t),
                                                                 2000, stab_rng))
               for t in range(1, 16)}
    checked = 0
    for _ in range(100):
        big = rng.choice(np.arange(1, 16), size=int(rng.integers(2, 16)), replace=False)
        small = big[: int(rng.integers(1, big.size))]
        lc_small = lower_bound(d, build_constraints([records[t] for t in small], 3, B))
        lc_big = lower_bound(d, build_constraints([records[t] for t in big], 3, B))
        if lc_small.value is not None and lc_big.value is not None:
            assert lc_small.value <= lc_big.value + 1e-8
            checked += 1
    assert checked >= 90


def test_w_monotonicity():
    spec = get_state("ghz4")
    B = eigenvalue_matrix(4)
    rho = qsim.apply_dephasing(qsim.pure_density(spec.amplitudes), 0.05)
    d = qsim.diagonal_distribution(rho)
    rng = np.random.default_rng(6)
    recs = [MeasurementRecord.identity()] + [
        MeasurementRecord(t, *qsim.sample_observable(rho, spec.stabilizers.element(t), 1000, rng))
        for t in range(1, 16)]
    prev = None
    for w in [0, 0.5, 1, 2, 3, 5, 8]:
        lc = lower_bound(d, build_constraints(recs, w, B))
        if prev is not None and prev.reason != NO_SOLUTION:
            assert lc.reason != NO_SOLUTION  # feasible sets only grow with w
            if lc.valid and prev.valid:
                assert lc.value <= prev.value + 1e-8
        prev = lc


def test_upper_bound_examples_and_invariance():
    for label, value in [("ghz4", 1.0), ("w4", 2.0)]:
        d = qsim.diagonal_distribution(qsim.pure_density(get_state(label).amplitudes))
        assert upper_bound(d) == pytest.approx(value)
    rng = np.random.default_rng(0)
    for _ in range(50):
        d = rng.dirichlet(np.ones(8))
        assert upper_bound(rng.permutation(d)) == pytest.approx(upper_bound(d), abs=1e-12)
        psi = np.sqrt(d)
        assert upper_bound(d) == pytest.approx(
            qsim.exact_relative_entropy_coherence(qsim.pure_density(psi)), abs=1e-9)


def test_bootstrap_uncertainty():
    rng = np.random.default_rng(0)
    assert uncertainty_u_c([3, 7], 0, 1000, rng) == 0.0
    counts = rng.multinomial(10_000, [0.5, 0.5])
    sigma = uncertainty_u_c(counts, 10_000, 1000, rng)
    assert 1e-4 <= sigma <= 5e-3
    p, N = 0.9, 10_000
    delta = np.sqrt(p * (1 - p) / N) * abs(np.log2(p / (1 - p)))
    assert delta == pytest.approx(0.0095, abs=1e-4)
    counts = rng.multinomial(N, [p, 1 - p])
    sigma = uncertainty_u_c(counts, N, 1000, rng)
    assert delta / 2 <= sigma <= 2 * delta
    with pytest.raises(ValueError):
        uncertainty_u_c(counts, N, 50, rng)


def test_normalized_distance():
    assert normalized_distance(1.0, 1.0) == 0
    assert normalized_distance(1.0, 0.5) == 0.5
    with pytest.raises(ValueError):
        normalized_distance(0.0, 0.1)


def test_report_row_schema():
    rep = BoundReport(state="ghz3", n=3, w=3, masks=(0, 1, 2, 5), l_c=LowerBound(0.75),
                      u_c=1.1, u_c_sigma=0.003, c_re_exact=1.0, fidelity=0.96,
                      noise="depolarizing", param=0.05, shots=10_000, seed=7)
    row = rep.to_row()
    assert tuple(row) == CSV_FIELDS
    assert row["m"] == "3"
    assert row["subset_mask_hex"] == "27"
    assert row["valid"] == "true" and row["invalid_reason"] == ""
    assert float(row["distance_D"]) == pytest.approx(0.25)
    bad = BoundReport(state="ghz3", n=3, w=0, masks=(0, 1), l_c=LowerBound(None, NO_SOLUTION),
                      u_c=1.1, c_re_exact=1.0)
    row = bad.to_row()
    assert row["valid"] == "false" and row["invalid_reason"] == "no_solution"
    assert row["l_c"] == "" and row["distance_D"] == ""
    assert bad.to_record()["l_c"] is None
