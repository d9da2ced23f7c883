import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from summatrix.errors import DomainError, InvalidInputError
from summatrix.indices import (
    AbsoluteIndexTrace,
    assess_boundedness,
    boundedness_report,
    cesaro_index,
    matrix_index,
    riesz_index,
)
from summatrix.library import generate
from summatrix.matrices import identity_matrix, weighted_mean_matrix
from summatrix.sequences import SequencePrefix, build_weight_system


def random_series(seed, N=500):
    return SequencePrefix(np.random.default_rng(seed).uniform(-1, 1, N))


def ones_weights(N):
    return build_weight_system(generate("ones", N))


class TestCesaroIndex:
    def test_zero(self):
        tr = cesaro_index(generate("zeros", 50), 1.0, 2.0)
        assert np.all(tr.terms.values == 0) and np.all(tr.cumulative.values == 0)

    def test_telescoping(self):
        N = 400
        a = np.zeros(N)
        a[1] = 1.0
        tr = cesaro_index(SequencePrefix(a), 1.0, 1.0)
        n = np.arange(1, N)
        np.testing.assert_allclose(tr.terms.values, 1.0 / (n * (n + 1)), rtol=1e-13)
        # sum_{n<=m} 1/(n(n+1)) = 1 - 1/(m+1)
        np.testing.assert_allclose(tr.cumulative.values, 1.0 - 1.0 / (n + 1), rtol=1e-13)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_dual_forms_agree(self, alpha):
        # cesaro_index raises if the two forms disagree beyond 1e-8
        tr = cesaro_index(random_series(3, 300), alpha, 2.0)
        assert len(tr) == 299 and tr.terms.base == 1

    def test_k_below_one(self):
        with pytest.raises(DomainError):
            cesaro_index(random_series(0, 20), 1.0, 0.5)


class TestRieszIndex:
    def test_zero(self):
        tr = riesz_index(generate("zeros", 40), ones_weights(40), 1.5)
        assert np.all(tr.cumulative.values == 0)

    def test_unit_weights_k1_is_cesaro(self):
        a = random_series(5)
        r = riesz_index(a, ones_weights(500), 1.0)
        c = cesaro_index(a, 1.0, 1.0)
        np.testing.assert_allclose(r.terms.values, c.terms.values, rtol=1e-12, atol=1e-15)

    @pytest.mark.parametrize("k", [1.0, 1.5, 2.0])
    def test_unit_weights_factor_relation(self, k):
        # P_n/p_n = n + 1 against the n in the Cesaro form: the summands
        # differ by ((n+1)/n)^(k-1), which is 1 only for k = 1
        a = random_series(6)
        r = riesz_index(a, ones_weights(500), k).terms.values
        c = cesaro_index(a, 1.0, k).terms.values
        n = np.arange(1, 500)
        np.testing.assert_allclose(r, ((n + 1) / n) ** (k - 1) * c, rtol=1e-12, atol=1e-15)

    def test_alternating_harmonic_brute_force(self):
        N = 200
        a = np.array([0.0] + [(-1) ** n / n for n in range(1, N)])
        s = np.cumsum(a)
        w = [sum(s[: n + 1]) / (n + 1) for n in range(N)]
        expected = sum(abs(w[n] - w[n - 1]) for n in range(1, N))
        tr = riesz_index(SequencePrefix(a), ones_weights(N), 1.0)
        assert tr.cumulative.values[-1] == pytest.approx(expected, rel=1e-12)

    def test_log_space_weights(self):
        # p_n = 2^-n makes P_n/p_n grow like 2^n; the log path must stay finite
        N = 80
        w = build_weight_system(generate("geometric:0.5", N))
        tr = riesz_index(random_series(1, N), w, 3.0)
        assert np.all(np.isfinite(tr.terms.values))


class TestMatrixIndex:
    @pytest.mark.parametrize("k", [1.0, 1.5, 2.0])
    def test_weighted_mean_is_riesz(self, k):
        rng = np.random.default_rng(int(k * 10))
        w = build_weight_system(SequencePrefix(rng.uniform(0.1, 2, 300)))
        a = SequencePrefix(rng.uniform(-1, 1, 300))
        r = riesz_index(a, w, k).terms.values
        for A in (weighted_mean_matrix(w, 300), weighted_mean_matrix(w, 300).generic()):
            m = matrix_index(a, A, w, k).terms.values
            np.testing.assert_allclose(m, r, rtol=1e-10, atol=1e-14)

    def test_zero(self):
        tr = matrix_index(generate("zeros", 30), identity_matrix(30), ones_weights(30), 2.0)
        assert np.all(tr.terms.values == 0)

    @pytest.mark.parametrize("k", [1.0, 2.0])
    def test_identity_reduction(self, k):
        # identity matrix: dA_n = a_n, and with p_n = 1 the weight is P_n/p_n = n + 1
        a = random_series(8, 100)
        tr = matrix_index(a, identity_matrix(100), ones_weights(100), k)
        n = np.arange(1, 100)
        np.testing.assert_allclose(tr.terms.values, (n + 1.0) ** (k - 1) * np.abs(a.values[1:]) ** k, rtol=1e-13)

    def test_short_weights(self):
        with pytest.raises(InvalidInputError):
            matrix_index(random_series(0, 10), identity_matrix(10), ones_weights(5), 1.0)


@settings(max_examples=20, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.floats(min_value=-50, max_value=50).filter(lambda c: abs(c) > 1e-3),
    st.sampled_from([1.0, 1.5, 2.0]),
)
def test_scaling_covariance(seed, c, k):
    a = random_series(seed, 60)
    ca = SequencePrefix(c * a.values)
    w = ones_weights(60)
    for index in (
        lambda x: cesaro_index(x, 1.0, k),
        lambda x: riesz_index(x, w, k),
        lambda x: matrix_index(x, weighted_mean_matrix(w, 60), w, k),
    ):
        base, scaled = index(a).terms.values, index(ca).terms.values
        np.testing.assert_allclose(scaled, abs(c) ** k * base, rtol=1e-10, atol=1e-300)


class TestBoundedness:
    def test_converged(self):
        v = assess_boundedness(SequencePrefix(np.ones(100)))
        assert v.bounded_estimate and v.tail_increment == 0

    def test_linear(self):
        v = assess_boundedness(SequencePrefix(np.arange(1.0, 1001.0)))
        assert not v.bounded_estimate
        assert v.fitted_growth_exponent == pytest.approx(1.0, abs=0.01)

    def test_harmonic(self):
        H = np.cumsum(1.0 / np.arange(1, 10_001))
        v = assess_boundedness(SequencePrefix(H))
        assert not v.bounded_estimate
        assert v.tail_increment == pytest.approx(np.log(2), rel=1e-3)

    def test_too_short(self):
        with pytest.raises(InvalidInputError):
            assess_boundedness(SequencePrefix(np.ones(15)))

    def test_thresholds_reported(self):
        d = assess_boundedness(SequencePrefix(np.ones(20))).to_dict()
        assert d["growth_threshold"] == 0.1 and d["tail_threshold"] == pytest.approx(0.05 + 1e-9)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(min_value=0, max_value=10), min_size=16, max_size=80),
        st.integers(min_value=1, max_value=200),
    )
    def test_appending_zeros_is_monotone(self, terms, extra):
        before = assess_boundedness(SequencePrefix(np.cumsum(terms)))
        after = assess_boundedness(SequencePrefix(np.cumsum(terms + [0.0] * extra)))
        if before.bounded_estimate:
            assert after.bounded_estimate

    def test_report_first_violation(self):
        S = np.concatenate((np.ones(50), np.arange(2.0, 52.0)))
        r = boundedness_report("b", SequencePrefix(S, 1))
        assert r.verdict == "fail"
        assert r.first_violation == 51


def test_csv_round_trip(tmp_path):
    tr = riesz_index(random_series(2, 50), ones_weights(50), 1.5)
    tr.write_csv(tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "n,term,cumulative"
    back = AbsoluteIndexTrace.read_csv(tmp_path / "t.csv")
    np.testing.assert_array_equal(back.terms.values, tr.terms.values)
    np.testing.assert_array_equal(back.cumulative.values, tr.cumulative.values)
    assert back.terms.base == 1
