import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from summatrix.errors import DomainError, InvalidInputError
from summatrix.library import generate
from summatrix.sequences import (
    FactorProfile,
    SequencePrefix,
    build_weight_system,
    check_quasi_monotone,
    forward_difference,
    partial_sums,
    total_variation,
)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def seq(values, base=0):
    return SequencePrefix(np.asarray(values, dtype=float), base)


class TestSequencePrefix:
    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidInputError, match="index 3"):
            SequencePrefix([0.0, 1.0, np.nan], base=1)

    def test_rejects_bad_base(self):
        with pytest.raises(InvalidInputError):
            SequencePrefix([1.0], base=2)

    def test_values_are_read_only(self):
        s = seq([1, 2, 3])
        with pytest.raises(ValueError):
            s.values[0] = 5

    def test_one_based_indexing(self):
        s = seq([10, 20, 30], base=1)
        assert s.at(1) == 10 and s.at(3) == 30
        assert s.indices.tolist() == [1, 2, 3]
        with pytest.raises(IndexError):
            s.at(0)

    def test_generator_extends(self):
        s = generate("harmonic", 4)
        longer = s.extend(10)
        assert len(longer) == 10
        np.testing.assert_array_equal(longer.values[:4], s.values)


class TestForwardDifference:
    def test_harmonic(self):
        out = forward_difference(seq([1, 1 / 2, 1 / 3]))
        expected = [Fraction(1) - Fraction(1, 2), Fraction(1, 2) - Fraction(1, 3)]
        np.testing.assert_allclose(out.values, [float(e) for e in expected], rtol=1e-15)

    def test_constant(self):
        assert forward_difference(seq([4, 4, 4])).values.tolist() == [0, 0]

    def test_single(self):
        assert forward_difference(seq([3, 1])).values.tolist() == [2]

    def test_keeps_base(self):
        assert forward_difference(seq([3, 1, 0], base=1)).base == 1

    def test_too_short(self):
        with pytest.raises(InvalidInputError):
            forward_difference(seq([1]))


class TestPartialSums:
    def test_ones(self):
        assert partial_sums(seq([1, 1, 1, 1])).values.tolist() == [1, 2, 3, 4]

    def test_alternating(self):
        assert partial_sums(seq([1, -1, 1, -1])).values.tolist() == [1, 0, 1, 0]

    def test_harmonic(self):
        expected = np.cumsum([float(Fraction(1, n + 1)) for n in range(4)])
        np.testing.assert_allclose(partial_sums(generate("harmonic", 4)).values, expected, rtol=1e-15)
        np.testing.assert_allclose(expected, [1, 1.5, 11 / 6, 25 / 12])

    @given(st.lists(finite, min_size=2, max_size=60))
    def test_telescoping(self, values):
        s = seq(values)
        # s_{n+1} = s_0 - sum_{j<=n} (Delta s)_j
        rebuilt = s.values[0] - partial_sums(forward_difference(s)).values
        scale = np.max(np.abs(s.values)) + 1.0
        np.testing.assert_allclose(rebuilt, s.values[1:], rtol=1e-12, atol=1e-12 * scale * len(values))


class TestWeightSystem:
    def test_ones(self):
        w = build_weight_system(generate("ones", 4))
        assert w.P.values.tolist() == [1, 2, 3, 4]
        expected = [float(sum(Fraction(1, v + 1) for v in range(1, n + 1))) for n in (1, 2, 3)]
        np.testing.assert_allclose(w.X.values, expected, rtol=1e-15)
        assert w.X.base == 1

    def test_single_weight(self):
        w = build_weight_system(seq([2.0]))
        assert w.P.values.tolist() == [2.0]
        assert len(w.X) == 0

    def test_geometric(self):
        w = build_weight_system(generate("geometric:2", 6))
        np.testing.assert_array_equal(w.P.values, 2.0 ** np.arange(1, 7) - 1)
        assert w.X.at(2) == pytest.approx(2 / 3 + 4 / 7, rel=1e-15)

    def test_nonpositive_weight_names_index(self):
        with pytest.raises(DomainError, match="p_2"):
            build_weight_system(seq([1.0, 1.0, 0.0, 1.0]))

    def test_harmonic_tail_identity(self):
        N = 2000
        w = build_weight_system(generate("ones", N))
        H = np.cumsum(1.0 / np.arange(1, N + 1))  # H_1 .. H_N
        # X_n = H_{n+1} - 1
        np.testing.assert_allclose(w.X.values, H[1:] - 1.0, rtol=1e-12)

    @given(st.lists(st.floats(min_value=1e-3, max_value=1e3), min_size=2, max_size=80))
    def test_X_strictly_increasing(self, p):
        w = build_weight_system(seq(p))
        assert np.all(np.diff(w.X.values) > 0)
        assert np.all(np.diff(w.P.values) > 0)


class TestTotalVariation:
    def test_examples(self):
        assert total_variation(seq([0, 1, 0, 1])) == 3
        assert total_variation(seq([1, 1 / 2, 1 / 3, 1 / 4])) == pytest.approx(3 / 4, rel=1e-15)
        assert total_variation(seq([2, 2, 2])) == 0

    def test_too_short(self):
        with pytest.raises(InvalidInputError):
            total_variation(seq([1]))


def _brute_force_quasi_monotone(d, delta, tail_fraction=0.5, ratio=0.1, window_frac=0.1):
    N = len(d)
    clause_i = all(d[n] - d[n + 1] >= -delta[n] for n in range(N - 1))
    cutoff = N - max(1, math.ceil(tail_fraction * N))
    clause_ii = all(d[n] > 0 for n in range(cutoff, N))
    window = max(1, math.ceil(window_frac * N))
    head = max(abs(v) for v in d[: N - window])
    clause_iii = all(abs(v) <= ratio * head for v in d[N - window :])
    return clause_i, clause_ii, clause_iii


class TestQuasiMonotone:
    def test_harmonic_passes(self):
        N = 100
        d = 1.0 / np.arange(1, N + 1)
        r = check_quasi_monotone(seq(d, 1), seq(np.zeros(N), 1), 0.5)
        assert r.verdict == "pass"
        assert r.thresholds["positivity_cutoff_index"] == 51

    def test_constant_fails_decay(self):
        N = 50
        r = check_quasi_monotone(seq(np.ones(N), 1), seq(np.ones(N), 1), 0.5)
        assert r.verdict == "fail"
        assert any("clause (iii)" in note for note in r.notes)
        assert not any("clause (i)" in note for note in r.notes)

    def test_oscillating_against_brute_force(self):
        N = 1000
        n = np.arange(1, N + 1, dtype=float)
        d = (2 + (-1) ** n) / n**2
        delta = 1 / n**2
        expected = _brute_force_quasi_monotone(list(d), list(delta))
        r = check_quasi_monotone(seq(d, 1), seq(delta, 1), 0.5)
        # for odd n, Delta d_n = 1/n^2 - 3/(n+1)^2 >= -1/n^2 needs 2(n+1)^2 >= 3n^2,
        # which first fails at n = 5
        assert expected == (False, True, True)
        assert r.verdict == "fail"
        assert r.first_violation == 5
        assert sum("clause" in note and "fails" in note for note in r.notes) == 1

    def test_clause_i_violation_index(self):
        d = np.array([1.0, 0.5, 0.9, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.001])
        r = check_quasi_monotone(seq(d, 1), seq(np.full(10, 0.1), 1), 0.5)
        assert r.verdict == "fail"
        assert r.first_violation == 2  # Delta d_2 = 0.5 - 0.9 = -0.4 < -0.1

    def test_mismatched_lengths(self):
        with pytest.raises(InvalidInputError):
            check_quasi_monotone(seq(np.ones(10), 1), seq(np.ones(5), 1), 0.5)

    def test_bad_fraction(self):
        with pytest.raises(DomainError):
            check_quasi_monotone(seq(np.ones(10), 1), seq(np.ones(10), 1), 1.5)

    @settings(max_examples=60)
    @given(
        st.lists(st.floats(min_value=-1, max_value=1), min_size=4, max_size=40),
        st.lists(st.floats(min_value=0, max_value=1), min_size=40, max_size=40),
        st.lists(st.floats(min_value=0, max_value=1), min_size=40, max_size=40),
    )
    def test_monotone_in_delta(self, d, delta, bump):
        N = len(d)
        small = seq(delta[:N], 1)
        big = seq(np.array(delta[:N]) + np.array(bump[:N]), 1)
        r_small = check_quasi_monotone(seq(d, 1), small, 0.5)
        r_big = check_quasi_monotone(seq(d, 1), big, 0.5)
        clause_i = lambda r: not any("clause (i)" in note for note in r.notes)
        if clause_i(r_small):
            assert clause_i(r_big)


def test_factor_profile_validates():
    lam = seq(np.ones(6), 1)
    with pytest.raises(InvalidInputError):
        FactorProfile(seq(np.ones(5), 1), seq(np.ones(5), 1), seq(np.zeros(5), 1))
    with pytest.raises(DomainError):
        FactorProfile(lam, seq(np.ones(5), 1), seq(-np.ones(5), 1))
