import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochgen.errors import ColumnSumMismatch, DimMismatch, NegativeEntry
from stochgen.matrix import (
    Permutation,
    SignPattern,
    StochMatrix,
    act,
    act_pattern,
    all_permutations,
    canonical_class,
    induced_one_norm,
    is_permutation_matrix,
    multiply,
    parse_rational,
    pattern_product,
    sign,
    stochastic_patterns,
    validate_stochastic,
    zero_count,
)

from conftest import mat, stochastic_matrices

CIRCULANT_SEVENTHS = [[F(x, 7) for x in r] for r in [[0, 1, 1, 5], [5, 0, 1, 1], [1, 5, 0, 1], [1, 1, 5, 0]]]


class TestValidation:
    def test_accepts_column_stochastic(self):
        A = mat([["1/2", "1/3"], ["1/2", "2/3"]])
        assert A.n == 2 and A[1, 1] == F(2, 3)

    def test_negative_entry_reports_position(self):
        with pytest.raises(NegativeEntry) as err:
            validate_stochastic([["3/2", "1/2"], ["-1/2", "1/2"]])
        assert (err.value.row, err.value.col) == (1, 0)

    def test_bad_column_sum(self):
        with pytest.raises(ColumnSumMismatch) as err:
            validate_stochastic([["1/2", "1/2"], ["1/3", "1/2"]])
        assert err.value.col == 0 and err.value.actual == F(5, 6)

    def test_row_stochastic_is_rejected(self):
        # rows sum to 1, columns do not
        with pytest.raises(ColumnSumMismatch):
            validate_stochastic([["1/2", "1/2"], ["1", "0"]])

    def test_non_square(self):
        with pytest.raises(DimMismatch):
            validate_stochastic([["1", "0"]])

    def test_circulant_example_is_valid(self):
        A = validate_stochastic(CIRCULANT_SEVENTHS)
        assert zero_count(A) == 4

    def test_floats_refused(self):
        with pytest.raises(ValueError):
            parse_rational(0.5)

    @pytest.mark.parametrize("text,value", [("1/3", F(1, 3)), ("0.25", F(1, 4)), (" 2 ", F(2)), (7, F(7))])
    def test_parse_rational(self, text, value):
        assert parse_rational(text) == value


class TestProducts:
    def test_small_product_by_hand(self):
        A = mat([["1/2", "1"], ["1/2", "0"]])
        B = mat([["0", "1/3"], ["1", "2/3"]])
        assert (A @ B).entries == ((F(1), F(5, 6)), (F(0), F(1, 6)))

    @settings(max_examples=60)
    @given(stochastic_matrices(), st.data())
    def test_product_stays_stochastic(self, A, data):
        B = data.draw(stochastic_matrices(n=A.n))
        validate_stochastic((A @ B).entries)

    def test_empty_product_is_identity(self):
        assert multiply([], 3) == StochMatrix.identity(3)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            StochMatrix.identity(2) @ StochMatrix.identity(3)

    def test_induced_norm_is_max_column_sum(self):
        assert induced_one_norm(((F(1), F(-2)), (F(-3), F(1, 2)))) == F(4)


class TestPermutations:
    def test_matrix_convention(self):
        p = Permutation((1, 2, 0))
        M = p.to_matrix()
        assert all(M[j, p(j)] == 1 for j in range(3))

    def test_composition_reverses_matrix_order(self):
        for s, t in itertools.product(all_permutations(3), repeat=2):
            assert (s * t).to_matrix() == t.to_matrix() @ s.to_matrix()

    def test_matrix_acts_by_index(self):
        x = (F(1, 2), F(1, 3), F(1, 6))
        for p in all_permutations(3):
            M = p.to_matrix()
            y = [sum(M[j, k] * x[k] for k in range(3)) for j in range(3)]
            assert y == [x[p(j)] for j in range(3)]

    def test_s3_cycle_identities(self):
        def P(c):
            return Permutation.from_cycles(3, c).to_matrix()

        assert P("(2 3)") == P("(1 2)") @ P("(1 3 2)")
        assert P("(1 2 3)") == P("(1 3 2)") @ P("(1 3 2)")
        assert P("(1 3)") == P("(1 3 2)") @ P("(1 2)")

    @pytest.mark.parametrize("text", ["()", "(1 2)", "(1 3 2)", "(1 2)(3 4)"])
    def test_cycle_round_trip(self, text):
        n = 4
        assert Permutation.from_cycles(n, text).cycles() == text

    def test_from_matrix(self):
        p = Permutation((2, 0, 1))
        assert Permutation.from_matrix(p.to_matrix()) == p

    def test_inverse(self):
        for p in all_permutations(4):
            assert (p * p.inverse()).is_identity()

    @settings(max_examples=40)
    @given(stochastic_matrices(n=3), st.integers(0, 5), st.integers(0, 5))
    def test_act_matches_matrix_product(self, A, a, b):
        pi, tau = all_permutations(3)[a], all_permutations(3)[b]
        assert act(pi, A, tau) == pi.to_matrix() @ A @ tau.to_matrix()

    def test_is_permutation_matrix(self):
        assert is_permutation_matrix(Permutation((1, 0)).to_matrix())
        assert not is_permutation_matrix(mat([["1", "1"], ["0", "0"]]))


class TestSignPatterns:
    def test_sign_of_prime_example(self):
        A = mat([["0", "1/2", "1/2"], ["1/2", "0", "1/2"], ["1/2", "1/2", "0"]])
        assert sign(A).to_strings() == ["011", "101", "110"]

    @settings(max_examples=60)
    @given(stochastic_matrices(), st.data())
    def test_sign_is_multiplicative(self, A, data):
        B = data.draw(stochastic_matrices(n=A.n))
        assert sign(A @ B) == pattern_product(sign(A), sign(B))

    def test_pattern_product_by_hand(self):
        P = SignPattern.from_strings(["11", "10"])
        assert (P @ P).to_strings() == ["11", "11"]

    def test_pattern_product_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            SignPattern.identity(2) @ SignPattern.identity(3)

    @pytest.mark.parametrize("n,count", [(1, 1), (2, 9), (3, 343)])
    def test_pattern_count(self, n, count):
        pats = stochastic_patterns(n)
        assert len(pats) == len(set(pats)) == count
        assert all(P.is_stochastic_compatible() for P in pats)

    def test_canonical_class_is_orbit_minimum(self):
        # oracle: enumerate the whole S3 x S3 orbit
        for P in stochastic_patterns(3)[::7]:
            orbit = {act_pattern(p, P, q) for p in all_permutations(3) for q in all_permutations(3)}
            assert canonical_class(P) == min(orbit)
            assert all(canonical_class(Q) == canonical_class(P) for Q in orbit)

    def test_six_prime_forms_share_a_class(self):
        forms = [
            ["011", "101", "110"],
            ["101", "011", "110"],
            ["110", "101", "011"],
            ["011", "110", "101"],
            ["110", "011", "101"],
            ["101", "110", "011"],
        ]
        classes = {canonical_class(SignPattern.from_strings(f)) for f in forms}
        assert len(classes) == 1

    def test_act_pattern_agrees_with_sign(self):
        A = mat([["1/2", "0", "1"], ["1/2", "1/3", "0"], ["0", "2/3", "0"]])
        for p in all_permutations(3):
            for q in all_permutations(3):
                assert act_pattern(p, sign(A), q) == sign(act(p, A, q))
