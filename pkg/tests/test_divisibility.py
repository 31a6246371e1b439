import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from stochgen.divisibility import (
    CERTIFIED,
    EQUAL_COLUMNS,
    INCONCLUSIVE,
    PRIME_PATTERN_S3,
    RESIDUAL_LABELS,
    S3_SIGN_CLASS,
    STRICT_REDUCTION,
    class_census,
    classify,
    column_dominates,
    division_step,
    elementary,
    epsilon,
    find_progress_pair,
    hull_witness,
    is_elementary_shape,
    is_prime_s3,
    pattern_progress_pair,
    residual_classes,
    residual_label,
    row_division_step,
    row_progress_pairs,
    sign_indivisible,
    sign_indivisible_pairs,
)
from stochgen.errors import DimMismatch, DimTooLarge, PreconditionViolated
from stochgen.experiments import sample_stochastic
from stochgen.matrix import (
    Permutation,
    SignPattern,
    StochMatrix,
    act,
    all_permutations,
    canonical_class,
    is_permutation_matrix,
    sign,
    stochastic_patterns,
    zero_count,
)

from conftest import mat, stochastic_matrices

THIRD = [["1/3"] * 3] * 3
PRIME = [["0", "1/2", "1/2"], ["1/2", "0", "1/2"], ["1/2", "1/2", "0"]]
CIRCULANT_SEVENTHS = [[F(x, 7) for x in r] for r in [[0, 1, 1, 5], [5, 0, 1, 1], [1, 5, 0, 1], [1, 1, 5, 0]]]
h, t, q = F(1, 2), F(1, 3), F(1, 4)
SPLIT4 = [[0, h, h, h], [t, 0, q, q], [t, q, 0, q], [t, q, q, 0]]
SPLIT4_B = [[1, 0, 0, 0], [0, 0, h, h], [0, h, 0, h], [0, h, h, 0]]
SPLIT4_C = [[0, h, h, h], [t, h, 0, 0], [t, 0, h, 0], [t, 0, 0, h]]


def elementary_by_search(C: StochMatrix):
    """Oracle: try every permutation pair and every candidate ``a`` around the
    canonical 2-block shape."""
    n = C.n
    candidates = {x for row in C.entries for x in row if 0 < x < 1} or {F(1)}
    for a in sorted(candidates):
        base = [[F(int(j == k)) for k in range(n)] for j in range(n)]
        base[0][1], base[1][1] = a, 1 - a
        K = StochMatrix(tuple(tuple(r) for r in base))
        for p in all_permutations(n):
            for r in all_permutations(n):
                if act(p, K, r) == C:
                    return a
    return None


class TestEpsilon:
    def test_equal(self):
        assert epsilon([h, h], [h, h]) == 1

    def test_min_ratio(self):
        assert epsilon([h, q, q], [0, h, h]) == h

    def test_disjoint(self):
        assert epsilon([1, 0], [0, 1]) == 0

    def test_no_support(self):
        with pytest.raises(PreconditionViolated):
            epsilon([1, 0], [0, 0])


class TestProgressPair:
    def test_all_thirds(self):
        assert find_progress_pair(mat(THIRD)) == (0, 1)

    def test_prime_has_none(self):
        assert find_progress_pair(mat(PRIME)) is None

    def test_identity_has_none(self):
        assert find_progress_pair(StochMatrix.identity(3)) is None

    def test_basis_column_never_chosen(self):
        # column 0 = e_0 dominates nothing useful; column 1 dominates column 0
        A = mat([["1", "1/2", "0"], ["0", "1/2", "0"], ["0", "0", "1"]])
        assert find_progress_pair(A) == (1, 0)


class TestDivisionStep:
    def test_equal_columns_2x2(self):
        step = division_step(mat([[h, h], [h, h]]), 0, 1)
        assert step.case == EQUAL_COLUMNS
        assert step.B == mat([["1", "1/2"], ["0", "1/2"]])
        assert step.C == mat([["0", "0"], ["1", "1"]])
        assert step.B @ step.C == mat([[h, h], [h, h]])

    def test_equal_columns_thirds(self):
        A = mat(THIRD)
        step = division_step(A, 0, 1)
        assert step.case == EQUAL_COLUMNS
        assert step.C == elementary(3, 0, 1, F(1))
        assert step.B @ step.C == A

    def test_equal_columns_falls_back_to_e_k(self):
        # e_0 in column 0 would give the identity
        A = mat([["0", "0"], ["1", "1"]])
        step = division_step(A, 0, 1)
        assert not is_permutation_matrix(step.B)
        assert step.B @ step.C == A

    def test_strict_reduction_formulas(self):
        A = mat([["1/2", "0", "0"], ["1/4", "1/2", "0"], ["1/4", "1/2", "1"]])
        step = division_step(A, 0, 1)
        assert step.case == STRICT_REDUCTION and step.eps == h
        assert step.B.column(0) == (F(1), F(0), F(0))
        assert step.C == elementary(3, 0, 1, h)
        assert step.B @ step.C == A
        assert zero_count(step.B) > zero_count(A)

    def test_permutation_times_elementary(self):
        # maximal reduction lands exactly on the permutation; progress wins over non-triviality
        A = mat([["49/60", "1"], ["11/60", "0"]])
        step = division_step(A, 0, 1)
        assert is_permutation_matrix(step.B)
        assert zero_count(step.B) > zero_count(A) and step.B @ step.C == A

    def test_b_differs_only_in_column_i(self, random_matrices):
        for A in random_matrices(4, 50, seed=3):
            pair = find_progress_pair(A)
            if pair is None:
                continue
            step = division_step(A, *pair)
            i = pair[0]
            for k in range(4):
                if k != i:
                    assert step.B.column(k) == A.column(k)

    def test_precondition(self):
        with pytest.raises(PreconditionViolated):
            division_step(mat(PRIME), 0, 1)
        with pytest.raises(PreconditionViolated):
            division_step(mat(THIRD), 1, 1)

    def test_positive_column_always_divides(self, random_matrices):
        for A in random_matrices(3, 100, seed=5):
            for i in range(3):
                if all(x > 0 for x in A.column(i)):
                    for k in range(3):
                        if k != i:
                            step = division_step(A, i, k)
                            assert step.B @ step.C == A

    def test_elementary_shape_matches_search(self, random_matrices):
        # structural check vs. brute force over permutation pairs
        for A in random_matrices(3, 150, seed=9):
            pair = find_progress_pair(A)
            if pair is None:
                continue
            C = division_step(A, *pair).C
            assert is_elementary_shape(C) == elementary_by_search(C)

    def test_shape_rejects_non_elementary(self):
        assert is_elementary_shape(mat(THIRD)) is None
        assert is_elementary_shape(StochMatrix.identity(3)) is None

    @settings(max_examples=80)
    @given(stochastic_matrices())
    def test_reconstruction_property(self, A):
        for i, k in itertools.permutations(range(A.n), 2):
            if column_dominates(sign(A), i, k):
                step = division_step(A, i, k)
                assert step.B @ step.C == A
                assert is_elementary_shape(step.C) is not None


class TestRowDivision:
    def test_row_step_reconstructs(self, random_matrices):
        for A in random_matrices(3, 60, seed=11):
            for r, s in row_progress_pairs(A):
                step = row_division_step(A, r, s)
                assert step.E @ step.B == A
                assert zero_count(step.B) > zero_count(A) or step.eps == 0


class TestPrimeS3:
    SIX = [
        ["011", "101", "110"],
        ["011", "110", "101"],
        ["101", "011", "110"],
        ["101", "110", "011"],
        ["110", "011", "101"],
        ["110", "101", "011"],
    ]

    def test_example(self):
        assert is_prime_s3(mat(PRIME))

    def test_identity(self):
        assert not is_prime_s3(StochMatrix.identity(3))

    def test_wrong_dim(self):
        with pytest.raises(DimMismatch):
            is_prime_s3(StochMatrix.identity(2))

    @pytest.mark.parametrize("rows", SIX)
    def test_six_forms_classify_indivisible(self, rows):
        rng = random.Random(rows[0] + rows[1])
        grid = [[0] * 3 for _ in range(3)]
        for k in range(3):
            support = [j for j in range(3) if rows[j][k] == "1"]
            w = F(rng.randint(1, 9), 10)
            grid[support[0]][k], grid[support[1]][k] = w, 1 - w
        A = mat(grid)
        assert is_prime_s3(A)
        v = classify(A)
        assert v.kind == "indivisible" and v.certificate == S3_SIGN_CLASS
        assert v.check(A)


class TestSignIndivisible:
    def test_prime_certified(self):
        assert sign_indivisible(PRIME_PATTERN_S3) == CERTIFIED

    def test_permutation_inconclusive(self):
        assert sign_indivisible(SignPattern.identity(3)) == INCONCLUSIVE

    def test_circulant_pattern_inconclusive(self):
        P = SignPattern.from_strings(["0111", "1011", "1101", "1110"])
        assert sign_indivisible(P) == INCONCLUSIVE

    def test_too_large(self):
        with pytest.raises(DimTooLarge):
            sign_indivisible(SignPattern.identity(5))

    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_all_pairs_oracle(self, n):
        for P in class_census(n):
            assert sign_indivisible(P) == sign_indivisible_pairs(P)

    def test_unique_certified_class_n3(self):
        certified = [P for P in class_census(3) if sign_indivisible(P) == CERTIFIED]
        assert certified == [canonical_class(PRIME_PATTERN_S3)]

    def test_no_certified_class_n2(self):
        assert all(sign_indivisible(P) == INCONCLUSIVE for P in class_census(2))


class TestCensus:
    @pytest.mark.parametrize("n,total", [(2, 9), (3, 343)])
    def test_totals(self, n, total):
        assert sum(class_census(n).values()) == total

    def test_all_true_singleton(self):
        census = class_census(3)
        assert census[SignPattern.from_strings(["111"] * 3)] == 1

    def test_too_large(self):
        with pytest.raises(DimTooLarge):
            class_census(5)


class TestResidual:
    def test_five_classes(self):
        found = residual_classes(3)
        expected = sorted(canonical_class(SignPattern.from_strings(r)) for r in RESIDUAL_LABELS.values())
        assert found == expected

    def test_labels(self):
        assert residual_label(SignPattern.identity(3)) == "permutation"
        assert residual_label(PRIME_PATTERN_S3) == "prime"

    def test_dichotomy(self):
        for P in stochastic_patterns(3):
            assert (pattern_progress_pair(P) is None) == (residual_label(P) is not None)

    def test_only_n3(self):
        with pytest.raises(DimMismatch):
            residual_classes(4)


class TestClassify:
    def test_never_unknown_small(self, random_matrices):
        for n in (2, 3):
            for A in random_matrices(n, 200, seed=n):
                v = classify(A)
                assert v.kind != "unknown"
                assert v.check(A)

    def test_permutation(self):
        P = Permutation((1, 2, 0)).to_matrix()
        v = classify(P)
        assert v.kind == "divisible" and v.check(P)

    def test_2x2_step_with_permutation_b(self):
        # the plain step would give B = I here
        A = mat([["1/2", "0"], ["1/2", "1"]])
        v = classify(A)
        B, C = v.factors()
        assert B @ C == A
        assert not is_permutation_matrix(B) and not is_permutation_matrix(C)

    def test_circulant_unknown(self):
        assert classify(mat(CIRCULANT_SEVENTHS)).kind == "unknown"

    def test_split4_divisible(self):
        A = mat(SPLIT4)
        v = classify(A)
        assert v.kind == "divisible" and v.check(A)
        B, C = v.factors()
        assert not is_permutation_matrix(B) and not is_permutation_matrix(C)

    def test_split4_published_factors(self):
        assert mat(SPLIT4_B) @ mat(SPLIT4_C) == mat(SPLIT4)

    def test_hull_witness_miss_on_circulant(self):
        assert hull_witness(mat(CIRCULANT_SEVENTHS)) is None

    def test_json(self):
        doc = classify(mat(THIRD)).to_json()
        assert doc["verdict"] == "divisible" and doc["witness"]["type"] == "division_step"

    def test_sampler_feeds_classify(self):
        A = sample_stochastic(4, 60, seed=1)
        assert classify(A).kind in {"divisible", "unknown", "indivisible"}
