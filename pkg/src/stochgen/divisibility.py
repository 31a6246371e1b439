"""Divisibility of stochastic matrices.

A stochastic matrix is indivisible when every factorization ``A = B @ C`` into
stochastic matrices has exactly one permutation factor; otherwise it is
divisible. Permutations are divisible (``P = P @ I``).

The constructive tool is the division step: if sign-column ``i`` of ``A``
dominates sign-column ``k``, then ``A = B @ C`` with ``C`` an elementary matrix
(identity except column ``i``, which mixes ``e_i`` and ``e_k``) and ``B`` equal
to ``A`` outside column ``i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Optional, Sequence, Union

from .errors import DimMismatch, DimTooLarge, InternalInvariantViolation, PreconditionViolated
from .matrix import (
    ONE,
    ZERO,
    SignPattern,
    StochMatrix,
    canonical_class,
    is_permutation_matrix,
    popcount,
    sign,
    stochastic_patterns,
)

# -- the min-ratio function --------------------------------------------------


def epsilon(v: Sequence[Fraction], w: Sequence[Fraction]) -> Fraction:
    """Largest ``t`` with ``v - t w >= 0``, capped implicitly at 1 for simplex inputs.

    Computed as ``min v_j / w_j`` over the support of ``w``.
    """
    if len(v) != len(w):
        raise DimMismatch("vectors of different length")
    ratios = [Fraction(vj) / wj for vj, wj in zip(v, w) if wj > 0]
    if not ratios:
        raise PreconditionViolated("w has no positive entry")
    return min(ratios)


# -- division step -----------------------------------------------------------

EQUAL_COLUMNS = "equal_columns"
STRICT_REDUCTION = "strict_reduction"


@dataclass(frozen=True)
class DivisionStep:
    B: StochMatrix
    C: StochMatrix
    i: int
    k: int
    eps: Fraction
    case: Literal["equal_columns", "strict_reduction"]

    def to_json(self) -> dict:
        return {
            "type": "division_step",
            "case": self.case,
            "i": self.i,
            "k": self.k,
            "eps": str(self.eps),
            "B": self.B.rows_as_strings(),
            "C": self.C.rows_as_strings(),
        }


def column_dominates(P: SignPattern, i: int, k: int) -> bool:
    cols = P.column_masks()
    return cols[i] & cols[k] == cols[k]


def pattern_progress_pair(P: SignPattern) -> Optional[tuple[int, int]]:
    """Smallest ``(i, k)``, ``i != k``, with column ``i`` covering column ``k``
    and column ``i`` holding more than one set bit."""
    cols = P.column_masks()
    for i, ci in enumerate(cols):
        if popcount(ci) < 2:
            continue
        for k, ck in enumerate(cols):
            if k != i and ci & ck == ck:
                return i, k
    return None


def find_progress_pair(A: StochMatrix) -> Optional[tuple[int, int]]:
    """Lexicographically smallest pair admitting a zero-count-increasing division step."""
    return pattern_progress_pair(sign(A))


def elementary(n: int, i: int, k: int, a: Fraction) -> StochMatrix:
    """Identity with column ``i`` replaced by ``(1 - a) e_i + a e_k``."""
    rows = [[ONE if j == c else ZERO for c in range(n)] for j in range(n)]
    rows[i][i] = 1 - a
    rows[k][i] = a
    return StochMatrix(tuple(tuple(r) for r in rows))


def _replace_column(A: StochMatrix, i: int, col: Sequence[Fraction]) -> StochMatrix:
    return StochMatrix(
        tuple(tuple(col[j] if c == i else x for c, x in enumerate(row)) for j, row in enumerate(A.entries))
    )


def _split(A: StochMatrix, i: int, k: int, t: Fraction) -> DivisionStep:
    """Strict-reduction split with weight ``0 < t < 1``; needs ``t <= epsilon``."""
    vi, vk = A.column(i), A.column(k)
    new = [(a - t * b) / (1 - t) for a, b in zip(vi, vk)]
    return DivisionStep(_replace_column(A, i, new), elementary(A.n, i, k, t), i, k, t, STRICT_REDUCTION)


def division_step(A: StochMatrix, i: int, k: int) -> DivisionStep:
    """Factor ``A = B @ C`` along a dominating column pair.

    If columns ``i`` and ``k`` coincide, column ``i`` of ``B`` becomes ``e_i``
    (or ``e_k`` when ``e_i`` would turn ``B`` into a permutation) and ``C`` copies
    column ``k`` into column ``i``. Otherwise the largest admissible multiple of
    column ``k`` is peeled off column ``i``, creating at least one new zero.
    """
    n = A.n
    if i == k or not (0 <= i < n and 0 <= k < n):
        raise PreconditionViolated(f"invalid column pair ({i}, {k})")
    if not column_dominates(sign(A), i, k):
        raise PreconditionViolated(f"sign-column {i} does not dominate sign-column {k}")
    vi, vk = A.column(i), A.column(k)
    eps = epsilon(vi, vk)
    if eps == 1:
        basis_i = [ONE if j == i else ZERO for j in range(n)]
        B = _replace_column(A, i, basis_i)
        if is_permutation_matrix(B):
            B = _replace_column(A, i, [ONE if j == k else ZERO for j in range(n)])
        C = elementary(n, i, k, ONE)
        return DivisionStep(B, C, i, k, ONE, EQUAL_COLUMNS)
    return _split(A, i, k, eps)


@dataclass(frozen=True)
class RowDivisionStep:
    """``A = E @ B`` with ``E`` elementary acting on rows ``r`` and ``s``."""

    E: StochMatrix
    B: StochMatrix
    r: int
    s: int
    eps: Fraction

    def to_json(self) -> dict:
        return {
            "type": "row_division_step",
            "r": self.r,
            "s": self.s,
            "eps": str(self.eps),
            "E": self.E.rows_as_strings(),
            "B": self.B.rows_as_strings(),
        }


def row_progress_pairs(A: StochMatrix) -> list[tuple[int, int]]:
    """All ``(r, s)``, ``r != s``, with sign-row ``r`` covering the non-zero sign-row ``s``."""
    rows = sign(A).rows
    return [
        (r, s)
        for r, rr in enumerate(rows)
        for s, ss in enumerate(rows)
        if r != s and ss and rr & ss == ss
    ]


def row_division_step(A: StochMatrix, r: int, s: int) -> RowDivisionStep:
    """Peel the largest multiple ``t`` of row ``s`` off row ``r`` from the left.

    ``B`` has row ``r`` replaced by ``A_r - t A_s`` (at least one new zero) and
    row ``s`` scaled by ``1 + t``; ``E`` mixes column ``s`` of the identity with
    weight ``t / (1 + t)`` into row ``r``. Column sums are preserved, so ``B`` is
    stochastic.
    """
    n = A.n
    if r == s or not (0 <= r < n and 0 <= s < n):
        raise PreconditionViolated(f"invalid row pair ({r}, {s})")
    P = sign(A)
    if not P.rows[s] or P.rows[r] & P.rows[s] != P.rows[s]:
        raise PreconditionViolated(f"sign-row {r} does not dominate sign-row {s}")
    t = epsilon(A.entries[r], A.entries[s])
    rows = [list(row) for row in A.entries]
    rows[r] = [x - t * y for x, y in zip(A.entries[r], A.entries[s])]
    rows[s] = [y * (1 + t) for y in A.entries[s]]
    B = StochMatrix(tuple(tuple(row) for row in rows))
    return RowDivisionStep(elementary(n, s, r, t / (1 + t)), B, r, s, t)


def is_elementary_shape(C: StochMatrix) -> Optional[Fraction]:
    """Return ``a`` if ``C`` is permutation-equivalent to ``(1 a; 0 1-a)`` (+) identity
    with ``0 < a <= 1``, else ``None``.

    Structural test: apart from a single column with exactly two non-zeros, all
    columns are distinct standard basis vectors, and the mixed column is supported
    on the uncovered row plus one covered row (``a`` is the covered-row weight).
    For ``a = 1`` all columns are basis vectors with exactly one repetition.
    """
    n = C.n
    basis, mixed = [], []
    for col in C.columns():
        support = [j for j, x in enumerate(col) if x != 0]
        if len(support) == 1:
            basis.append(support[0])
        elif len(support) == 2:
            mixed.append((support, col))
        else:
            return None
    if not mixed:
        if len(set(basis)) == n - 1:
            return ONE
        return None
    if len(mixed) != 1 or len(set(basis)) != n - 1:
        return None
    (support, col), covered = mixed[0], set(basis)
    inside = [j for j in support if j in covered]
    if len(inside) != 1:
        return None
    return col[inside[0]]


# -- verdicts ----------------------------------------------------------------

S3_SIGN_CLASS = "s3_sign_class"
SIGN_BRUTE_FORCE = "sign_brute_force"


@dataclass(frozen=True)
class Verdict:
    kind: Literal["divisible", "indivisible", "unknown"]
    witness: Union[DivisionStep, tuple[StochMatrix, StochMatrix], None] = None
    certificate: Optional[str] = None

    def factors(self) -> Optional[tuple[StochMatrix, StochMatrix]]:
        if isinstance(self.witness, DivisionStep):
            return self.witness.B, self.witness.C
        return self.witness

    def check(self, A: StochMatrix) -> bool:
        """Re-verify the verdict against ``A`` from scratch."""
        if self.kind == "divisible":
            B, C = self.factors()
            # both factors units (A a permutation) or neither
            return (B @ C) == A and is_permutation_matrix(B) == is_permutation_matrix(C)
        if self.kind == "indivisible":
            if self.certificate == S3_SIGN_CLASS:
                return is_prime_s3(A)
            return sign_indivisible(sign(A)) == CERTIFIED
        return True

    def to_json(self) -> dict:
        out: dict = {"verdict": self.kind}
        if isinstance(self.witness, DivisionStep):
            out["witness"] = self.witness.to_json()
        elif self.witness is not None:
            B, C = self.witness
            out["witness"] = {"type": "factor_pair", "B": B.rows_as_strings(), "C": C.rows_as_strings()}
        if self.certificate:
            out["certificate"] = self.certificate
        return out


# -- sign-level analysis -----------------------------------------------------

PRIME_PATTERN_S3 = SignPattern.from_strings(["011", "101", "110"])

CERTIFIED = "certified_indivisible"
INCONCLUSIVE = "inconclusive"


def is_prime_s3(A: StochMatrix) -> bool:
    if A.n != 3:
        raise DimMismatch("is_prime_s3 needs a 3x3 matrix")
    return canonical_class(sign(A)) == canonical_class(PRIME_PATTERN_S3)


@lru_cache(maxsize=None)
def _subset_unions(n: int, Q_cols: tuple[int, ...]) -> dict:
    """For every non-empty column subset of ``Q``, the OR of those columns."""
    out: dict = {}
    for S in range(1, 1 << n):
        acc = 0
        for m in range(n):
            if S >> (n - 1 - m) & 1:
                acc |= Q_cols[m]
        out.setdefault(acc, []).append(S)
    return out


def sign_indivisible(P: SignPattern) -> str:
    """Decide whether every pattern factorization of ``P`` has exactly one
    permutation factor.

    Exhausts all left factors ``Q`` among the ``(2^n - 1)^n`` stochastic-compatible
    patterns. For each ``Q`` the admissible right factors are solved column by
    column (column ``k`` of ``Q R`` is the union of the ``Q``-columns selected by
    column ``k`` of ``R``), which enumerates exactly the pairs with ``Q R = P``
    without forming all ``|patterns|^2`` products. Stops at the first violating
    pair. ``n = 4`` takes a few seconds.

    ``inconclusive`` never implies divisible for ``n >= 4``.
    """
    n = P.dim
    if n >= 5:
        raise DimTooLarge(f"sign brute force supports n <= 4, got {n}")
    targets = P.column_masks()
    p_is_perm = P.is_permutation()
    for Q in stochastic_patterns(n):
        unions = _subset_unions(n, Q.column_masks())
        choices = [unions.get(t) for t in targets]
        if not all(choices):
            continue
        if Q.is_permutation():
            # R = Q^-1 P is unique, and a permutation iff P is one
            if p_is_perm:
                return INCONCLUSIVE
            continue
        total = 1
        for c in choices:
            total *= len(c)
        singles = [[s for s in c if popcount(s) == 1] for c in choices]
        perm_rs = sum(
            1 for combo in itertools.product(*singles) if len(set(combo)) == n
        ) if all(singles) else 0
        if total > perm_rs:
            return INCONCLUSIVE
    return CERTIFIED


def sign_indivisible_pairs(P: SignPattern) -> str:
    """Literal all-pairs variant of :func:`sign_indivisible`, feasible for ``n <= 3``."""
    pats = stochastic_patterns(P.dim)
    for Q in pats:
        for R in pats:
            if Q @ R == P and Q.is_permutation() == R.is_permutation():
                return INCONCLUSIVE
    return CERTIFIED


def class_census(n: int) -> dict:
    """Orbit sizes of all stochastic-compatible patterns under row/column permutations."""
    if n > 4:
        raise DimTooLarge(f"census supports n <= 4, got {n}")
    counts: dict = {}
    for P in stochastic_patterns(n):
        c = canonical_class(P)
        counts[c] = counts.get(c, 0) + 1
    return dict(sorted(counts.items()))


# The five base-case classes for n = 3, with descriptive labels.
RESIDUAL_LABELS = {
    "permutation": ["100", "010", "001"],
    "prime": ["011", "101", "110"],
    "constant": ["000", "000", "111"],
    "collapse_mixed": ["001", "001", "110"],
    "collapse": ["000", "001", "110"],
}
RESIDUAL_CLASSES_S3 = {
    canonical_class(SignPattern.from_strings(rows)): label for label, rows in RESIDUAL_LABELS.items()
}


def residual_classes(n: int = 3) -> list[SignPattern]:
    """Canonical classes of stochastic-compatible patterns with no progress pair."""
    if n != 3:
        raise DimMismatch("residual classes are only defined for n = 3")
    found = {canonical_class(P) for P in stochastic_patterns(n) if pattern_progress_pair(P) is None}
    return sorted(found)


def residual_label(P: SignPattern) -> Optional[str]:
    return RESIDUAL_CLASSES_S3.get(canonical_class(P))


# -- witness search beyond the sign criterion --------------------------------


def _solve(B: Sequence[Sequence[Fraction]], A: Sequence[Sequence[Fraction]]):
    """Exact ``B^{-1} A`` by Gauss-Jordan elimination; ``None`` if singular."""
    n = len(B)
    M = [list(B[j]) + list(A[j]) for j in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        p = M[c][c]
        M[c] = [x / p for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def hull_candidates(A: StochMatrix) -> list[tuple[Fraction, ...]]:
    """Candidate columns for a left factor: basis vectors, then every column of
    ``A`` restricted to a proper sub-support of size >= 2 and renormalized, then
    the columns of ``A`` themselves."""
    n = A.n
    pool: list[tuple[Fraction, ...]] = [tuple(ONE if j == r else ZERO for j in range(n)) for r in range(n)]
    for col in A.columns():
        support = [j for j, x in enumerate(col) if x > 0]
        for size in range(2, len(support)):
            for sub in itertools.combinations(support, size):
                mass = sum(col[j] for j in sub)
                pool.append(tuple(col[j] / mass if j in sub else ZERO for j in range(n)))
    pool.extend(A.columns())
    return list(dict.fromkeys(pool))


def hull_witness(A: StochMatrix, limit: int = 50_000) -> Optional[tuple[StochMatrix, StochMatrix]]:
    """Search for ``A = B @ C`` with neither factor a permutation, where the
    columns of ``B`` come from :func:`hull_candidates`.

    ``C`` is forced to ``B^{-1} A`` and accepted only if non-negative. A miss
    proves nothing.
    """
    n = A.n
    A_rows = A.entries
    for tried, cols in enumerate(itertools.combinations(hull_candidates(A), n)):
        if tried >= limit:
            break
        B_rows = tuple(tuple(cols[c][j] for c in range(n)) for j in range(n))
        B = StochMatrix(B_rows)
        if is_permutation_matrix(B):
            continue
        sol = _solve(B_rows, A_rows)
        if sol is None or any(x < 0 for row in sol for x in row):
            continue
        C = StochMatrix(tuple(tuple(r) for r in sol))
        if is_permutation_matrix(C) or B @ C != A:
            continue
        return B, C
    return None


# -- classification ----------------------------------------------------------


def _any_dominating_pair(P: SignPattern) -> Optional[tuple[int, int]]:
    cols = P.column_masks()
    for i, ci in enumerate(cols):
        for k, ck in enumerate(cols):
            if i != k and ci & ck == ck:
                return i, k
    return None


def nontrivial_step(A: StochMatrix, i: int, k: int) -> DivisionStep:
    """A division step whose factors are both non-permutations.

    Equal to :func:`division_step` except when the strict reduction turns ``B``
    into a permutation (``A`` is then a permutation times an elementary matrix);
    in that case only half the admissible multiple is peeled off.
    """
    step = division_step(A, i, k)
    if step.case == STRICT_REDUCTION and is_permutation_matrix(step.B):
        step = _split(A, i, k, step.eps / 2)
    return step


def classify(A: StochMatrix) -> Verdict:
    """Divisible with a witness, indivisible with a certificate, or unknown.

    Never unknown for ``n <= 3``.
    """
    n = A.n
    if is_permutation_matrix(A):
        return Verdict("divisible", (A, StochMatrix.identity(n)))
    P = sign(A)
    pair = _any_dominating_pair(P)
    if pair is not None:
        return Verdict("divisible", nontrivial_step(A, *pair))
    if n == 3:
        if not is_prime_s3(A):
            raise InternalInvariantViolation("3x3 matrix without dominating columns outside the prime class")
        return Verdict("indivisible", certificate=S3_SIGN_CLASS)
    found = hull_witness(A)
    if found is not None:
        return Verdict("divisible", found)
    if n <= 4 and sign_indivisible(P) == CERTIFIED:
        return Verdict("indivisible", certificate=SIGN_BRUTE_FORCE)
    return Verdict("unknown")
