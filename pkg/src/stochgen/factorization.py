"""Factorization of 2x2 and 3x3 stochastic matrices into fixed generating sets.

For n = 2 the generators are the swap and the segment ``E(t) = (1 t; 0 1-t)``,
``t in [0, 1]``; at most four factors are ever needed.

For n = 3 the generators are the transposition ``(1 2)`` and the convex family
``K(a, b, c) = (a 0 1-c; 1-a b 0; 0 1-b c)`` with ``1 >= a >= b >= c >= 0``,
whose corners are the identity, two idempotent-like matrices and the 3-cycle
``(1 3 2)``. At most twenty factors are ever needed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .divisibility import (
    RESIDUAL_CLASSES_S3,
    division_step,
    find_progress_pair,
    row_division_step,
    row_progress_pairs,
)
from .errors import (
    DimMismatch,
    InternalInvariantViolation,
    NotABaseCase,
    NotGenerated,
    ParameterOrderViolated,
)
from .matrix import (
    ONE,
    ZERO,
    Permutation,
    StochMatrix,
    act,
    all_permutations,
    canonical_class,
    grid_matmul,
    grid_sub,
    induced_one_norm,
    multiply,
    popcount,
    sign,
    validate_stochastic,
)

# -- atoms -------------------------------------------------------------------


@dataclass(frozen=True)
class SwapS2:
    def materialize(self) -> StochMatrix:
        return validate_stochastic([[0, 1], [1, 0]])

    def to_json(self) -> dict:
        return {"type": "swap"}


@dataclass(frozen=True)
class ElemS2:
    t: Fraction

    def __post_init__(self):
        if not 0 <= self.t <= 1:
            raise ValueError(f"ElemS2 parameter {self.t} outside [0, 1]")

    def materialize(self) -> StochMatrix:
        return StochMatrix(((ONE, self.t), (ZERO, 1 - self.t)))

    def to_json(self) -> dict:
        return {"type": "elem", "t": str(self.t)}


TRANSPOSITION_12 = Permutation((1, 0, 2))
CYCLE_132 = Permutation((2, 0, 1))
IDENTITY_3 = Permutation.identity(3)


@dataclass(frozen=True)
class PermS3:
    perm: Permutation

    def __post_init__(self):
        if self.perm not in (IDENTITY_3, TRANSPOSITION_12, CYCLE_132):
            raise ValueError(f"{self.perm.cycles()} is not a generator permutation")

    def materialize(self) -> StochMatrix:
        return self.perm.to_matrix()

    def to_json(self) -> dict:
        return {"type": "perm", "cycles": self.perm.cycles()}


@dataclass(frozen=True)
class ConvexS3:
    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        if not 1 >= self.a >= self.b >= self.c >= 0:
            raise ParameterOrderViolated(f"need 1 >= a >= b >= c >= 0, got {self.a}, {self.b}, {self.c}")

    def materialize(self) -> StochMatrix:
        a, b, c = self.a, self.b, self.c
        return StochMatrix(((a, ZERO, 1 - c), (1 - a, b, ZERO), (ZERO, 1 - b, c)))

    def to_json(self) -> dict:
        return {"type": "convex", "a": str(self.a), "b": str(self.b), "c": str(self.c)}


Atom = Union[SwapS2, ElemS2, PermS3, ConvexS3]


@dataclass(frozen=True)
class FactorList:
    atoms: tuple
    dim: int

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __add__(self, other: "FactorList") -> "FactorList":
        if self.dim != other.dim:
            raise DimMismatch("factor lists of different dimension")
        return FactorList(self.atoms + other.atoms, self.dim)

    def matrices(self) -> list[StochMatrix]:
        return [a.materialize() for a in self.atoms]

    def product(self) -> StochMatrix:
        return multiply(self.matrices(), self.dim)

    def to_json(self) -> list[dict]:
        return [a.to_json() for a in self.atoms]


def verify(A: StochMatrix, f: FactorList) -> bool:
    if A.n != f.dim:
        raise DimMismatch(f"matrix is {A.n}x{A.n}, factor list has dim {f.dim}")
    return f.product() == A


# -- n = 2 -------------------------------------------------------------------


def decompose_s2(A: StochMatrix) -> FactorList:
    """Write ``A = (1-a b; a 1-b)`` as at most four generators.

    ``a = 0``: ``E(b)``. ``a = 1``: ``S E(1-b)``. ``a + b <= 1``:
    ``S E(a) S E(b/(1-a))``. ``a + b > 1``: ``E(1-a) S E((1-b)/a)``.
    """
    if A.n != 2:
        raise DimMismatch("decompose_s2 needs a 2x2 matrix")
    a, b = A[1, 0], A[0, 1]
    S = SwapS2()
    if a == 0:
        atoms = (ElemS2(b),)
    elif a == 1:
        atoms = (S, ElemS2(1 - b))
    elif a + b <= 1:
        atoms = (S, ElemS2(a), S, ElemS2(b / (1 - a)))
    else:
        atoms = (ElemS2(1 - a), S, ElemS2((1 - b) / a))
    out = FactorList(atoms, 2)
    if len(out) > 4 or not verify(A, out):
        raise InternalInvariantViolation(f"bad s(2) decomposition of {A.entries}")
    return out


def _s2_short_word(A: StochMatrix) -> Optional[FactorList]:
    """A word of at most three generators for ``A``, or ``None``.

    Since ``S S = I`` and ``E(s) E(t) = E(t + s(1-t))``, every word of length
    <= 3 reduces to one of ``E, S, S E, E S, E S E, S E S``; each shape is
    solved for its parameters exactly.
    """
    S = SwapS2()
    a00, a01, a10, a11 = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    candidates = []
    if a10 == 0:
        candidates.append((ElemS2(a01),))
    if a00 == 0:
        # S E(t) = (0 1-t; 1 t)
        candidates.append((S, ElemS2(a11)))
    if a01 == 1:
        # E(t) S = (t 1; 1-t 0)
        candidates.append((ElemS2(a00), S))
    if a01 == 0:
        # S E(s) S = (1-s 0; s 1)
        candidates.append((S, ElemS2(a10), S))
    # E(s) S E(t) = (s, 1-t+st; 1-s, (1-s)t)
    s = a00
    if s < 1:
        t = a11 / (1 - s)
        if t <= 1:
            candidates.append((ElemS2(s), S, ElemS2(t)))
    elif a11 == 0:
        candidates.append((ElemS2(s), S, ElemS2(ZERO)))
    for atoms in candidates:
        f = FactorList(atoms, 2)
        if verify(A, f):
            return f
    return None


def certify_s2_witness(A: StochMatrix) -> bool:
    """True iff ``A`` is not a product of three or fewer generators."""
    if A.n != 2:
        raise DimMismatch("certify_s2_witness needs a 2x2 matrix")
    return _s2_short_word(A) is None


# -- n = 3: permutations -----------------------------------------------------

_T = PermS3(TRANSPOSITION_12)
_Z = PermS3(CYCLE_132)

PERM_WORDS_S3: dict = {
    IDENTITY_3: (),
    TRANSPOSITION_12: (_T,),
    CYCLE_132: (_Z,),
    Permutation.from_cycles(3, "(2 3)"): (_T, _Z),
    Permutation.from_cycles(3, "(1 2 3)"): (_Z, _Z),
    Permutation.from_cycles(3, "(1 3)"): (_Z, _T),
}


def perm_table_s3(pi: Permutation) -> FactorList:
    """Word of length <= 2 over ``{(1 2), (1 3 2)}`` whose product is ``pi``'s matrix."""
    if pi.n != 3:
        raise DimMismatch("perm_table_s3 needs a permutation of 3 points")
    return FactorList(PERM_WORDS_S3[pi], 3)


# -- n = 3: the convex family ------------------------------------------------


def convex_weights(a, b, c) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Weights of ``K(a, b, c)`` on the corners ``I, K(1,1,0), K(1,0,0), K(0,0,0)``."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if not 1 >= a >= b >= c >= 0:
        raise ParameterOrderViolated(f"need 1 >= a >= b >= c >= 0, got {a}, {b}, {c}")
    return c, b - c, a - b, 1 - a


def _convex_params(K: StochMatrix) -> Optional[tuple[Fraction, Fraction, Fraction]]:
    if K[0, 1] != 0 or K[1, 2] != 0 or K[2, 0] != 0:
        return None
    a, b, c = K[0, 0], K[1, 1], K[2, 2]
    if 1 >= a >= b >= c >= 0:
        return a, b, c
    return None


def convex_membership_s3(A: StochMatrix):
    """First ``(pi, tau, a, b, c)`` with ``act(pi, A, tau) == K(a, b, c)``.

    The 36 pairs are scanned in lexicographic order of their images.
    """
    if A.n != 3:
        raise DimMismatch("convex_membership_s3 needs a 3x3 matrix")
    for pi in all_permutations(3):
        for tau in all_permutations(3):
            params = _convex_params(act(pi, A, tau))
            if params is not None:
                return (pi, tau) + params
    return None


def _convex_sandwich(A: StochMatrix) -> Optional[FactorList]:
    found = convex_membership_s3(A)
    if found is None:
        return None
    pi, tau, a, b, c = found
    # act(pi, A, tau) = K  =>  A = P(pi^-1) K P(tau^-1)
    return (
        perm_table_s3(pi.inverse())
        + FactorList((ConvexS3(a, b, c),), 3)
        + perm_table_s3(tau.inverse())
    )


# K(1, 0, 0) = (1 0 1; 0 0 0; 0 1 0) with rows 1 and 3 swapped gives the
# matrix M = (0 1 0; 0 0 0; 1 0 1), and M @ M = e_3 1^T.
_M_WORD = perm_table_s3(Permutation.from_cycles(3, "(1 3)")) + FactorList(
    (ConvexS3(ONE, ZERO, ZERO),), 3
)


def decompose_base_case(A: StochMatrix) -> FactorList:
    """Factor a matrix whose sign class admits no progress pair.

    Permutations use the table (<= 2 atoms); the constant map ``e_r 1^T`` is a
    permuted square of ``M`` (<= 6 atoms); every other residual class is a
    permutation sandwich around a single convex atom (<= 5 atoms).
    """
    if A.n != 3:
        raise DimMismatch("decompose_base_case needs a 3x3 matrix")
    label = RESIDUAL_CLASSES_S3.get(canonical_class(sign(A)))
    if label is None:
        raise NotABaseCase(f"sign class of {A.entries} admits a progress pair")
    if label == "permutation":
        out = perm_table_s3(Permutation.from_matrix(A))
    elif label == "constant":
        # A = e_r 1^T = P(pi) e_3 1^T with pi(r) = 2, then merge P(pi) into the leading (1 3)
        r = next(j for j in range(3) if A[j, 0] == 1)
        pi = Permutation(tuple(2 if j == r else (r if j == 2 else j) for j in range(3)))
        lead = Permutation.from_cycles(3, "(1 3)") * pi
        out = perm_table_s3(lead) + FactorList(_M_WORD.atoms[-1:], 3) + _M_WORD
    else:
        out = _convex_sandwich(A)
        if out is None:
            raise InternalInvariantViolation(f"no convex sandwich for {label} class matrix")
    if not verify(A, out):
        raise InternalInvariantViolation("base case does not reconstruct")
    return out


# -- n = 3: full decomposition -----------------------------------------------


def _elementary_embedding(C: StochMatrix, a: Fraction) -> tuple[Permutation, Permutation]:
    """Permutations with ``C = P(p) K(1, 1, 1-a) P(q)``."""
    K = ConvexS3(ONE, ONE, 1 - a).materialize()
    for p in all_permutations(3):
        for q in all_permutations(3):
            if act(p, K, q) == C:
                return p, q
    raise InternalInvariantViolation(f"elementary factor {C.entries} not embeddable")


def _elementary_items(C: StochMatrix, a: Fraction) -> list:
    p, q = _elementary_embedding(C, a)
    return [p, ConvexS3(ONE, ONE, 1 - a), q]


def _assemble(items: Sequence) -> FactorList:
    """Merge runs of permutations into one, then expand each through the table."""
    merged: list = []
    for it in items:
        if isinstance(it, PermS3):
            it = it.perm
        if isinstance(it, Permutation) and merged and isinstance(merged[-1], Permutation):
            # P(u) P(v) = P(v o u)
            merged[-1] = it * merged[-1]
        else:
            merged.append(it)
    atoms: list = []
    for it in merged:
        atoms.extend(PERM_WORDS_S3[it] if isinstance(it, Permutation) else (it,))
    return FactorList(tuple(atoms), 3)


@dataclass(frozen=True)
class S3Decomposition:
    factors: FactorList
    column_steps: int
    row_steps: int
    base_label: str

    @property
    def steps(self) -> int:
        return self.column_steps + self.row_steps


MAX_FACTORS_S3 = 20


def _search(A: StochMatrix, left: list, right: list, budget: int, greedy_only: bool):
    """Depth-first search over division steps; the first branch at every node is
    the lexicographically smallest column step, so the first leaf tried is the
    plain greedy column-division path."""
    if len(_assemble(left + right)) > budget:
        return None
    pair = find_progress_pair(A)
    if pair is None:
        label = RESIDUAL_CLASSES_S3[canonical_class(sign(A))]
        if label != "prime" or convex_membership_s3(A) is not None:
            items = left + list(decompose_base_case(A)) + right
            out = _assemble(items)
            if len(out) <= budget:
                # every elementary contributes three items
                return out, label, len(right) // 3, len(left) // 3
    if greedy_only and pair is not None:
        step = division_step(A, *pair)
        return _search(step.B, left, _elementary_items(step.C, step.eps) + right, budget, True)
    if greedy_only:
        return None
    for i, k in _all_progress_pairs(A):
        step = division_step(A, i, k)
        found = _search(step.B, left, _elementary_items(step.C, step.eps) + right, budget, False)
        if found:
            return found
    for r, s in row_progress_pairs(A):
        step = row_division_step(A, r, s)
        a = step.E[r, s]
        found = _search(step.B, left + _elementary_items(step.E, a), right, budget, False)
        if found:
            return found
    return None


def _all_progress_pairs(A: StochMatrix) -> list[tuple[int, int]]:
    cols = sign(A).column_masks()
    return [
        (i, k)
        for i, ci in enumerate(cols)
        if popcount(ci) > 1
        for k, ck in enumerate(cols)
        if k != i and ci & ck == ck
    ]


def decompose_s3_detailed(A: StochMatrix) -> S3Decomposition:
    """Like :func:`decompose_s3` but also reports how many column and row
    division steps were used and which residual class the base case hit."""
    if A.n != 3:
        raise DimMismatch("decompose_s3 needs a 3x3 matrix")
    label = RESIDUAL_CLASSES_S3.get(canonical_class(sign(A)))
    if label == "prime" and convex_membership_s3(A) is None:
        raise NotGenerated(
            "indivisible matrix whose convex parameters are cyclically ascending; "
            "no permuted copy lies in the convex family"
        )
    found = _search(A, [], [], MAX_FACTORS_S3, greedy_only=True) or _search(
        A, [], [], MAX_FACTORS_S3, greedy_only=False
    )
    if found is None:
        raise NotGenerated(f"no division path within {MAX_FACTORS_S3} factors")
    out, label, column_steps, row_steps = found
    if len(out) > MAX_FACTORS_S3:
        raise InternalInvariantViolation(f"decomposition has {len(out)} > {MAX_FACTORS_S3} factors")
    if not verify(A, out):
        raise InternalInvariantViolation("decomposition does not reconstruct")
    return S3Decomposition(out, column_steps, row_steps, label)


def decompose_s3(A: StochMatrix) -> FactorList:
    """Write a 3x3 stochastic matrix as at most 20 generators.

    Column division steps are applied greedily (smallest progress pair first);
    each elementary factor becomes ``P K(1, 1, 1-a) Q`` and neighbouring
    permutations are merged, so every step costs at most three atoms. The
    remainder lands in one of the five residual sign classes.

    When the greedy path ends in a prime whose parameters cannot be ordered
    ``a >= b >= c`` under any permutation, the remaining column steps and
    row division steps (``A = E @ B``) are searched depth-first for a path that
    avoids it. Raises :class:`NotGenerated` for matrices outside the generated
    semigroup, such as those ascending primes themselves.
    """
    return decompose_s3_detailed(A).factors


# -- perturbation bench ------------------------------------------------------


def perturb_column(col: Sequence[Fraction], eps: Fraction, rng: random.Random, denom: int = 10**6):
    """A stochastic column within 1-norm distance ``< eps`` of ``col``.

    A zero-sum direction with random rational coordinates is scaled to a random
    length below ``eps`` and then shrunk just enough to keep every entry >= 0.
    """
    n = len(col)
    if eps == 0:
        return tuple(col)
    u = [Fraction(rng.randint(-denom, denom), denom) for _ in range(n)]
    mean = sum(u, ZERO) / n
    d = [x - mean for x in u]
    norm = sum((abs(x) for x in d), ZERO)
    if norm == 0:
        return tuple(col)
    length = eps * Fraction(rng.randint(0, denom - 1), denom)
    d = [x * length / norm for x in d]
    shrink = min([ONE] + [col[j] / -d[j] for j in range(n) if d[j] < 0])
    return tuple(c + shrink * x for c, x in zip(col, d))


def perturb(A: StochMatrix, eps: Fraction, rng: random.Random) -> StochMatrix:
    cols = [perturb_column(c, eps, rng) for c in A.columns()]
    return StochMatrix(tuple(tuple(r) for r in zip(*cols)))


@dataclass(frozen=True)
class BenchReport:
    length: int
    eps: Fraction
    trials: int
    max_deviation: Fraction
    mean_deviation: Fraction
    bound: Fraction
    max_factor_error: Fraction
    all_within_bound: bool

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "eps": str(self.eps),
            "trials": self.trials,
            "max_deviation": str(self.max_deviation),
            "max_deviation_float": float(self.max_deviation),
            "mean_deviation_float": float(self.mean_deviation),
            "bound": str(self.bound),
            "max_factor_error": str(self.max_factor_error),
            "all_within_bound": self.all_within_bound,
        }


def error_bound_bench(A: StochMatrix, f: FactorList, eps, trials: int = 100, seed: int = 0) -> BenchReport:
    """Perturb every factor by less than ``eps`` and measure how far the product moves.

    Distances use the induced 1-norm, under which stochastic matrices are
    non-expansive, so the deviation never exceeds ``len(f) * eps``. Trial ``t``
    draws from its own generator seeded with ``(seed, t)``.
    """
    eps = Fraction(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if not verify(A, f):
        raise ValueError("factor list does not reproduce the matrix")
    mats = f.matrices()
    m = len(mats)
    exact = A.entries
    devs, worst_factor = [], ZERO
    for t in range(trials):
        rng = random.Random(f"{seed}:{t}")
        noisy = [perturb(g, eps, rng) for g in mats]
        for g, h in zip(mats, noisy):
            worst_factor = max(worst_factor, induced_one_norm(grid_sub(g.entries, h.entries)))
        prod = multiply(noisy, f.dim).entries
        devs.append(induced_one_norm(grid_sub(exact, prod)))
    bound = m * eps
    if worst_factor >= eps and eps > 0:
        raise InternalInvariantViolation("perturbation exceeded eps")
    return BenchReport(
        length=m,
        eps=eps,
        trials=trials,
        max_deviation=max(devs, default=ZERO),
        mean_deviation=sum(devs, ZERO) / trials if trials else ZERO,
        bound=bound,
        max_factor_error=worst_factor,
        all_within_bound=all(d <= bound for d in devs),
    )


def telescope_terms(exact: Sequence[StochMatrix], noisy: Sequence[StochMatrix]):
    """Summands of ``prod g - prod h = sum_i (g_1..g_{i-1}) (g_i - h_i) (h_{i+1}..h_l)``."""
    n = exact[0].n
    terms = []
    for i in range(len(exact)):
        left = multiply(list(exact[:i]), n).entries
        right = multiply(list(noisy[i + 1:]), n).entries
        diff = grid_sub(exact[i].entries, noisy[i].entries)
        terms.append(grid_matmul(grid_matmul(left, diff), right))
    return terms
