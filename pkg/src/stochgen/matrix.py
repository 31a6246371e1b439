"""Exact column-stochastic matrices, permutations and sign patterns.

Convention: a stochastic matrix has non-negative entries and every *column*
sums to one. Indices are 0-based throughout the Python API.

A permutation ``p`` is stored by its images ``p(j) = images[j]`` and induces the
matrix ``sum_j e_j e_{p(j)}^T``, i.e. row ``j`` carries its single one in column
``p(j)``. With this choice

* ``(P x)_j = x_{p(j)}``,
* ``to_matrix(s * t) == to_matrix(t) @ to_matrix(s)`` where ``s * t`` is ``s o t``,
* ``(P A T)_{jk} = A_{p(j), t^{-1}(k)}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import ColumnSumMismatch, DimMismatch, NegativeEntry

Grid = tuple[tuple[Fraction, ...], ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, a decimal literal or an int exactly.

    Floats are rejected so that no binary rounding sneaks in.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"refusing inexact value {value!r}; pass a string")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"cannot parse {value!r} as a rational")


def format_rational(x: Fraction) -> str:
    return str(x)


# -- plain grid helpers (no stochasticity assumed) ---------------------------


def grid_matmul(X: Grid, Y: Grid) -> Grid:
    cols = list(zip(*Y))
    return tuple(
        tuple(sum((a * b for a, b in zip(row, col)), ZERO) for col in cols) for row in X
    )


def grid_sub(X: Grid, Y: Grid) -> Grid:
    return tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(X, Y))


def induced_one_norm(X: Grid) -> Fraction:
    """Operator norm induced by the vector 1-norm: the largest column 1-norm."""
    n = len(X[0]) if X else 0
    return max((sum((abs(X[j][k]) for j in range(len(X))), ZERO) for k in range(n)), default=ZERO)


def identity_grid(n: int) -> Grid:
    return tuple(tuple(ONE if j == k else ZERO for k in range(n)) for j in range(n))


# -- stochastic matrices -----------------------------------------------------


@dataclass(frozen=True)
class StochMatrix:
    """An ``n x n`` column-stochastic matrix over the rationals.

    Build instances through :func:`validate_stochastic`; the raw constructor
    trusts its input and is used internally on products of valid matrices.
    """

    entries: Grid

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        j, k = idx
        return self.entries[j][k]

    def column(self, k: int) -> tuple[Fraction, ...]:
        return tuple(row[k] for row in self.entries)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(k) for k in range(self.n)]

    def __matmul__(self, other: "StochMatrix") -> "StochMatrix":
        if self.n != other.n:
            raise DimMismatch(f"cannot multiply {self.n}x{self.n} by {other.n}x{other.n}")
        return StochMatrix(grid_matmul(self.entries, other.entries))

    def rows_as_strings(self) -> list[list[str]]:
        return [[format_rational(x) for x in row] for row in self.entries]

    def __str__(self) -> str:
        cells = self.rows_as_strings()
        width = max(len(c) for row in cells for c in row)
        return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)

    @classmethod
    def identity(cls, n: int) -> "StochMatrix":
        return cls(identity_grid(n))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Fraction]]) -> "StochMatrix":
        return validate_stochastic([list(r) for r in zip(*columns)])


def validate_stochastic(raw: Iterable[Iterable]) -> StochMatrix:
    """Check ``raw`` (rows of rationals) and wrap it as a :class:`StochMatrix`.

    Raises :class:`NegativeEntry` or :class:`ColumnSumMismatch`, reporting the
    first offending entry/column.
    """
    grid = tuple(tuple(parse_rational(x) for x in row) for row in raw)
    n = len(grid)
    if n == 0 or any(len(row) != n for row in grid):
        raise DimMismatch("matrix must be square and non-empty")
    for j, row in enumerate(grid):
        for k, x in enumerate(row):
            if x < 0:
                raise NegativeEntry(j, k, x)
    for k in range(n):
        total = sum((grid[j][k] for j in range(n)), ZERO)
        if total != 1:
            raise ColumnSumMismatch(k, total)
    return StochMatrix(grid)


def multiply(factors: Sequence[StochMatrix], n: int | None = None) -> StochMatrix:
    """Left-to-right product; the empty product is the identity of size ``n``."""
    if not factors:
        if n is None:
            raise ValueError("empty product needs an explicit dimension")
        return StochMatrix.identity(n)
    out = factors[0]
    for f in factors[1:]:
        out = out @ f
    return out


def zero_count(A: StochMatrix) -> int:
    return sum(1 for row in A.entries for x in row if x == 0)


def is_permutation_matrix(A: StochMatrix) -> bool:
    return sign(A).is_permutation()


# -- permutations ------------------------------------------------------------


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"{self.images} is not a permutation of 0..{len(self.images) - 1}")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, j: int) -> int:
        return self.images[j]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition ``self o other`` (apply ``other`` first)."""
        return Permutation(tuple(self.images[other.images[j]] for j in range(other.n)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for j, p in enumerate(self.images):
            inv[p] = j
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(j == p for j, p in enumerate(self.images))

    def to_matrix(self) -> StochMatrix:
        n = self.n
        return StochMatrix(
            tuple(tuple(ONE if k == self.images[j] else ZERO for k in range(n)) for j in range(n))
        )

    def cycles(self) -> str:
        """1-based cycle notation without fixed points, e.g. ``"(1 3 2)"``; ``"()"`` for id."""
        seen, parts = set(), []
        for start in range(self.n):
            if start in seen or self.images[start] == start:
                continue
            cyc, j = [], start
            while j not in seen:
                seen.add(j)
                cyc.append(j + 1)
                j = self.images[j]
            parts.append("(" + " ".join(map(str, cyc)) + ")")
        return "".join(parts) or "()"

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, text: str) -> "Permutation":
        """Inverse of :meth:`cycles`; fixed points may be written or omitted."""
        images = list(range(n))
        for chunk in text.replace(")", ")\n").split("\n"):
            chunk = chunk.strip()
            if not chunk:
                continue
            if not (chunk.startswith("(") and chunk.endswith(")")):
                raise ValueError(f"bad cycle syntax: {text!r}")
            pts = [int(t) - 1 for t in chunk[1:-1].replace(",", " ").split()]
            for a, b in zip(pts, pts[1:] + pts[:1]):
                images[a] = b
        return cls(tuple(images))

    @classmethod
    def from_matrix(cls, A: StochMatrix) -> "Permutation":
        if not is_permutation_matrix(A):
            raise ValueError("not a permutation matrix")
        return cls(tuple(row.index(ONE) for row in A.entries))


@lru_cache(maxsize=None)
def all_permutations(n: int) -> tuple[Permutation, ...]:
    return tuple(Permutation(p) for p in itertools.permutations(range(n)))


def act(pi: Permutation, A: StochMatrix, tau: Permutation) -> StochMatrix:
    """Return ``to_matrix(pi) @ A @ to_matrix(tau)`` via index permutation."""
    if pi.n != A.n or tau.n != A.n:
        raise DimMismatch("permutation and matrix dimensions differ")
    tinv = tau.inverse().images
    E = A.entries
    return StochMatrix(tuple(tuple(E[pi.images[j]][tinv[k]] for k in range(A.n)) for j in range(A.n)))


# -- sign patterns -----------------------------------------------------------


@dataclass(frozen=True)
class SignPattern:
    """Boolean ``n x n`` matrix stored as one integer per row.

    Bit ``n-1-k`` of ``rows[j]`` is entry ``(j, k)``, so ``format(rows[j], "03b")``
    reads the row left to right. Ordering of patterns compares rows as tuples,
    which is the row-major lexicographic bit order.
    """

    dim: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.dim or any(r < 0 or r >> self.dim for r in self.rows):
            raise ValueError(f"bad pattern rows {self.rows} for dim {self.dim}")

    def bit(self, j: int, k: int) -> bool:
        return bool(self.rows[j] >> (self.dim - 1 - k) & 1)

    def column_masks(self) -> tuple[int, ...]:
        """Column ``k`` as an int; bit ``n-1-j`` set iff entry ``(j, k)`` is set."""
        n = self.dim
        return tuple(
            sum(1 << (n - 1 - j) for j in range(n) if self.rows[j] >> (n - 1 - k) & 1)
            for k in range(n)
        )

    def __matmul__(self, other: "SignPattern") -> "SignPattern":
        return pattern_product(self, other)

    def __lt__(self, other: "SignPattern") -> bool:
        return (self.dim, self.rows) < (other.dim, other.rows)

    def is_permutation(self) -> bool:
        full = (1 << self.dim) - 1
        if any(r == 0 or r & (r - 1) for r in self.rows):
            return False
        acc = 0
        for r in self.rows:
            acc |= r
        return acc == full

    def is_stochastic_compatible(self) -> bool:
        return all(self.column_masks())

    def to_strings(self) -> list[str]:
        return [format(r, f"0{self.dim}b") for r in self.rows]

    def to_json(self) -> dict:
        return {"dim": self.dim, "rows": self.to_strings()}

    def __str__(self) -> str:
        return "\n".join(" ".join(s) for s in self.to_strings())

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "SignPattern":
        n = len(rows)
        if any(len(r) != n or set(r) - {"0", "1"} for r in rows):
            raise ValueError(f"bad pattern rows {rows!r}")
        return cls(n, tuple(int(r, 2) for r in rows))

    @classmethod
    def from_bits(cls, bits: Sequence[Sequence[int]]) -> "SignPattern":
        return cls.from_strings(["".join("1" if b else "0" for b in row) for row in bits])

    @classmethod
    def from_column_masks(cls, dim: int, cols: Sequence[int]) -> "SignPattern":
        rows = tuple(
            sum(1 << (dim - 1 - k) for k in range(dim) if cols[k] >> (dim - 1 - j) & 1)
            for j in range(dim)
        )
        return cls(dim, rows)

    @classmethod
    def identity(cls, n: int) -> "SignPattern":
        return cls(n, tuple(1 << (n - 1 - j) for j in range(n)))


def sign(A: StochMatrix) -> SignPattern:
    n = A.n
    return SignPattern(
        n, tuple(sum(1 << (n - 1 - k) for k, x in enumerate(row) if x > 0) for row in A.entries)
    )


def pattern_product(P: SignPattern, Q: SignPattern) -> SignPattern:
    """Boolean product: entry ``(j, k)`` is ``OR_m P[j, m] AND Q[m, k]``."""
    if P.dim != Q.dim:
        raise DimMismatch(f"pattern dims {P.dim} and {Q.dim} differ")
    n = P.dim
    out = []
    for r in P.rows:
        acc = 0
        for m in range(n):
            if r >> (n - 1 - m) & 1:
                acc |= Q.rows[m]
        out.append(acc)
    return SignPattern(n, tuple(out))


def act_pattern(pi: Permutation, P: SignPattern, tau: Permutation) -> SignPattern:
    """Pattern-level counterpart of :func:`act`."""
    n = P.dim
    tinv = tau.inverse().images
    return SignPattern.from_bits(
        [[P.bit(pi.images[j], tinv[k]) for k in range(n)] for j in range(n)]
    )


@lru_cache(maxsize=None)
def _column_perm_tables(n: int) -> tuple[tuple[int, ...], ...]:
    """For each column permutation, the image of every possible row word."""
    tables = []
    for perm in itertools.permutations(range(n)):
        table = []
        for r in range(1 << n):
            table.append(
                sum(1 << (n - 1 - k) for k in range(n) if r >> (n - 1 - perm[k]) & 1)
            )
        tables.append(tuple(table))
    return tuple(tables)


def canonical_class(P: SignPattern) -> SignPattern:
    """Lexicographically smallest pattern in the orbit under row and column permutations.

    For a fixed column permutation the best row permutation just sorts the rows,
    so only the ``n!`` column permutations are enumerated explicitly.
    """
    best = min(tuple(sorted(t[r] for r in P.rows)) for t in _column_perm_tables(P.dim))
    return SignPattern(P.dim, best)


def stochastic_patterns(n: int) -> list[SignPattern]:
    """All ``(2^n - 1)^n`` patterns with no empty column, in a fixed order."""
    nonempty = range(1, 1 << n)
    return [SignPattern.from_column_masks(n, cols) for cols in itertools.product(nonempty, repeat=n)]


def popcount(x: int) -> int:
    return bin(x).count("1")
