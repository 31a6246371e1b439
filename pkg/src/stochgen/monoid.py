"""Brute-force analysis of finite monoids.

The engine only needs hashable elements and a product callable. Everything is
computed by exhaustive search: closure by breadth-first search, divisibility
questions by looping over all ``|S|^2`` products.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Optional

from .errors import CapExceeded, InternalInvariantViolation

Product = Callable[[Hashable, Hashable], Hashable]


@dataclass
class FiniteMonoid:
    """A finite set closed under ``product``.

    ``identity`` is ``None`` when the set does not contain a neutral element
    (a plain semigroup); unit-related queries then return empty sets.
    ``words`` maps each element to one shortest generator word, when known.
    """

    elements: frozenset
    product: Product
    identity: Optional[Hashable] = None
    words: dict = field(default_factory=dict)
    check: bool = True

    def __post_init__(self):
        self.elements = frozenset(self.elements)
        if not self.check:
            return
        for x in self.elements:
            for y in self.elements:
                if self.product(x, y) not in self.elements:
                    raise ValueError(f"set is not closed: {x!r} * {y!r}")
        if self.identity is not None:
            if self.identity not in self.elements:
                raise ValueError("identity is not an element")
            for x in self.elements:
                if self.product(self.identity, x) != x or self.product(x, self.identity) != x:
                    raise ValueError(f"identity is not neutral for {x!r}")

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self.elements

    def table(self) -> dict:
        """All products, keyed by ``(y, z)``."""
        return {(y, z): self.product(y, z) for y in self.elements for z in self.elements}

    def factorizations(self) -> dict:
        """Map each element ``x`` to the list of pairs ``(y, z)`` with ``y z = x``."""
        out: dict = {x: [] for x in self.elements}
        for (y, z), x in self.table().items():
            out[x].append((y, z))
        return out


def closure(
    generators: Iterable[Hashable],
    product: Product,
    identity: Optional[Hashable] = None,
    cap: int = 100_000,
    include_identity: bool = False,
) -> FiniteMonoid:
    """Smallest product-closed set containing ``generators``.

    Breadth-first over word length, so the word stored for each element is a
    shortest one. The identity is present only when some word produces it or
    when ``include_identity`` is set (it then gets the empty word).
    """
    gens = list(dict.fromkeys(generators))
    words: dict = {}
    queue: deque = deque()
    if include_identity and identity is not None:
        words[identity] = ()
    for g in gens:
        if g not in words:
            words[g] = (g,)
            queue.append(g)
    if len(words) > cap:
        raise CapExceeded(cap)
    while queue:
        x = queue.popleft()
        for g in gens:
            y = product(x, g)
            if y not in words:
                words[y] = words[x] + (g,)
                if len(words) > cap:
                    raise CapExceeded(cap)
                queue.append(y)
    elements = frozenset(words)
    # right-multiplication BFS already yields closure: every product of words is a word
    has_identity = identity is not None and identity in elements
    return FiniteMonoid(
        elements, product, identity if has_identity else None, words=words, check=False
    )


def evaluate_word(word, product: Product, identity=None):
    if not word:
        if identity is None:
            raise ValueError("empty word without identity")
        return identity
    acc = word[0]
    for g in word[1:]:
        acc = product(acc, g)
    return acc


def units(S: FiniteMonoid) -> frozenset:
    """Elements with a two-sided inverse inside ``S``."""
    e = S.identity
    if e is None:
        return frozenset()
    inverse = {}
    for x in S.elements:
        for y in S.elements:
            if S.product(x, y) == e and S.product(y, x) == e:
                inverse[x] = y
                break
    for x in inverse:
        if inverse[x] not in inverse or any(S.product(x, y) not in inverse for y in inverse):
            raise InternalInvariantViolation("group of units is not closed")
    return frozenset(inverse)


def indivisibles(S: FiniteMonoid) -> frozenset:
    """Elements all of whose factorizations ``x = y z`` have exactly one unit factor.

    ``O(|S|^2)`` products.
    """
    U = units(S)
    out = set()
    for x, pairs in S.factorizations().items():
        if all((y in U) != (z in U) for y, z in pairs):
            out.add(x)
    return frozenset(out)


def building_blocks(S: FiniteMonoid) -> frozenset:
    """Elements ``x`` with ``y in x U`` or ``z in U x`` for every ``x = y z``.

    ``O(|S|^2)`` products plus ``O(|S| |U|)`` for the cosets.
    """
    U = units(S)
    out = set()
    for x, pairs in S.factorizations().items():
        right = {S.product(x, u) for u in U}
        left = {S.product(u, x) for u in U}
        if all(y in right or z in left for y, z in pairs):
            out.add(x)
    return frozenset(out)


def word_lengths(S: FiniteMonoid, G: Iterable[Hashable]) -> dict:
    """Breadth-first word length over ``G`` for every reachable element."""
    gens = list(dict.fromkeys(G))
    dist = {g: 1 for g in gens}
    queue = deque(gens)
    while queue:
        x = queue.popleft()
        for g in gens:
            y = S.product(x, g)
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def n_g(S: FiniteMonoid, G: Iterable[Hashable], x: Hashable) -> Optional[int]:
    """Length of a shortest word over ``G`` evaluating to ``x``; ``None`` if unreachable."""
    return word_lengths(S, G).get(x)


def n_g_max(S: FiniteMonoid, G: Iterable[Hashable]) -> Optional[int]:
    """Supremum of :func:`n_g` over ``S``; ``None`` if some element is unreachable."""
    dist = word_lengths(S, G)
    if any(x not in dist for x in S.elements):
        return None
    return max(dist[x] for x in S.elements)
