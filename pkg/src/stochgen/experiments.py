"""Seeded random sampling and the Monte Carlo "stuck fraction" estimate.

All randomness comes from :class:`random.Random` (Mersenne Twister) seeded with
the caller's integer seed, so identical arguments give identical reports.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional
from fractions import Fraction

from .divisibility import RESIDUAL_LABELS
from .errors import NotGenerated
from .factorization import decompose_s3_detailed
from .matrix import StochMatrix


def random_composition(total: int, parts: int, rng: random.Random) -> list[int]:
    """Uniform composition of ``total`` into ``parts`` non-negative integers (stars and bars)."""
    bars = sorted(rng.sample(range(total + parts - 1), parts - 1))
    edges = [-1] + bars + [total + parts - 1]
    return [edges[j + 1] - edges[j] - 1 for j in range(parts)]


def sample_column(n: int, denominator: int, rng: random.Random) -> list[Fraction]:
    return [Fraction(c, denominator) for c in random_composition(denominator, n, rng)]


def sample_stochastic(n: int, denominator: int, seed=None, rng: random.Random | None = None) -> StochMatrix:
    """Random ``n x n`` stochastic matrix with entries in ``(1/D) Z``.

    Each column is uniform over the compositions of ``D`` into ``n`` parts.
    Pass either ``seed`` or a shared ``rng``.
    """
    if denominator < 1:
        raise ValueError("denominator bound must be >= 1")
    if rng is None:
        rng = random.Random(seed)
    cols = [sample_column(n, denominator, rng) for _ in range(n)]
    return StochMatrix(tuple(tuple(r) for r in zip(*cols)))


@dataclass(frozen=True)
class StuckReport:
    samples: int
    tallies: dict
    step_histogram: dict
    max_length: int

    @property
    def fraction_prime_base_case(self) -> Fraction:
        return Fraction(self.tallies["prime"], self.samples) if self.samples else Fraction(0)

    @property
    def fraction_elementary_only(self) -> Fraction:
        return Fraction(self.tallies["permutation"], self.samples) if self.samples else Fraction(0)

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "fraction_prime_base_case": str(self.fraction_prime_base_case),
            "fraction_prime_base_case_float": float(self.fraction_prime_base_case),
            "fraction_elementary_only": str(self.fraction_elementary_only),
            "fraction_elementary_only_float": float(self.fraction_elementary_only),
            "class_tallies": dict(self.tallies),
            "division_steps_histogram": {str(k): v for k, v in sorted(self.step_histogram.items())},
            "max_length": self.max_length,
        }


NOT_GENERATED = "not_generated"


def _landing(A: StochMatrix) -> tuple[str, Optional[int], int]:
    try:
        d = decompose_s3_detailed(A)
    except NotGenerated:
        return NOT_GENERATED, None, 0
    return d.base_label, d.steps, len(d.factors)


def stuck_report(matrices, jobs: int = 1) -> StuckReport:
    """Tally which residual class each matrix's decomposition ends in.

    Matrices with no decomposition at all are counted under ``not_generated``.
    """
    matrices = list(matrices)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_landing, matrices, chunksize=32))
    else:
        results = [_landing(A) for A in matrices]
    tallies = {label: 0 for label in RESIDUAL_LABELS}
    tallies[NOT_GENERATED] = 0
    steps: dict = {}
    for label, m, _ in results:
        tallies[label] += 1
        if m is not None:
            steps[m] = steps.get(m, 0) + 1
    return StuckReport(len(matrices), tallies, steps, max((r[2] for r in results), default=0))


def stuck_fraction(samples: int, denominator: int, seed, jobs: int = 1) -> StuckReport:
    """Decompose ``samples`` random 3x3 matrices and report where they get stuck.

    "Prime" landings hit an indivisible element; "permutation" landings need only
    elementary factors and permutations.
    """
    rng = random.Random(seed)
    mats = [sample_stochastic(3, denominator, rng=rng) for _ in range(samples)]
    return stuck_report(mats, jobs=jobs)
