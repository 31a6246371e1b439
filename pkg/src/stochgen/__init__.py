"""Exact divisibility analysis and generator factorization of stochastic matrices."""

from .divisibility import (
    DivisionStep,
    Verdict,
    class_census,
    classify,
    division_step,
    epsilon,
    find_progress_pair,
    is_prime_s3,
    residual_classes,
    sign_indivisible,
)
from .experiments import sample_stochastic, stuck_fraction
from .factorization import (
    ConvexS3,
    ElemS2,
    FactorList,
    PermS3,
    SwapS2,
    certify_s2_witness,
    convex_membership_s3,
    convex_weights,
    decompose_base_case,
    decompose_s2,
    decompose_s3,
    error_bound_bench,
    perm_table_s3,
    verify,
)
from .matrix import (
    Permutation,
    SignPattern,
    StochMatrix,
    act,
    canonical_class,
    is_permutation_matrix,
    pattern_product,
    sign,
    validate_stochastic,
    zero_count,
)
from .monoid import FiniteMonoid, building_blocks, closure, indivisibles, n_g, n_g_max, units

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
