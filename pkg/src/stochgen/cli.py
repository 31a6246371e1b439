"""Command line entry point: ``stochgen <subcommand> [options]``.

Every subcommand prints one JSON document. Exit status is 0 on success, 1 on a
domain error (the JSON then carries ``"error"`` and ``"message"``) and 2 when
the input cannot be read or parsed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .divisibility import (
    CERTIFIED,
    class_census,
    classify,
    residual_classes,
    residual_label,
    sign_indivisible,
)
from .errors import DimTooLarge, StochGenError
from .experiments import sample_stochastic, stuck_fraction
from .factorization import (
    certify_s2_witness,
    decompose_s2,
    decompose_s3,
    error_bound_bench,
    verify,
)
from .io import FormatError, matrix_to_json, read_matrix, read_patterns
from .matrix import SignPattern, pattern_product, validate_stochastic
from .monoid import building_blocks, closure, indivisibles, units, word_lengths

SEED_LIMIT = 2**64

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2


@dataclass
class RunConfig:
    subcommand: str
    input: Optional[str] = None
    output: Optional[str] = None
    dim: int = 3
    seed: int = 0
    trials: int = 100
    samples: int = 1000
    eps: Fraction = Fraction(1, 1000)
    denominator: int = 360
    jobs: int = 1
    certify: bool = False
    with_identity: bool = False
    dim_check: bool = False


# -- subcommands -------------------------------------------------------------


def _decompose(A):
    if A.n == 2:
        return decompose_s2(A)
    if A.n == 3:
        return decompose_s3(A)
    raise DimTooLarge(f"no generating set implemented for n={A.n}; only n=2 and n=3")


def cmd_classify(cfg: RunConfig) -> dict:
    return classify(read_matrix(cfg.input)).to_json()


def cmd_decompose(cfg: RunConfig) -> dict:
    A = read_matrix(cfg.input)
    f = _decompose(A)
    if cfg.dim_check:
        # re-validate each factor as an honest n x n stochastic matrix
        for g in f.matrices():
            validate_stochastic(g.entries)
            if g.n != A.n:
                raise DimTooLarge(f"factor of size {g.n} in a {A.n}x{A.n} decomposition")
    ok = verify(A, f)
    return {"factors": f.to_json(), "length": len(f), "verified": ok}


def cmd_sign_classes(cfg: RunConfig) -> dict:
    census = class_census(cfg.dim)
    classes = []
    for P, size in sorted(census.items()):
        entry = {"class": P.to_strings(), "orbit_size": size}
        if cfg.dim == 3:
            entry["residual"] = residual_label(P)
        if cfg.certify:
            entry["sign_indivisible"] = sign_indivisible(P)
        classes.append(entry)
    out = {"dim": cfg.dim, "patterns": sum(census.values()), "classes": len(census), "census": classes}
    if cfg.certify:
        out["certified_indivisible"] = [c["class"] for c in classes if c["sign_indivisible"] == CERTIFIED]
    return out


def cmd_residual(cfg: RunConfig) -> dict:
    found = residual_classes(cfg.dim)
    return {
        "dim": cfg.dim,
        "classes": [{"class": P.to_strings(), "label": residual_label(P)} for P in found],
        "count": len(found),
    }


def cmd_witness_s2(cfg: RunConfig) -> dict:
    third = Fraction(1, 3)
    A = validate_stochastic([[2 * third, third], [third, 2 * third]])
    f = decompose_s2(A)
    return {
        "matrix": matrix_to_json(A),
        "factors": f.to_json(),
        "length": len(f),
        "no_shorter_word": certify_s2_witness(A),
    }


def cmd_bench_error(cfg: RunConfig) -> dict:
    if cfg.input:
        A = read_matrix(cfg.input)
    else:
        A = sample_stochastic(cfg.dim, cfg.denominator, seed=cfg.seed)
    f = _decompose(A)
    report = error_bound_bench(A, f, cfg.eps, trials=cfg.trials, seed=cfg.seed)
    return {"matrix": matrix_to_json(A), "seed": cfg.seed, **report.to_json()}


def cmd_stuck_fraction(cfg: RunConfig) -> dict:
    if cfg.dim != 3:
        raise DimTooLarge("stuck-fraction runs on 3x3 matrices only")
    report = stuck_fraction(cfg.samples, cfg.denominator, cfg.seed, jobs=cfg.jobs)
    return {"denominator": cfg.denominator, "seed": cfg.seed, **report.to_json()}


def cmd_monoid(cfg: RunConfig) -> dict:
    gens = read_patterns(cfg.input)
    n = gens[0].dim
    e = SignPattern.identity(n)
    S = closure(gens, pattern_product, identity=e, include_identity=cfg.with_identity)
    lengths = word_lengths(S, gens)

    def dump(xs):
        return [x.to_strings() for x in sorted(xs)]

    return {
        "dim": n,
        "size": len(S),
        "elements": dump(S.elements),
        "identity": e.to_strings() if S.identity is not None else None,
        "units": dump(units(S)),
        "indivisibles": dump(indivisibles(S)),
        "building_blocks": dump(building_blocks(S)),
        "n_g": [{"element": x.to_strings(), "length": lengths.get(x)} for x in sorted(S.elements)],
        "n_g_max": None if any(x not in lengths for x in S.elements) else max(lengths.values()),
    }


def cmd_sample(cfg: RunConfig) -> dict:
    return matrix_to_json(sample_stochastic(cfg.dim, cfg.denominator, seed=cfg.seed))


COMMANDS = {
    "classify": cmd_classify,
    "decompose": cmd_decompose,
    "sign-classes": cmd_sign_classes,
    "residual": cmd_residual,
    "witness-s2": cmd_witness_s2,
    "bench-error": cmd_bench_error,
    "stuck-fraction": cmd_stuck_fraction,
    "monoid": cmd_monoid,
    "sample": cmd_sample,
}

NEEDS_INPUT = {"classify", "decompose", "monoid"}


def _emit(doc: dict, output: Optional[str], stream=None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        (stream or sys.stdout).write(text)


def run(cfg: RunConfig) -> int:
    """Execute one subcommand and write its report; returns the exit code."""
    if cfg.subcommand in NEEDS_INPUT and not cfg.input:
        _emit({"error": "missing_input", "message": f"{cfg.subcommand} needs --input"}, None, sys.stderr)
        return EXIT_IO
    try:
        doc = COMMANDS[cfg.subcommand](cfg)
    except (FormatError, OSError) as exc:
        _emit({"error": "io_error", "message": str(exc)}, None, sys.stderr)
        return EXIT_IO
    except StochGenError as exc:
        _emit(exc.to_json(), cfg.output)
        return EXIT_DOMAIN
    try:
        _emit(doc, cfg.output)
    except OSError as exc:
        _emit({"error": "io_error", "message": str(exc)}, None, sys.stderr)
        return EXIT_IO
    return EXIT_OK


# -- argument parsing --------------------------------------------------------


def _rational(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value < SEED_LIMIT:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochgen", description="Divisibility and generator factorization of stochastic matrices."
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, help_, *flags):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--output", "-o", help="write JSON here instead of stdout")
        for flag in flags:
            flag(p)
        return p

    def input_(p, required=True):
        p.add_argument("--input", "-i", required=required, help="matrix or pattern JSON file")

    def dim(default):
        return lambda p: p.add_argument("--dim", type=_positive, default=default)

    def seed(p):
        p.add_argument("--seed", type=_seed, default=0)

    def denominator(p):
        p.add_argument("--denominator", type=_positive, default=360, help="entries in (1/D)Z")

    add("classify", "decide divisibility of a matrix", input_)
    add(
        "decompose",
        "write a 2x2 or 3x3 matrix as a product of generators",
        input_,
        lambda p: p.add_argument("--dim-check", action="store_true", help="re-validate every factor"),
    )
    add(
        "sign-classes",
        "census of sign-pattern classes",
        dim(3),
        lambda p: p.add_argument("--certify", action="store_true", help="run the sign-level indivisibility test"),
    )
    add("residual", "sign classes without a progress pair", dim(3))
    add("witness-s2", "show that (2/3 1/3; 1/3 2/3) needs four generators")
    add(
        "bench-error",
        "perturb the factors of a decomposition and measure the error",
        lambda p: input_(p, required=False),
        lambda p: p.add_argument("--eps", type=_rational, default=Fraction(1, 1000)),
        lambda p: p.add_argument("--trials", type=_positive, default=100),
        seed,
        dim(3),
        denominator,
    )
    add(
        "stuck-fraction",
        "Monte Carlo tally of where 3x3 decompositions end",
        lambda p: p.add_argument("--samples", type=_positive, default=1000),
        denominator,
        seed,
        lambda p: p.add_argument("--jobs", type=_positive, default=1),
    )
    add(
        "monoid",
        "analyse the semigroup generated by boolean matrices",
        input_,
        lambda p: p.add_argument("--with-identity", action="store_true", help="adjoin the identity"),
    )
    add("sample", "draw a seeded random stochastic matrix", dim(3), denominator, seed)
    return parser


def config_from_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    fields = {k.replace("-", "_"): v for k, v in vars(ns).items() if v is not None}
    return RunConfig(**fields)


def main(argv=None) -> int:
    return run(config_from_args(argv))


if __name__ == "__main__":
    sys.exit(main())
