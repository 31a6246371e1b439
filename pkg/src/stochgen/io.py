"""JSON readers and writers for matrices and sign patterns.

Matrix files look like ``{"dim": 3, "entries": [...]}`` where ``entries`` is
either a flat row-major list of ``n*n`` values or a list of ``n`` rows. Values
are strings (``"1/3"``, ``"0.25"``) or integers. Pattern files use
``{"dim": n, "rows": ["110", "011", ...]}``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import DimMismatch
from .matrix import SignPattern, StochMatrix, parse_rational, validate_stochastic


class FormatError(ValueError):
    """Input is not well-formed JSON in the expected layout."""


def _load(source) -> Any:
    if isinstance(source, (dict, list)):
        return source
    try:
        text = Path(source).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {source}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}: invalid JSON ({exc})") from exc


def matrix_from_json(obj: dict) -> StochMatrix:
    if not isinstance(obj, dict) or "entries" not in obj:
        raise FormatError('matrix JSON needs an "entries" field')
    entries = obj["entries"]
    if not isinstance(entries, list) or not entries:
        raise FormatError('"entries" must be a non-empty list')
    if all(isinstance(r, list) for r in entries):
        rows = entries
    else:
        n = obj.get("dim")
        if not isinstance(n, int) or n < 1:
            raise FormatError('flat "entries" need a positive integer "dim"')
        if len(entries) != n * n:
            raise DimMismatch(f"expected {n * n} entries for dim {n}, got {len(entries)}")
        rows = [entries[j * n:(j + 1) * n] for j in range(n)]
    try:
        parsed = [[parse_rational(x) for x in row] for row in rows]
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(str(exc)) from exc
    if "dim" in obj and obj["dim"] != len(parsed):
        raise DimMismatch(f'"dim" is {obj["dim"]} but there are {len(parsed)} rows')
    return validate_stochastic(parsed)


def matrix_to_json(A: StochMatrix) -> dict:
    return {"dim": A.n, "entries": [str(x) for row in A.entries for x in row]}


def read_matrix(source) -> StochMatrix:
    return matrix_from_json(_load(source))


def pattern_from_json(obj: dict) -> SignPattern:
    if not isinstance(obj, dict) or not isinstance(obj.get("rows"), list):
        raise FormatError('pattern JSON needs a "rows" list')
    try:
        P = SignPattern.from_strings(obj["rows"])
    except (ValueError, TypeError) as exc:
        raise FormatError(str(exc)) from exc
    if "dim" in obj and obj["dim"] != P.dim:
        raise DimMismatch(f'"dim" is {obj["dim"]} but there are {P.dim} rows')
    return P


def read_patterns(source) -> list[SignPattern]:
    """A single pattern object or a list of them."""
    data = _load(source)
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list) or not data:
        raise FormatError("expected a pattern object or a non-empty list of them")
    pats = [pattern_from_json(d) for d in data]
    if len({p.dim for p in pats}) != 1:
        raise DimMismatch("patterns of different dimension")
    return pats
