"""JSON interchange for matrices, triples, symbols, witnesses, and reports.

A complex matrix is carried as ``{"rows": r, "cols": c, "data": [[re, im],
...]}`` with ``data`` flat in row-major order.  Values are plain JSON floats,
which round-trip binary64 exactly, so write-then-read reproduces arrays
bit for bit.  Non-finite entries are rejected on both paths.
"""

from __future__ import annotations

import json
from typing import Any, IO

import numpy as np

from .hardy import AnalyticSymbol
from .invariants import CoincidenceWitness
from .matcore import DEFAULT_POLICY, TetralabError, TolerancePolicy, ensure_matrix
from .report import CheckReport
from .triples import TetrablockTriple, validate

__all__ = [
    "FormatError",
    "matrix_to_obj",
    "matrix_from_obj",
    "triple_to_obj",
    "triple_from_obj",
    "symbol_to_obj",
    "symbol_from_obj",
    "witness_to_obj",
    "witness_from_obj",
    "report_to_obj",
    "dumps",
    "dump",
    "loads",
    "load",
]


class FormatError(TetralabError):
    """Malformed or non-finite serialized object."""


def matrix_to_obj(m) -> dict[str, Any]:
    m = ensure_matrix(m, name="matrix")
    rows, cols = m.shape
    flat = m.reshape(-1)
    return {
        "rows": int(rows),
        "cols": int(cols),
        "data": [[float(v.real), float(v.imag)] for v in flat],
    }


def matrix_from_obj(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise FormatError(f"matrix object must be a dict, got {type(obj).__name__}")
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"matrix object missing or malformed field: {exc}") from exc
    if rows < 0 or cols < 0:
        raise FormatError("matrix dimensions must be non-negative")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise FormatError(
            f"matrix data length {len(data) if isinstance(data, list) else '?'} "
            f"does not match {rows}x{cols}"
        )
    out = np.zeros(rows * cols, dtype=complex)
    for k, entry in enumerate(data):
        if (
            not isinstance(entry, (list, tuple))
            or len(entry) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
        ):
            raise FormatError(f"matrix entry {k} must be a [re, im] pair of numbers")
        re, im = float(entry[0]), float(entry[1])
        if not (np.isfinite(re) and np.isfinite(im)):
            raise FormatError(f"matrix entry {k} is not finite")
        out[k] = complex(re, im)
    return out.reshape(rows, cols)


def triple_to_obj(triple: TetrablockTriple) -> dict[str, Any]:
    return {
        "A": matrix_to_obj(triple.A),
        "B": matrix_to_obj(triple.B),
        "P": matrix_to_obj(triple.P),
    }


def triple_from_obj(obj, pol: TolerancePolicy = DEFAULT_POLICY) -> TetrablockTriple:
    if not isinstance(obj, dict) or not {"A", "B", "P"} <= set(obj):
        raise FormatError('triple object must contain keys "A", "B", "P"')
    return validate(
        matrix_from_obj(obj["A"]),
        matrix_from_obj(obj["B"]),
        matrix_from_obj(obj["P"]),
        pol,
    )


def symbol_to_obj(sym: AnalyticSymbol) -> dict[str, Any]:
    return {"coeffs": [matrix_to_obj(c) for c in sym.coeffs]}


def symbol_from_obj(obj) -> AnalyticSymbol:
    if not isinstance(obj, dict) or "coeffs" not in obj or not isinstance(obj["coeffs"], list):
        raise FormatError('symbol object must contain a list field "coeffs"')
    if not obj["coeffs"]:
        raise FormatError("symbol object must have at least one coefficient")
    return AnalyticSymbol(tuple(matrix_from_obj(c) for c in obj["coeffs"]))


def witness_to_obj(wit: CoincidenceWitness) -> dict[str, Any]:
    return {"u": matrix_to_obj(wit.u), "u_star": matrix_to_obj(wit.u_star)}


def witness_from_obj(obj) -> CoincidenceWitness:
    if not isinstance(obj, dict) or not {"u", "u_star"} <= set(obj):
        raise FormatError('witness object must contain keys "u", "u_star"')
    return CoincidenceWitness(
        u=matrix_from_obj(obj["u"]), u_star=matrix_from_obj(obj["u_star"])
    )


def report_to_obj(report: CheckReport) -> dict[str, Any]:
    return report.to_dict()


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def dump(obj: Any, fp: IO[str]) -> None:
    fp.write(dumps(obj))


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


def load(fp: IO[str]) -> Any:
    return loads(fp.read())
