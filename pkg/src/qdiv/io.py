"""JSON formats for matrices and certification instances.

Matrix: ``{"n": int, "re": [[...]], "im": [[...]]}``; ``im`` may be omitted
for real matrices. Entries are numbers or exact rationals
``{"num": int, "den": int}``.

Certification instance: ``{"points": [matrix, ...], "c": [int, ...],
"tau_denominator": int}``. Each point must be a real ``2 x 2`` block,
optionally followed by a nonnegative diagonal tail, with rational entries.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

from .errors import ParseError
from .linalg import HermitianMatrix


def _entry(v) -> Fraction | float:
    if isinstance(v, dict):
        try:
            num, den = v["num"], v["den"]
        except KeyError:
            raise ParseError(f"rational entry needs 'num' and 'den', got {v!r}") from None
        if not (isinstance(num, int) and isinstance(den, int)) or isinstance(num, bool):
            raise ParseError(f"rational parts must be integers, got {v!r}")
        if den <= 0:
            raise ParseError(f"rational denominator must be positive, got {den}")
        return Fraction(num, den)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"matrix entry must be a number or a rational object, got {v!r}")
    if isinstance(v, float) and not math.isfinite(v):
        raise ParseError(f"matrix entries must be finite, got {v!r}")
    return v


def _grid(rows, n, key):
    if not isinstance(rows, list) or len(rows) != n:
        raise ParseError(f"'{key}' must be a list of {n} rows")
    out = []
    for r in rows:
        if not isinstance(r, list) or len(r) != n:
            raise ParseError(f"every row of '{key}' must have {n} entries")
        out.append([_entry(v) for v in r])
    return out


def _shape(obj):
    if not isinstance(obj, dict):
        raise ParseError(f"matrix must be a JSON object, got {type(obj).__name__}")
    if "re" not in obj:
        raise ParseError("matrix object needs an 're' field")
    n = obj.get("n", len(obj["re"]) if isinstance(obj["re"], list) else None)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"'n' must be a positive integer, got {n!r}")
    return n


def parse_matrix(obj) -> HermitianMatrix:
    n = _shape(obj)
    re = np.array([[float(v) for v in row] for row in _grid(obj["re"], n, "re")])
    if obj.get("im") is not None:
        im = np.array([[float(v) for v in row] for row in _grid(obj["im"], n, "im")])
        return HermitianMatrix(re + 1j * im)
    return HermitianMatrix(re)


def parse_rational_matrix(obj):
    """Exact entries as a list of rows of Fractions (real matrices only)."""
    n = _shape(obj)
    if obj.get("im") is not None and any(Fraction(v) != 0 for r in _grid(obj["im"], n, "im") for v in r):
        raise ParseError("exact-rational matrices must be real")
    rows = _grid(obj["re"], n, "re")
    out = []
    for r in rows:
        row = []
        for v in r:
            if isinstance(v, float):
                if not v.is_integer():
                    raise ParseError(f"exact inputs need integers or rationals, got float {v!r}")
                v = int(v)
            row.append(Fraction(v))
        out.append(row)
    for i in range(n):
        for j in range(i):
            if out[i][j] != out[j][i]:
                raise ParseError(f"matrix is not symmetric at ({i}, {j})")
    return out


def matrix_to_dict(m) -> dict:
    a = np.asarray(m.array if isinstance(m, HermitianMatrix) else m)
    d = {"n": int(a.shape[0]), "re": np.real(a).tolist()}
    if np.iscomplexobj(a) and np.any(np.imag(a)):
        d["im"] = np.imag(a).tolist()
    return d


def parse_matrices(obj) -> list:
    """A single matrix, a list of matrices, or ``{"matrices": [...]}``."""
    if isinstance(obj, dict) and "matrices" in obj:
        obj = obj["matrices"]
    if isinstance(obj, dict):
        return [parse_matrix(obj)]
    if not isinstance(obj, list) or not obj:
        raise ParseError("expected a matrix, a nonempty list of matrices, or {'matrices': [...]}")
    return [parse_matrix(o) for o in obj]


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None


def load_matrices(path) -> list:
    return parse_matrices(load_json(path))


def parse_certify_instance(obj):
    """Return ``(points, c, tau_denominator)`` with block-diagonal points."""
    from .certify import BlockDiag, SymMatrix2

    if not isinstance(obj, dict) or "points" not in obj or "c" not in obj:
        raise ParseError("certification instance needs 'points' and 'c'")
    c = obj["c"]
    if not isinstance(c, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in c):
        raise ParseError("'c' must be a list of integers")
    if not isinstance(obj["points"], list):
        raise ParseError("'points' must be a list")
    points = []
    for p in obj["points"]:
        rows = parse_rational_matrix(p)
        n = len(rows)
        if n < 2:
            raise ParseError("certification points need at least a 2x2 block")
        for i in range(n):
            for j in range(n):
                if i != j and (i >= 2 or j >= 2) and rows[i][j] != 0:
                    raise ParseError("entries outside the leading 2x2 block must be diagonal")
        points.append(BlockDiag(SymMatrix2(rows[0][0], rows[0][1], rows[1][1]),
                                tuple(rows[k][k] for k in range(2, n))))
    tau = obj.get("tau_denominator")
    if tau is not None and (not isinstance(tau, int) or isinstance(tau, bool) or tau < 1):
        raise ParseError("'tau_denominator' must be a positive integer")
    return points, c, tau
