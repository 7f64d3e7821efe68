"""Serialization of matrices, codes, multiplication tables and witnesses.

All JSON output is canonical: sorted keys, codewords and basis matrices in key
order, one trailing newline.  Importing then exporting a canonical file gives
the same bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import _batch
from .algebra import Quasifield
from .code import RankCode, is_linear_over
from .errors import MRDError, ParseError, ValidationError
from .gf import FieldSpec, field_from_descriptor
from .matgf import MatGF, rref

DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def read_json(path) -> object:
    return loads(Path(path).read_text(encoding="utf-8"))


def write_text(path, text: str):
    Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# fields and matrices


def field_from_json(d) -> FieldSpec:
    if not isinstance(d, dict) or not {"p", "e", "modulus"} <= d.keys():
        raise ValidationError("field descriptor needs p, e and modulus")
    try:
        return field_from_descriptor(d)
    except MRDError as exc:
        raise ValidationError(f"invalid field descriptor: {exc}") from None


def _entries(F: FieldSpec, rows, m=None, n=None) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValidationError("matrix entries must be a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows) or width == 0:
        raise ValidationError("matrix rows have different lengths")
    if not all(isinstance(x, int) and not isinstance(x, bool) for r in rows for x in r):
        raise ValidationError("matrix entries must be integers")
    A = np.array(rows, dtype=np.int64)
    if (A < 0).any() or (A >= F.q).any():
        raise ValidationError(f"matrix entries must be element indices in [0, {F.q})")
    if (m is not None and A.shape[0] != m) or (n is not None and A.shape[1] != n):
        raise ValidationError(f"matrix of shape {A.shape}, expected {m}x{n}")
    return A


def matrix_to_json(A) -> dict:
    a = A.a if isinstance(A, MatGF) else np.asarray(A)
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "entries": a.tolist()}


def matrix_from_json(d, F: FieldSpec) -> MatGF:
    if not isinstance(d, dict) or "entries" not in d:
        raise ValidationError("matrix JSON needs entries")
    A = _entries(F, d["entries"], d.get("rows"), d.get("cols"))
    return MatGF(F, A)


def element_to_text(F: FieldSpec, x: int) -> str:
    """Base-p digits of the element index, most significant first, e digits wide."""
    return "".join(DIGITS[c] for c in reversed(F.coeffs(int(x))))


def matrix_to_text(A, F: FieldSpec | None = None) -> str:
    if isinstance(A, MatGF):
        F, a = A.field, A.a
    else:
        a = np.asarray(A)
    return "".join(" ".join(element_to_text(F, x) for x in row) + "\n" for row in a)


def matrix_from_text(text: str, F: FieldSpec) -> MatGF:
    rows = []
    for ln, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        row = []
        col = 1
        for tok in line.split():
            col = line.index(tok, col - 1) + 1
            if len(tok) != F.e:
                raise ParseError(f"entry {tok!r} must have {F.e} base-{F.p} digits", ln, col)
            coeffs = []
            for ch in reversed(tok.lower()):
                v = DIGITS.find(ch)
                if v < 0 or v >= F.p:
                    raise ParseError(f"invalid base-{F.p} digit {ch!r}", ln, col)
                coeffs.append(v)
            row.append(F.index(coeffs))
            col += len(tok)
        rows.append(row)
    if not rows:
        raise ParseError("empty matrix", 1, 1)
    if any(len(r) != len(rows[0]) for r in rows):
        raise ParseError("rows have different lengths", len(rows), 1)
    return MatGF(F, np.array(rows, dtype=np.int64))


# ---------------------------------------------------------------------------
# codes


def code_to_json(C: RankCode, linear: bool | None = None) -> dict:
    """Basis form for F-linear codes, element list otherwise.

    The basis is the reduced row echelon form of the flattened matrices, so it
    depends only on the code.
    """
    if linear is None:
        linear = is_linear_over(C, C.field) and len(C) > 1
    out = {"field": C.field.descriptor(), "m": C.m, "n": C.n, "linear": bool(linear)}
    if linear:
        B = C.linear_basis(C.field)
        R, _ = rref(C.field, B.reshape(len(B), -1))
        R = R.reshape(-1, C.m, C.n)
        out["basis"] = [b.tolist() for b in R[np.argsort(_batch.pack(C.field, R), kind="stable")]]
    else:
        out["elements"] = [e.tolist() for e in C.elements]
    return out


def code_from_json(d) -> RankCode:
    if not isinstance(d, dict):
        raise ValidationError("code JSON must be an object")
    for key in ("field", "m", "n"):
        if key not in d:
            raise ValidationError(f"code JSON is missing {key!r}")
    F = field_from_json(d["field"])
    m, n = d["m"], d["n"]
    if not all(isinstance(v, int) and v > 0 for v in (m, n)):
        raise ValidationError("m and n must be positive integers")
    if ("basis" in d) == ("elements" in d):
        raise ValidationError("code JSON needs exactly one of basis or elements")
    mats = d.get("basis", d.get("elements"))
    if not isinstance(mats, list) or not mats:
        raise ValidationError("code JSON needs a non-empty matrix list")
    stack = np.stack([_entries(F, M, m, n) for M in mats])
    try:
        if "basis" in d:
            C = RankCode(F, m, n, basis=stack)
        else:
            C = RankCode(F, m, n, elements=stack)
    except ValidationError:
        raise
    except MRDError as exc:
        raise ValidationError(str(exc)) from None
    if d.get("linear") and not is_linear_over(C, F):
        raise ValidationError("code is flagged linear but is not closed under F-linear combinations")
    return C


def export_code(C: RankCode, path=None, linear: bool | None = None) -> str:
    text = dumps(code_to_json(C, linear))
    if path is not None:
        write_text(path, text)
    return text


def import_code(path) -> RankCode:
    return code_from_json(read_json(path))


# ---------------------------------------------------------------------------
# multiplication tables


def table_to_json(Q: Quasifield) -> dict:
    return {"p": Q.p, "dim": Q.dim, "identity": Q.identity, "table": Q.table.reshape(-1).tolist()}


def table_from_json(d) -> Quasifield:
    if not isinstance(d, dict) or not {"p", "dim", "table"} <= d.keys():
        raise ValidationError("table JSON needs p, dim and table")
    p, dim, flat = d["p"], d["dim"], d["table"]
    if not (isinstance(p, int) and isinstance(dim, int) and p > 1 and dim > 0):
        raise ValidationError("p and dim must be positive integers")
    N = p**dim
    if not isinstance(flat, list) or len(flat) != N * N:
        raise ValidationError(f"table must list {N * N} products")
    T = np.array(flat, dtype=np.int64)
    if (T < 0).any() or (T >= N).any():
        raise ValidationError("table entries must be element indices")
    try:
        return Quasifield(p, dim, T.reshape(N, N), identity=d.get("identity"))
    except MRDError as exc:
        raise ValidationError(str(exc)) from None


def export_table(Q: Quasifield, path=None) -> str:
    text = dumps(table_to_json(Q))
    if path is not None:
        write_text(path, text)
    return text


def import_table(path) -> Quasifield:
    return table_from_json(read_json(path))
