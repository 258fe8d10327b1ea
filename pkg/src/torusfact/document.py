"""Text documents for matrix series and binary dumps of grid samples.

A series document is JSON with one term per line::

    {
      "k": 1,
      "n": 2,
      "entries": [
        {"row": 0, "col": 0, "terms": [
          {"index": [2], "re": 1.0, "im": 0.0}
        ]}
      ]
    }

Entries are sorted by (row, col) and terms by index, floats are written with
their shortest round-trip representation, so serialize(parse(text)) == text
for any document that serialize produced.
"""

from __future__ import annotations

import json
import math
import re

import numpy as np

from .errors import DocumentError, DuplicateTerm, IndexArityMismatch, MalformedField
from .grid import SampledMap
from .series import MatrixSeries, ScalarSeries

_INDEX_KEY = re.compile(r'"index"\s*:')


def _float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite coefficient {x!r}")
    return repr(float(x))


def serialize(a) -> str:
    """Canonical text of a MatrixSeries (a ScalarSeries is written as 1 x 1)."""
    if isinstance(a, ScalarSeries):
        a = MatrixSeries(1, a.dim, {j: [[c]] for j, c in a.terms.items()})
    lines = ["{", f'  "k": {a.dim},', f'  "n": {a.n},', '  "entries": [']
    blocks = []
    for r in range(a.n):
        for c in range(a.n):
            terms = sorted((j, m[r, c]) for j, m in a.coeffs.items() if m[r, c] != 0)
            if not terms:
                continue
            body = [f'    {{"row": {r}, "col": {c}, "terms": [']
            rows = []
            for j, v in terms:
                idx = ", ".join(str(int(i)) for i in j)
                rows.append(f'      {{"index": [{idx}], "re": {_float(v.real)}, "im": {_float(v.imag)}}}')
            body.append(",\n".join(rows))
            body.append("    ]}")
            blocks.append("\n".join(body))
    if blocks:
        lines.append(",\n".join(blocks))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _line_col(text, pos):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _int_field(obj, key, where, line=None):
    if key not in obj:
        raise MalformedField(f"{where}: missing field {key!r}", line=line)
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise MalformedField(f"{where}: field {key!r} must be an integer, got {v!r}", line=line)
    return v


def _is_real(v):
    return not isinstance(v, bool) and isinstance(v, (int, float)) and math.isfinite(v)


def _well_formed_term(term, k):
    if not isinstance(term, dict):
        return False
    idx = term.get("index")
    return (isinstance(idx, list) and len(idx) == k
            and all(isinstance(i, int) and not isinstance(i, bool) for i in idx)
            and _is_real(term.get("re")) and _is_real(term.get("im")))


def _term_error(term, k, where, line, col):
    if not isinstance(term, dict) or "index" not in term:
        raise MalformedField(f"{where}: missing field 'index'", line=line, column=col)
    idx = term["index"]
    if not isinstance(idx, list) or any(isinstance(i, bool) or not isinstance(i, int) for i in idx):
        raise MalformedField(f"{where}: index must be a list of integers", line=line, column=col)
    if len(idx) != k:
        raise IndexArityMismatch(f"{where}: index {idx} has {len(idx)} entries, expected {k}",
                                 line=line, column=col)
    for key in ("re", "im"):
        if not _is_real(term.get(key)):
            raise MalformedField(f"{where}: field {key!r} must be a finite number, "
                                 f"got {term.get(key)!r}", line=line, column=col)


def parse_document(text: str) -> MatrixSeries:
    """Parse a series document; errors carry the line (and column) of the offending part."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedField(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict):
        raise MalformedField("document must be a JSON object", line=1)
    k = _int_field(doc, "k", "document")
    n = _int_field(doc, "n", "document")
    if k < 1 or n < 1:
        raise MalformedField(f"document: k and n must be positive, got k={k}, n={n}")
    entries = doc.get("entries")
    if not isinstance(entries, list):
        raise MalformedField("document: field 'entries' must be a list")

    # position of the i-th "index" key; turned into line/column only on error
    term_pos = iter(m.start() for m in _INDEX_KEY.finditer(text))
    coeffs = {}
    for e, entry in enumerate(entries):
        where = f"entry {e}"
        if not isinstance(entry, dict):
            raise MalformedField(f"{where}: must be an object")
        r = _int_field(entry, "row", where)
        c = _int_field(entry, "col", where)
        if not (0 <= r < n and 0 <= c < n):
            raise MalformedField(f"{where}: (row, col) = ({r}, {c}) outside a {n} x {n} matrix")
        terms = entry.get("terms")
        if not isinstance(terms, list):
            raise MalformedField(f"{where}: field 'terms' must be a list")
        seen = set()
        for t, term in enumerate(terms):
            pos = next(term_pos, None)
            tw = f"{where}, term {t}"
            if not _well_formed_term(term, k):
                line, col = _line_col(text, pos) if pos is not None else (None, None)
                _term_error(term, k, tw, line, col)
            j = tuple(term["index"])
            if j in seen:
                line, col = _line_col(text, pos) if pos is not None else (None, None)
                raise DuplicateTerm(f"{tw}: index {list(j)} repeated in entry ({r}, {c})",
                                    line=line, column=col)
            seen.add(j)
            value = complex(term["re"], term["im"])
            block = coeffs.setdefault(j, np.zeros((n, n), dtype=complex))
            block[r, c] = value
    if len({(entry["row"], entry["col"]) for entry in entries}) != len(entries):
        raise DuplicateTerm("two entries share the same (row, col)")
    return MatrixSeries(n, k, coeffs)


def load_document(path) -> MatrixSeries:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_document(text)
    except DocumentError as exc:
        exc.args = (f"{path}: {exc.args[0]}",) + exc.args[1:]
        raise


def write_samples(path, X: SampledMap):
    """Binary dump: int64 count d, d int64 dims (grid..., n, n), complex128 data; little-endian."""
    s = X.samples
    header = np.asarray([s.ndim] + list(s.shape), dtype="<i8")
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(np.ascontiguousarray(s, dtype="<c16").tobytes())


def read_samples(path) -> SampledMap:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 8:
        raise MalformedField(f"{path}: truncated sample header")
    d = int(np.frombuffer(raw[:8], dtype="<i8")[0])
    if not 3 <= d <= 16 or len(raw) < 8 * (d + 1):
        raise MalformedField(f"{path}: bad dimension count {d}")
    shape = tuple(int(v) for v in np.frombuffer(raw[8:8 * (d + 1)], dtype="<i8"))
    body = raw[8 * (d + 1):]
    expected = int(np.prod(shape)) * 16
    if len(body) != expected:
        raise MalformedField(f"{path}: expected {expected} data bytes for shape {shape}, got {len(body)}")
    return SampledMap(np.frombuffer(body, dtype="<c16").reshape(shape))
