"""Matrix Market input/output.

Hand-rolled rather than delegated so parse failures carry 1-based line
numbers.  Supported: object ``matrix``, formats ``array`` (column-major
values) and ``coordinate``, fields ``real``/``complex``/``integer``,
symmetry ``general`` only.  Real and integer inputs are promoted to
complex.  Writing always emits ``array complex general`` with 17
significant digits, which round-trips float64 exactly.

Symbol tables are concatenations of such blocks, each tagged with a
``%xi <components...>`` comment line between the header and the size line.
"""

from __future__ import annotations

import math
import os
from typing import IO, Iterable

import numpy as np

from .errors import DimensionError, MatrixMarketError

_FORMATS = ("array", "coordinate")
_FIELDS = ("real", "complex", "integer")


class _Cursor:
    def __init__(self, fileobj: IO[str]):
        self.lines = fileobj.read().splitlines()
        self.pos = 0

    def at_end(self) -> bool:
        p = self.pos
        while p < len(self.lines):
            if self.lines[p].strip():
                return False
            p += 1
        return True

    def next_content(self) -> tuple[str, int]:
        """Next nonblank line and its 1-based number."""
        while self.pos < len(self.lines):
            line = self.lines[self.pos]
            self.pos += 1
            if line.strip():
                return line.strip(), self.pos
        raise MatrixMarketError("unexpected end of file", len(self.lines))


def _parse_value(tokens, field, line_no):
    try:
        if field == "complex":
            if len(tokens) != 2:
                raise ValueError
            value = complex(float(tokens[0]), float(tokens[1]))
        else:
            if len(tokens) != 1:
                raise ValueError
            value = complex(float(tokens[0]))
    except ValueError:
        raise MatrixMarketError(
            f"expected {'two numbers' if field == 'complex' else 'one number'}, got {tokens!r}",
            line_no,
        ) from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise MatrixMarketError(f"non-finite entry {tokens!r}", line_no)
    return value


def _parse_block(cur: _Cursor) -> tuple[np.ndarray, np.ndarray | None]:
    line, no = cur.next_content()
    if not line.lower().startswith("%%matrixmarket"):
        raise MatrixMarketError("expected '%%MatrixMarket' header", no)
    parts = line.split()
    if len(parts) != 5:
        raise MatrixMarketError(
            "header must read '%%MatrixMarket matrix <format> <field> general'", no
        )
    obj, fmt, field, sym = (p.lower() for p in parts[1:])
    if obj != "matrix":
        raise MatrixMarketError(f"unsupported object {obj!r}", no)
    if fmt not in _FORMATS:
        raise MatrixMarketError(f"unsupported format {fmt!r}", no)
    if field not in _FIELDS:
        raise MatrixMarketError(f"unsupported field {field!r}", no)
    if sym != "general":
        raise MatrixMarketError(f"unsupported symmetry {sym!r} (only 'general')", no)

    xi = None
    while True:
        line, no = cur.next_content()
        if not line.startswith("%"):
            break
        body = line[1:].strip()
        if body.startswith("xi"):
            try:
                xi = np.array([float(tok) for tok in body.split()[1:]], dtype=float)
            except ValueError:
                raise MatrixMarketError(f"malformed xi comment {line!r}", no) from None
            if xi.size == 0:
                raise MatrixMarketError("xi comment carries no components", no)

    size_tokens = line.split()
    expected = 3 if fmt == "coordinate" else 2
    if len(size_tokens) != expected or not all(t.lstrip("+-").isdigit() for t in size_tokens):
        raise MatrixMarketError(
            f"size line must hold {expected} integers, got {line!r}", no
        )
    dims = [int(t) for t in size_tokens]
    rows, cols = dims[0], dims[1]
    if rows < 1 or cols < 1:
        raise MatrixMarketError(f"dimensions must be positive, got {rows}x{cols}", no)

    data = np.zeros((rows, cols), dtype=complex)
    if fmt == "array":
        needed = rows * cols
        for idx in range(needed):
            line, no = cur.next_content()
            if line.startswith("%"):
                raise MatrixMarketError("comment inside data section", no)
            value = _parse_value(line.split(), field, no)
            col, row = divmod(idx, rows)
            data[row, col] = value
    else:
        nnz = dims[2]
        for _ in range(nnz):
            line, no = cur.next_content()
            if line.startswith("%"):
                raise MatrixMarketError("comment inside data section", no)
            tokens = line.split()
            if len(tokens) < 3:
                raise MatrixMarketError(f"coordinate entry too short: {line!r}", no)
            try:
                i, j = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise MatrixMarketError(f"bad coordinate indices in {line!r}", no) from None
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise MatrixMarketError(
                    f"index ({i}, {j}) outside {rows}x{cols}", no
                )
            data[i - 1, j - 1] += _parse_value(tokens[2:], field, no)
    return data, xi


def _as_text_stream(source, mode="r"):
    if isinstance(source, (str, os.PathLike)):
        return open(source, mode, encoding="ascii"), True
    return source, False


def read_matrix(source, require_square: bool = True) -> np.ndarray:
    """Read a single Matrix Market block from a path or text stream."""
    fh, owned = _as_text_stream(source)
    try:
        data, _ = _parse_block(_Cursor(fh))
    finally:
        if owned:
            fh.close()
    if require_square and data.shape[0] != data.shape[1]:
        raise DimensionError(f"matrix must be square, got shape {data.shape}")
    return data


def write_matrix(target, a: np.ndarray) -> None:
    """Write a dense complex matrix as ``array complex general``."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {arr.shape}")
    fh, owned = _as_text_stream(target, "w")
    try:
        fh.write("%%MatrixMarket matrix array complex general\n")
        fh.write(f"{arr.shape[0]} {arr.shape[1]}\n")
        for col in range(arr.shape[1]):
            for row in range(arr.shape[0]):
                v = arr[row, col]
                fh.write(f"{v.real:.17g} {v.imag:.17g}\n")
    finally:
        if owned:
            fh.close()


def read_symbol_table(source) -> list[tuple[np.ndarray, np.ndarray]]:
    """Read a concatenated symbol table: ``[(xi, matrix), ...]``.

    Every block must carry a ``%xi`` comment.
    """
    fh, owned = _as_text_stream(source)
    try:
        cur = _Cursor(fh)
        out = []
        while not cur.at_end():
            start = cur.pos
            data, xi = _parse_block(cur)
            if xi is None:
                raise MatrixMarketError("symbol table block lacks a %xi comment", start + 1)
            out.append((xi, data))
        return out
    finally:
        if owned:
            fh.close()


def write_symbol_table(target, entries: Iterable[tuple]) -> None:
    """Write ``(xi, matrix)`` pairs as a concatenated symbol table."""
    fh, owned = _as_text_stream(target, "w")
    try:
        for xi, matrix in entries:
            arr = np.asarray(matrix, dtype=complex)
            xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
            fh.write("%%MatrixMarket matrix array complex general\n")
            fh.write("%xi " + " ".join(f"{x:.17g}" for x in xi_arr) + "\n")
            fh.write(f"{arr.shape[0]} {arr.shape[1]}\n")
            for col in range(arr.shape[1]):
                for row in range(arr.shape[0]):
                    v = arr[row, col]
                    fh.write(f"{v.real:.17g} {v.imag:.17g}\n")
    finally:
        if owned:
            fh.close()
