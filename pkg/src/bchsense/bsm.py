"""Text formats: BSM1 matrix files and one-value-per-line vector files.

A BSM1 file is::

    BSM1 <KIND> <rows> <cols>
    # mtilde=4 i=3 primpoly=0x13 parity=even
    # orbit <rep_col> <mu>
    +-+-...            (rows lines of cols characters from "+-0")

Entries are stored unnormalised; a column is normalised by sqrt of its
nonzero count when read.
"""

from __future__ import annotations

import io
import os
from pathlib import Path

import numpy as np

from .matrices import KINDS, SensingMatrix

_TO_CHAR = np.frombuffer(b"-0+", dtype=np.uint8)


class ParseError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


def _meta_line(meta: dict) -> str | None:
    if not meta:
        return None
    return "# " + " ".join(f"{k}={v}" for k, v in meta.items())


def format_bsm(matrix: SensingMatrix) -> str:
    out = io.StringIO()
    write_bsm(matrix, out)
    return out.getvalue()


def write_bsm(matrix: SensingMatrix, target) -> None:
    """Write ``matrix`` to a path or text stream."""
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            write_bsm(matrix, fh)
        return
    target.write(f"BSM1 {matrix.kind} {matrix.rows} {matrix.cols}\n")
    line = _meta_line(matrix.meta)
    if line:
        target.write(line + "\n")
    for rep, mu in matrix.orbit_table or ():
        target.write(f"# orbit {rep} {mu}\n")
    dense = matrix.dense()
    chars = _TO_CHAR[dense.astype(np.int64) + 1]
    for row in chars:
        target.write(row.tobytes().decode("ascii"))
        target.write("\n")


def _parse_value(v: str):
    try:
        return int(v)
    except ValueError:
        return v


def read_bsm(source) -> SensingMatrix:
    """Parse a BSM1 file from a path or text stream."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return read_bsm(fh)
    lines = source.read().splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    head = lines[0].split()
    if len(head) != 4 or head[0] != "BSM1":
        raise ParseError("expected header 'BSM1 <KIND> <rows> <cols>'", 1)
    kind = head[1]
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}", 1)
    try:
        rows, cols = int(head[2]), int(head[3])
    except ValueError:
        raise ParseError("rows and cols must be integers", 1) from None
    if rows < 1 or cols < 1:
        raise ParseError("rows and cols must be positive", 1)

    meta: dict = {}
    orbits: list[tuple[int, int]] = []
    body: list[tuple[int, str]] = []
    for lineno, text in enumerate(lines[1:], start=2):
        if text.startswith("#"):
            tokens = text[1:].split()
            if tokens[:1] == ["orbit"]:
                if len(tokens) != 3:
                    raise ParseError("orbit record needs '<rep_col> <mu>'", lineno)
                try:
                    orbits.append((int(tokens[1]), int(tokens[2])))
                except ValueError:
                    raise ParseError("orbit record fields must be integers", lineno) from None
            else:
                for tok in tokens:
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        meta[k] = _parse_value(v)
            continue
        if body or text:
            body.append((lineno, text))
    while body and not body[-1][1]:
        body.pop()
    if len(body) != rows:
        raise ParseError(f"expected {rows} matrix rows, found {len(body)}",
                         body[-1][0] if body else len(lines))

    dense = np.empty((rows, cols), dtype=np.int8)
    lut = np.full(256, 127, dtype=np.int8)
    lut[ord("+")], lut[ord("-")], lut[ord("0")] = 1, -1, 0
    for r, (lineno, text) in enumerate(body):
        if len(text) != cols:
            raise ParseError(f"row has {len(text)} characters, expected {cols}", lineno)
        vals = lut[np.frombuffer(text.encode("latin-1"), dtype=np.uint8)]
        if np.any(vals == 127):
            bad = text[int(np.argmax(vals == 127))]
            raise ParseError(f"invalid character {bad!r}", lineno)
        dense[r] = vals
    try:
        matrix = SensingMatrix.from_dense(kind, dense, orbits or None, meta)
        if orbits:
            matrix.check_orbits()
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    return matrix


def write_vector(path, values, comment: str | None = None) -> None:
    """One value per line with 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        for v in np.asarray(values, dtype=np.float64):
            fh.write(f"{v:.17g}\n")


def read_vector(path) -> np.ndarray:
    values = []
    for lineno, text in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        s = text.strip()
        if not s or s.startswith("#"):
            continue
        try:
            values.append(float(s))
        except ValueError:
            raise ParseError(f"not a number: {s!r}", lineno) from None
    return np.array(values, dtype=np.float64)
