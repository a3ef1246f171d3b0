"""Text formats for point sets, functions and plane multisets.

Set file: one point per line, comma-separated integer coordinates; ``#``
starts a comment.  Function file: coordinates followed by the real and
imaginary parts.  Plane file: normal coordinates, offset and an optional
multiplicity.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)


class SetFileError(ValueError):
    pass


@dataclass
class ParseReport:
    duplicates: int = 0
    reduced: int = 0
    warnings: list = field(default_factory=list)


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_set_text(text: str, p: int, report: ParseReport | None = None) -> np.ndarray:
    report = report if report is not None else ParseReport()
    rows = []
    dim = None
    for lineno, line in _data_lines(text):
        try:
            coords = [int(tok) for tok in line.split(",")]
        except ValueError:
            raise SetFileError(f"line {lineno}: malformed point {line!r}") from None
        if dim is None:
            dim = len(coords)
        elif len(coords) != dim:
            raise SetFileError(f"line {lineno}: expected {dim} coordinates, got {len(coords)}")
        if any(c < 0 or c >= p for c in coords):
            report.reduced += 1
            msg = f"line {lineno}: coordinates reduced mod {p}"
            report.warnings.append(msg)
            log.warning(msg)
            coords = [c % p for c in coords]
        rows.append(coords)
    if not rows:
        raise SetFileError("empty point set")
    arr = np.array(rows, dtype=np.int64)
    uniq, first = np.unique(arr, axis=0, return_index=True)
    dups = len(arr) - len(uniq)
    if dups:
        report.duplicates += dups
        msg = f"{dups} duplicate point(s) collapsed"
        report.warnings.append(msg)
        log.warning(msg)
    # keep file order of first occurrences
    return arr[np.sort(first)]


def read_set_file(path, p: int, report: ParseReport | None = None) -> np.ndarray:
    return parse_set_text(Path(path).read_text(encoding="utf-8"), p, report)


def write_set_file(path, points, header: str | None = None):
    lines = [f"# {header}"] if header else []
    lines += [",".join(str(int(c)) for c in row) for row in np.atleast_2d(points)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_function_text(text: str, p: int):
    """Return (coords, complex values); the last two columns are re, im."""
    coords, vals = [], []
    dim = None
    for lineno, line in _data_lines(text):
        toks = line.split(",")
        try:
            c = [int(t) for t in toks[:-2]]
            re, im = float(toks[-2]), float(toks[-1])
        except (ValueError, IndexError):
            raise SetFileError(f"line {lineno}: malformed function entry {line!r}") from None
        if not c:
            raise SetFileError(f"line {lineno}: missing coordinates")
        if dim is None:
            dim = len(c)
        elif len(c) != dim:
            raise SetFileError(f"line {lineno}: expected {dim} coordinates, got {len(c)}")
        coords.append([x % p for x in c])
        vals.append(complex(re, im))
    if not coords:
        raise SetFileError("empty function file")
    return np.array(coords, dtype=np.int64), np.array(vals, dtype=np.complex128)


def read_function_file(path, p: int):
    return parse_function_text(Path(path).read_text(encoding="utf-8"), p)


def write_function_file(path, coords, values, skip_zero=True):
    out = []
    for c, v in zip(np.atleast_2d(coords), values):
        if skip_zero and v == 0:
            continue
        out.append(",".join(str(int(x)) for x in c) + f",{v.real:.12g},{v.imag:.12g}")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def parse_plane_text(text: str, p: int):
    """Rows 'n1,n2,n3,offset[,multiplicity]' -> list of (normal, offset, mult)."""
    planes = []
    for lineno, line in _data_lines(text):
        try:
            toks = [int(t) for t in line.split(",")]
        except ValueError:
            raise SetFileError(f"line {lineno}: malformed plane {line!r}") from None
        if len(toks) not in (4, 5):
            raise SetFileError(f"line {lineno}: expected 4 or 5 fields, got {len(toks)}")
        mult = toks[4] if len(toks) == 5 else 1
        if mult < 1:
            raise SetFileError(f"line {lineno}: multiplicity must be positive")
        planes.append((tuple(t % p for t in toks[:3]), toks[3] % p, mult))
    if not planes:
        raise SetFileError("empty plane file")
    return planes
