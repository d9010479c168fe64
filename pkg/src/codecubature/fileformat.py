"""Text exchange format for cubature formulas.

A header of ``key: value`` lines in a fixed order, a line ``end-header``,
then one line per point: the weight followed by the coordinates.  Floats
use the shortest decimal that round-trips (Python ``repr``).
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .formula import CubatureFormula
from .moments import MeasureSpec

MAGIC = "codecubature-formula"
VERSION = 1
HEADER_KEYS = (
    "region",
    "measure-n",
    "shell-r",
    "dimension",
    "degree",
    "points",
    "equal-weight",
    "positive",
    "support",
    "support-general",
    "strategy",
    "certificates",
    "generator",
)


class FormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        super().__init__(f"line {line}: {msg}" if line is not None else msg)
        self.line = line


@dataclass
class FormulaFile:
    header: dict
    points: np.ndarray
    weights: np.ndarray
    certificates: list = field(default_factory=list)

    def formula(self) -> CubatureFormula:
        r = self.header.get("shell-r", "none")
        measure = MeasureSpec(self.header["region"], int(self.header["measure-n"]),
                              None if r == "none" else Fraction(r))
        return CubatureFormula(measure, self.points, self.weights, int(self.header["degree"]),
                               {"generator": self.header.get("generator", "")})


def _fmt_generator(params: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in params.items())


def parse_generator(text: str) -> dict:
    out = {}
    for tok in text.split():
        if "=" in tok:
            k, v = tok.split("=", 1)
            out[k] = v
    return out


def emit(formula: CubatureFormula, certificates=(), generator: dict | None = None) -> str:
    m = formula.measure
    flags = formula.flags
    strategy = "+".join(c.strategy for c in certificates) or "none"
    values = {
        "region": m.region,
        "measure-n": str(m.n),
        "shell-r": "none" if m.r is None else str(m.r),
        "dimension": str(formula.dimension),
        "degree": str(formula.degree),
        "points": str(formula.size),
        "equal-weight": str(flags["equal-weight"]).lower(),
        "positive": str(flags["positive"]).lower(),
        "support": flags["support"],
        "support-general": flags["support-general"],
        "strategy": strategy,
        "certificates": " | ".join(c.summary() for c in certificates) or "none",
        "generator": _fmt_generator(generator or {}) or "none",
    }
    lines = [f"{MAGIC} {VERSION}"]
    lines += [f"{k}: {values[k]}" for k in HEADER_KEYS]
    lines.append("end-header")
    for w, p in zip(formula.weights, formula.points):
        lines.append(" ".join(repr(float(v)) for v in (w, *p)))
    return "\n".join(lines) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".cub")
    try:
        with os.fdopen(fd, "w", encoding="ascii") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse(text: str) -> FormulaFile:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(MAGIC):
        raise FormatError(f"missing '{MAGIC}' magic line", 1)
    try:
        version = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise FormatError("bad version", 1) from None
    if version != VERSION:
        raise FormatError(f"unsupported format version {version}", 1)
    header = {}
    i = 1
    while i < len(lines) and lines[i] != "end-header":
        key, sep, value = lines[i].partition(": ")
        if not sep:
            raise FormatError(f"malformed header line {lines[i]!r}", i + 1)
        header[key] = value
        i += 1
    if i == len(lines):
        raise FormatError("no end-header line", i)
    if tuple(header) != HEADER_KEYS:
        raise FormatError(f"header keys {list(header)} differ from {list(HEADER_KEYS)}")
    dim = int(header["dimension"])
    n_pts = int(header["points"])
    body = lines[i + 1 :]
    if len(body) != n_pts:
        raise FormatError(f"header declares {n_pts} points, body has {len(body)}", i + 2)
    data = np.empty((n_pts, dim + 1))
    for j, line in enumerate(body):
        parts = line.split()
        if len(parts) != dim + 1:
            raise FormatError(f"expected {dim + 1} numbers, got {len(parts)}", i + 2 + j)
        try:
            data[j] = [float(v) for v in parts]
        except ValueError:
            raise FormatError(f"unparseable number in {line!r}", i + 2 + j) from None
    return FormulaFile(header, data[:, 1:], data[:, 0])


def read(path: str) -> FormulaFile:
    with open(path, encoding="ascii") as fh:
        return parse(fh.read())
