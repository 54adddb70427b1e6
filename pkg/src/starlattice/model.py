"""Core value types and the line-oriented text formats for encodings and height maps.

An encoding file (``.lat``) looks like::

    # optional comments
    2 2
    10
    01

Bit 1 is a positively sloped vertical link (the joint below sits +a from the
joint above), bit 0 a negatively sloped one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class LatticeError(ValueError):
    """Base class for domain errors raised by this package."""


class ParseError(LatticeError):
    pass


class MalformedHeader(ParseError):
    def __init__(self, line: str):
        super().__init__(f"malformed header {line!r}: expected 'A B' with A, B >= 1")
        self.line = line


class BadRowLength(ParseError):
    def __init__(self, row: int, expected: int | None = None, got: int | None = None):
        msg = f"row {row} has wrong length"
        if expected is not None:
            msg += f" (expected {expected}, got {got})"
        super().__init__(msg)
        self.row = row


class BadCharacter(ParseError):
    def __init__(self, row: int, col: int, char: str = ""):
        super().__init__(f"bad character {char!r} at row {row}, column {col}")
        self.row = row
        self.col = col


class NegativeHeight(ParseError):
    def __init__(self, row: int, col: int, value: int):
        super().__init__(f"negative height {value} at row {row}, column {col}")
        self.row = row
        self.col = col


class RaggedRows(ParseError):
    def __init__(self, row: int):
        super().__init__(f"row {row} has a different number of entries than row 1")
        self.row = row


@dataclass(frozen=True)
class GeometryParams:
    """Cell dimensions in mm.

    ``s1`` is the horizontal half-link, ``s2`` the vertical (slanted) link,
    ``crossbar_l`` the horizontal crossbar and ``compression_c`` the vertical
    compression applied to each cell.
    """

    s1: float = 10.0
    s2: float = 20.0
    crossbar_l: float = 20.0
    compression_c: float = 0.0

    def __post_init__(self):
        if not (self.s1 > 0 and self.s2 > 0 and self.crossbar_l > 0):
            raise LatticeError("s1, s2 and crossbar_l must be positive")
        if not (0 <= self.compression_c < 2 * self.s2):
            raise LatticeError(
                f"compression_c={self.compression_c} outside [0, 2*s2={2 * self.s2})"
            )


@dataclass(frozen=True)
class LatticeEncoding:
    """A rows_a x cols_b matrix of link slope bits, stored as nested tuples."""

    bits: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        bits = tuple(tuple(int(b) for b in row) for row in self.bits)
        if not bits or not bits[0]:
            raise LatticeError("an encoding needs at least one row and one column")
        width = len(bits[0])
        for r, row in enumerate(bits):
            if len(row) != width:
                raise LatticeError(f"row {r} has {len(row)} entries, expected {width}")
            if any(b not in (0, 1) for b in row):
                raise LatticeError(f"row {r} holds a value outside {{0, 1}}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_array(cls, arr) -> "LatticeEncoding":
        return cls(tuple(tuple(int(v) for v in row) for row in np.asarray(arr)))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]]) -> "LatticeEncoding":
        return cls.from_array(np.asarray(columns, dtype=np.int8).T)

    @property
    def rows_a(self) -> int:
        return len(self.bits)

    @property
    def cols_b(self) -> int:
        return len(self.bits[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows_a, self.cols_b

    def to_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.int8)

    def column(self, c: int) -> tuple[int, ...]:
        return tuple(row[c] for row in self.bits)

    def flipped(self) -> "LatticeEncoding":
        """Every bit inverted (the mirror image about the vertical axis)."""
        return LatticeEncoding(tuple(tuple(1 - b for b in row) for row in self.bits))

    def transposed(self) -> "LatticeEncoding":
        return LatticeEncoding(tuple(zip(*self.bits)))


class SymbolicOffset(NamedTuple):
    """Exact joint x-offset ``lam * L + alpha * a``."""

    lam: int
    alpha: int

    def __add__(self, other):  # type: ignore[override]
        return SymbolicOffset(self.lam + other[0], self.alpha + other[1])

    def __sub__(self, other):
        return SymbolicOffset(self.lam - other[0], self.alpha - other[1])

    def __str__(self) -> str:
        return format_symbolic(self)


def format_symbolic(off: tuple[int, int]) -> str:
    """Render an offset the way hand tables write it: ``0``, ``a``, ``2L-2a``."""
    lam, alpha = off
    parts = []
    if lam:
        parts.append(f"{lam}L")
    if alpha:
        mag = "a" if abs(alpha) == 1 else f"{abs(alpha)}a"
        if parts:
            parts.append(("+" if alpha > 0 else "-") + mag)
        else:
            parts.append(("" if alpha > 0 else "-") + mag)
    return "".join(parts) or "0"


def parse_symbolic(text: str) -> SymbolicOffset:
    """Inverse of :func:`format_symbolic` (accepts ``1L-a``, ``-a``, ``3L+3a``, ``0``)."""
    s = text.strip().replace(" ", "").replace("−", "-")
    if s == "0":
        return SymbolicOffset(0, 0)
    lam = alpha = 0
    i = 0
    for m in re.finditer(r"([+-]?)(\d*)([La])", s):
        if m.start() != i:
            raise ValueError(f"cannot parse symbolic offset {text!r}")
        i = m.end()
        coef = int(m.group(2)) if m.group(2) else 1
        if m.group(1) == "-":
            coef = -coef
        if m.group(3) == "L":
            lam += coef
        else:
            alpha += coef
    if i != len(s):
        raise ValueError(f"cannot parse symbolic offset {text!r}")
    return SymbolicOffset(lam, alpha)


@dataclass(frozen=True)
class JointGrid:
    """(rows_a + 1) x cols_b symbolic joint offsets."""

    offsets: tuple[tuple[SymbolicOffset, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.offsets), len(self.offsets[0])

    def lam_array(self) -> np.ndarray:
        return np.array([[o.lam for o in row] for row in self.offsets], dtype=np.int64)

    def alpha_array(self) -> np.ndarray:
        return np.array([[o.alpha for o in row] for row in self.offsets], dtype=np.int64)

    def __getitem__(self, rc: tuple[int, int]) -> SymbolicOffset:
        r, c = rc
        return self.offsets[r][c]

    def as_table(self) -> str:
        return "\n".join("\t".join(format_symbolic(o) for o in row) for row in self.offsets)


@dataclass(frozen=True)
class EdgeProfile:
    """Signed slope sequence of an edge column (+1 / -1 per link)."""

    slopes: tuple[int, ...]

    def __post_init__(self):
        slopes = tuple(int(s) for s in self.slopes)
        if not slopes:
            raise LatticeError("an edge profile needs at least one link")
        if any(s not in (1, -1) for s in slopes):
            raise LatticeError("edge slopes must be +1 or -1")
        object.__setattr__(self, "slopes", slopes)

    def __len__(self) -> int:
        return len(self.slopes)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "EdgeProfile":
        return cls(tuple(1 if b else -1 for b in bits))

    @classmethod
    def parse(cls, text: str) -> "EdgeProfile":
        """Parse a line of '+' / '-' characters."""
        s = text.strip()
        bad = [ch for ch in s if ch not in "+-"]
        if bad or not s:
            raise ParseError(f"edge string must be made of '+' and '-', got {text!r}")
        return cls(tuple(1 if ch == "+" else -1 for ch in s))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(1 if s > 0 else 0 for s in self.slopes)

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.slopes)


@dataclass(frozen=True)
class HeightMap:
    """rows_r x layers_s grid of non-negative integer heights.

    Row index runs along a layer; column index selects the layer.
    """

    heights: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        heights = tuple(tuple(int(h) for h in row) for row in self.heights)
        if not heights or not heights[0]:
            raise LatticeError("a height map needs at least one pixel")
        for r, row in enumerate(heights, start=1):
            if len(row) != len(heights[0]):
                raise RaggedRows(r)
            for c, h in enumerate(row, start=1):
                if h < 0:
                    raise NegativeHeight(r, c, h)
        object.__setattr__(self, "heights", heights)

    @property
    def rows_r(self) -> int:
        return len(self.heights)

    @property
    def layers_s(self) -> int:
        return len(self.heights[0])

    def layer(self, s: int) -> tuple[int, ...]:
        return tuple(row[s] for row in self.heights)


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_encoding(text: str) -> LatticeEncoding:
    lines = list(_content_lines(text))
    if not lines:
        raise MalformedHeader("")
    header = lines[0][1].split()
    try:
        if len(header) != 2:
            raise ValueError
        rows_a, cols_b = int(header[0]), int(header[1])
    except ValueError:
        raise MalformedHeader(lines[0][1]) from None
    if rows_a < 1 or cols_b < 1:
        raise MalformedHeader(lines[0][1])

    body = lines[1:]
    rows = []
    for i in range(rows_a):
        if i >= len(body):
            raise BadRowLength(i + 1, cols_b, 0)
        line = body[i][1]
        for j, ch in enumerate(line):
            if ch not in "01":
                raise BadCharacter(i + 1, j + 1, ch)
        if len(line) != cols_b:
            raise BadRowLength(i + 1, cols_b, len(line))
        rows.append(tuple(int(ch) for ch in line))
    if len(body) > rows_a:
        raise BadRowLength(rows_a + 1, 0, len(body[rows_a][1]))
    return LatticeEncoding(tuple(rows))


def serialize_encoding(enc: LatticeEncoding) -> str:
    lines = [f"{enc.rows_a} {enc.cols_b}"]
    lines += ["".join(str(b) for b in row) for row in enc.bits]
    return "\n".join(lines)


def parse_heightmap(text: str) -> HeightMap:
    rows = []
    for _, line in _content_lines(text):
        try:
            rows.append(tuple(int(tok) for tok in line.split()))
        except ValueError:
            raise ParseError(f"non-integer entry in height map line {line!r}") from None
    if not rows:
        raise ParseError("empty height map")
    return HeightMap(tuple(rows))


def serialize_heightmap(hm: HeightMap) -> str:
    return "\n".join(" ".join(str(h) for h in row) for row in hm.heights)
