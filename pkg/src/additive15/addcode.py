"""Additive quaternary codes as binary generator matrices with paired columns.

Coordinate ``i`` of a length-n code owns columns ``2i`` (column A) and
``2i + 1`` (column B). A codeword is stored as a ``2n``-bit int, MSB first.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .gf2core import BitMatrix, nullspace, popcount, rank, rank_of_ints, rref
from .projgeom import LineSystem, PGLine


class DegenerateResult(ValueError):
    pass


class DegenerateLine(ValueError):
    def __init__(self, i: int):
        super().__init__(f"coordinate {i}: generator columns are dependent")
        self.coordinate = i


def pair_mask(n: int) -> int:
    """Bits at the A position of every pair."""
    return int("10" * n, 2) if n else 0


def quaternary_weight(word: int, n: int) -> int:
    """Number of nonzero pairs in a ``2n``-bit word."""
    m = pair_mask(n)
    return popcount((word | (word << 1)) & m)


@dataclass(frozen=True)
class AdditiveCode:
    n: int
    gen: BitMatrix

    def __post_init__(self):
        if self.gen.ncols != 2 * self.n:
            raise ValueError("generator must have 2n columns")
        if rank(self.gen) != self.gen.nrows:
            raise ValueError("generator rows are dependent")

    @property
    def dim2(self) -> int:
        return self.gen.nrows

    @property
    def k(self) -> float:
        return self.dim2 / 2

    @classmethod
    def from_rows(cls, n: int, rows: Iterable[int]) -> AdditiveCode:
        """Code spanned by ``rows`` (a basis is extracted)."""
        r, red, _ = rref(BitMatrix(tuple(rows), 2 * n))
        return cls(n, BitMatrix(red.rows[:r], 2 * n))

    def codewords(self) -> np.ndarray:
        """All ``2^dim2`` codewords; index bit ``i`` (LSB first) selects row ``i``."""
        return span_array(self.gen.rows)

    def coordinate_columns(self, i: int) -> tuple[int, int]:
        return self.gen.column(2 * i), self.gen.column(2 * i + 1)

    def __str__(self) -> str:
        return format_generator(self)


def span_array(rows: Sequence[int]) -> np.ndarray:
    words = np.zeros(1, dtype=np.uint64)
    for r in rows:
        words = np.concatenate([words, words ^ np.uint64(r)])
    return words


def _weights(words: np.ndarray, n: int) -> np.ndarray:
    if 2 * n > 64:
        raise ValueError("lengths above 32 are not supported by the vectorised path")
    m = np.uint64(pair_mask(n))
    return np.bitwise_count((words | (words << np.uint64(1))) & m)


def weight_distribution(c: AdditiveCode) -> dict[int, int]:
    vals, counts = np.unique(_weights(c.codewords(), c.n), return_counts=True)
    return {int(v): int(k) for v, k in zip(vals, counts)}


def min_distance(c: AdditiveCode) -> int:
    """Exhaustive minimum quaternary weight over the nonzero codewords."""
    if c.dim2 < 1:
        raise ValueError("zero code has no minimum distance")
    return int(_weights(c.codewords()[1:], c.n).min())


def line_system(c: AdditiveCode, strict: bool = False) -> LineSystem:
    """Coordinate ``i`` becomes the line spanned by its two generator columns."""
    lines = []
    for i in range(c.n):
        a, b = c.coordinate_columns(i)
        ln = PGLine(a, b)
        if ln.degenerate and strict:
            raise DegenerateLine(i)
        lines.append(ln)
    return LineSystem(c.dim2, tuple(lines))


def to_line_system(c: AdditiveCode) -> LineSystem:
    return line_system(c, strict=True)


def strength(ls: LineSystem) -> int:
    """Largest t such that any t of the lines span a space of dimension 2t."""
    if not ls.lines:
        raise ValueError("empty line system")
    if any(ln.degenerate for ln in ls.lines):
        return 0
    gens = [(ln.a, ln.b) for ln in ls.lines]
    t = 1
    while t < len(gens) and 2 * (t + 1) <= ls.dim:
        for sub in itertools.combinations(gens, t + 1):
            if rank_of_ints(v for pair in sub for v in pair) < 2 * (t + 1):
                return t
        t += 1
    return t


def puncture(c: AdditiveCode, i: int) -> AdditiveCode:
    if not 0 <= i < c.n:
        raise IndexError(i)
    g = c.gen.delete_columns([2 * i, 2 * i + 1])
    if rank(g) < c.dim2:
        raise DegenerateResult(f"puncturing coordinate {i} drops the rank")
    return AdditiveCode(c.n - 1, g)


def shorten(c: AdditiveCode, i: int) -> AdditiveCode:
    """Subcode vanishing at coordinate ``i``, with that coordinate deleted.

    A zero-dimensional result is returned as a code with an empty generator.
    """
    if not 0 <= i < c.n:
        raise IndexError(i)
    cols = c.gen.select_columns([2 * i, 2 * i + 1])
    # messages x with x*cols == 0 form the subcode
    kernel = nullspace(cols.transpose())
    rows = []
    for x in kernel.rows:
        w = 0
        for k in range(c.dim2):
            if (x >> (c.dim2 - 1 - k)) & 1:
                w ^= c.gen.rows[k]
        rows.append(w)
    g = BitMatrix(tuple(rows), 2 * c.n).delete_columns([2 * i, 2 * i + 1])
    return AdditiveCode(c.n - 1, g)


def _swap_pairs(word: int, n: int) -> int:
    m = pair_mask(n)
    return ((word & m) >> 1) | ((word << 1) & m)


def symplectic_form(u: int, v: int, n: int) -> int:
    """sum over pairs of a_i d_i + b_i c_i, for u = (a_i, b_i), v = (c_i, d_i)."""
    return popcount(u & _swap_pairs(v, n)) & 1


def symplectic_dual(c: AdditiveCode) -> AdditiveCode:
    swapped = BitMatrix(tuple(_swap_pairs(r, c.n) for r in c.gen.rows), 2 * c.n)
    return AdditiveCode(c.n, nullspace(swapped))


@dataclass(frozen=True)
class DualDistance:
    value: int
    method: str  # "enumerate" or "strength"


def dual_distance(c: AdditiveCode, method: str = "auto") -> DualDistance:
    """Minimum distance of the symplectic dual.

    ``auto`` enumerates when the dual has binary dimension at most 20 and
    otherwise uses strength + 1 of the line system of ``c``.
    """
    dual_dim = 2 * c.n - c.dim2
    if method == "auto":
        method = "enumerate" if dual_dim <= 20 else "strength"
    if method == "enumerate":
        return DualDistance(min_distance(symplectic_dual(c)), method)
    if method == "strength":
        return DualDistance(strength(to_line_system(c)) + 1, method)
    raise ValueError(method)


def concat_binary(c: AdditiveCode) -> BitMatrix:
    """Map each pair (a, b) to (a, b, a + b): a binary [3n, dim2] generator."""
    rows = []
    for r in c.gen.rows:
        out = 0
        for i in range(c.n):
            a = (r >> (2 * c.n - 1 - 2 * i)) & 1
            b = (r >> (2 * c.n - 2 - 2 * i)) & 1
            out = (out << 3) | (a << 2) | (b << 1) | (a ^ b)
        rows.append(out)
    return BitMatrix(tuple(rows), 3 * c.n)


def binary_min_weight(g: BitMatrix) -> int:
    words = span_array(g.rows)[1:]
    if g.ncols > 64:
        raise ValueError("binary length above 64 unsupported")
    return int(np.bitwise_count(words).min())


def rotate(c: AdditiveCode, s: int) -> AdditiveCode:
    """Cyclic shift of coordinates: pair ``i`` moves to ``i + s``."""
    s %= c.n
    cols = c.gen.columns()
    pairs = [cols[2 * i: 2 * i + 2] for i in range(c.n)]
    pairs = pairs[-s:] + pairs[:-s] if s else pairs
    return AdditiveCode(c.n, BitMatrix.from_columns([x for p in pairs for x in p], c.dim2))


def same_code(c1: AdditiveCode, c2: AdditiveCode) -> bool:
    if c1.n != c2.n or c1.dim2 != c2.dim2:
        return False
    return rref(c1.gen)[1] == rref(c2.gen)[1]


# --- text format ------------------------------------------------------------

_HEADER = re.compile(r"^additive\s+n=(\d+)\s+dim2=(\d+)\s*$")


def format_generator(c: AdditiveCode) -> str:
    lines = [f"additive n={c.n} dim2={c.dim2}"]
    for r in c.gen.rows:
        s = format(r, f"0{2 * c.n}b")
        lines.append(" ".join(s[2 * i: 2 * i + 2] for i in range(c.n)))
    return "\n".join(lines) + "\n"


def parse_generator(text: str) -> AdditiveCode:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty generator file")
    m = _HEADER.match(lines[0])
    if not m:
        raise ValueError(f"bad header: {lines[0]!r}")
    n, dim2 = int(m.group(1)), int(m.group(2))
    body = lines[1:]
    if len(body) != dim2:
        raise ValueError(f"expected {dim2} rows, got {len(body)}")
    rows = []
    for ln in body:
        bits = ln.replace(" ", "")
        if len(bits) != 2 * n or set(bits) - {"0", "1"}:
            raise ValueError(f"bad row: {ln!r}")
        rows.append(int(bits, 2))
    return AdditiveCode(n, BitMatrix(tuple(rows), 2 * n))


def read_generator(path: str | Path) -> AdditiveCode:
    return parse_generator(Path(path).read_text())
