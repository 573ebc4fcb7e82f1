"""Bit-packed linear algebra over GF(2).

Rows are Python ints; column ``j`` of a matrix with ``ncols`` columns lives at
bit ``ncols - 1 - j`` so that ``format(row, f"0{ncols}b")`` prints the row left
to right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class RankDeficient(ValueError):
    """Raised when a block that must have full column rank does not."""


def popcount(x: int) -> int:
    return bin(x).count("1")


def parity(x: int) -> int:
    return popcount(x) & 1


@dataclass(frozen=True)
class BitVector:
    width: int
    bits: int

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("width must be positive")
        if self.bits >> self.width:
            raise ValueError("bits set beyond width")

    @classmethod
    def from_str(cls, s: str) -> BitVector:
        s = s.replace(" ", "")
        return cls(len(s), int(s, 2))

    def __getitem__(self, i: int) -> int:
        return (self.bits >> (self.width - 1 - i)) & 1

    def __str__(self) -> str:
        return format(self.bits, f"0{self.width}b")


@dataclass(frozen=True)
class BitMatrix:
    """Immutable binary matrix; ``rows`` holds one int per row."""

    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError("row wider than ncols")

    @classmethod
    def from_strings(cls, lines: Iterable[str]) -> BitMatrix:
        lines = [ln.replace(" ", "") for ln in lines]
        if not lines:
            raise ValueError("need at least one row to infer width; use zeros()")
        ncols = len(lines[0])
        if any(len(ln) != ncols for ln in lines):
            raise ValueError("ragged rows")
        return cls(tuple(int(ln, 2) if ln else 0 for ln in lines), ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> BitMatrix:
        return cls((0,) * nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(tuple(1 << (n - 1 - i) for i in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.rows[i] >> (self.ncols - 1 - j)) & 1

    def column(self, j: int) -> int:
        """Column ``j`` as an int of width ``nrows`` (row 0 is the MSB)."""
        shift = self.ncols - 1 - j
        v = 0
        for r in self.rows:
            v = (v << 1) | ((r >> shift) & 1)
        return v

    def columns(self) -> list[int]:
        return [self.column(j) for j in range(self.ncols)]

    @classmethod
    def from_columns(cls, cols: Sequence[int], nrows: int) -> BitMatrix:
        rows = []
        for i in range(nrows):
            shift = nrows - 1 - i
            r = 0
            for c in cols:
                r = (r << 1) | ((c >> shift) & 1)
            rows.append(r)
        return cls(tuple(rows), len(cols))

    def transpose(self) -> BitMatrix:
        return BitMatrix(tuple(self.columns()), self.nrows)

    def select_columns(self, cols: Sequence[int]) -> BitMatrix:
        return BitMatrix.from_columns([self.column(j) for j in cols], self.nrows)

    def delete_columns(self, cols: Iterable[int]) -> BitMatrix:
        drop = set(cols)
        return self.select_columns([j for j in range(self.ncols) if j not in drop])

    def stack(self, other: BitMatrix) -> BitMatrix:
        if other.ncols != self.ncols:
            raise ValueError("column mismatch")
        return BitMatrix(self.rows + other.rows, self.ncols)

    def to_strings(self) -> list[str]:
        return [format(r, f"0{self.ncols}b") for r in self.rows]

    def __str__(self) -> str:
        return "\n".join(self.to_strings())


def rref(m: BitMatrix) -> tuple[int, BitMatrix, list[int]]:
    """Reduced row echelon form.

    Pivots are taken leftmost first; each pivot column is cleared above and
    below, and zero rows sink to the bottom. The result is canonical for the
    row space, so it can be used as a dictionary key.
    """
    rows = list(m.rows)
    nrows, ncols = len(rows), m.ncols
    pivots: list[int] = []
    r = 0
    for j in range(ncols):
        if r == nrows:
            break
        bit = 1 << (ncols - 1 - j)
        piv = next((i for i in range(r, nrows) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(nrows):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivots.append(j)
        r += 1
    return r, BitMatrix(tuple(rows), ncols), pivots


def rank(m: BitMatrix) -> int:
    return rank_of_ints(m.rows)


def rank_of_ints(vectors: Iterable[int]) -> int:
    """Rank of a collection of int-packed vectors (any common width)."""
    basis: dict[int, int] = {}  # leading bit position -> vector
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


def span(vectors: Iterable[int]) -> set[int]:
    """All elements of the span, including 0."""
    out = {0}
    for v in vectors:
        if v not in out:
            out |= {x ^ v for x in out}
    return out


def reduce_vector(v: int, echelon_rows: Sequence[int], pivots: Sequence[int], ncols: int) -> int:
    """Reduce ``v`` against an RREF basis; the result is a canonical coset representative."""
    for row, j in zip(echelon_rows, pivots):
        if (v >> (ncols - 1 - j)) & 1:
            v ^= row
    return v


def in_span(v: int, m: BitMatrix) -> bool:
    r, red, piv = rref(m)
    return reduce_vector(v, red.rows[:r], piv, m.ncols) == 0


def nullspace(m: BitMatrix) -> BitMatrix:
    """Basis (as rows) of ``{x : m x^T = 0}``."""
    r, red, piv = rref(m)
    n = m.ncols
    free = [j for j in range(n) if j not in set(piv)]
    basis = []
    for f in free:
        x = 1 << (n - 1 - f)
        for row, p in zip(red.rows[:r], piv):
            if (row >> (n - 1 - f)) & 1:
                x |= 1 << (n - 1 - p)
        basis.append(x)
    return BitMatrix(tuple(basis), n)


def solve(a: BitMatrix, b: int) -> int | None:
    """One solution ``x`` (width ``a.nrows``) of ``x a = b`` or None.

    ``b`` is a row vector of width ``a.ncols``; ``x a`` is the XOR of the rows
    of ``a`` selected by ``x``.
    """
    n = a.nrows
    # augmented transpose: each column of a becomes an equation on x
    aug = BitMatrix(tuple((c << 1) | ((b >> (a.ncols - 1 - j)) & 1)
                          for j, c in enumerate(a.columns())), n + 1)
    r, red, piv = rref(aug)
    if n in piv:
        return None
    x = 0
    for row, p in zip(red.rows[:r], piv):
        if row & 1:
            x |= 1 << (n - 1 - p)
    return x


def eliminate_top(g: BitMatrix, cols: Sequence[int], top_rows: int) -> BitMatrix:
    """Zero the entries of rows ``< top_rows`` in ``cols`` by adding bottom rows.

    Only combinations of the bottom rows are added to top rows, so the row
    space and every bottom row are unchanged.
    """
    bottom = BitMatrix(g.rows[top_rows:], g.ncols).select_columns(cols)
    if rank(bottom) != len(cols):
        raise RankDeficient(f"bottom block on columns {list(cols)} has rank {rank(bottom)} < {len(cols)}")
    rows = list(g.rows)
    sub = BitMatrix(tuple(rows[:top_rows]), g.ncols).select_columns(cols)
    for i in range(top_rows):
        x = solve(bottom, sub.rows[i])
        assert x is not None
        nb = g.nrows - top_rows
        for k in range(nb):
            if (x >> (nb - 1 - k)) & 1:
                rows[i] ^= g.rows[top_rows + k]
    return BitMatrix(tuple(rows), g.ncols)
