"""Incidence and weight calculus in PG(m, 2).

Points are nonzero ints of width ``dim`` (the vector-space dimension, so the
projective space is PG(dim - 1, 2)). Hyperplanes are given by normal vectors:
``p`` lies on ``n^perp`` iff ``parity(p & n) == 0``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .gf2core import BitMatrix, parity, rank_of_ints, reduce_vector, rref


@dataclass(frozen=True, order=True)
class PGLine:
    """Line spanned by two points; the third point is ``a ^ b``."""

    a: int
    b: int

    @property
    def degenerate(self) -> bool:
        return self.a == 0 or self.b == 0 or self.a == self.b

    @property
    def points(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.a ^ self.b)

    def canonical(self) -> PGLine:
        if self.degenerate:
            return self
        p = sorted(self.points)
        return PGLine(p[0], p[1])

    def __contains__(self, p: int) -> bool:
        return p in self.points


def line(a: int, b: int) -> PGLine:
    """Canonical line through ``a`` and ``b``."""
    ln = PGLine(a, b)
    if ln.degenerate:
        raise ValueError(f"points {a}, {b} do not span a line")
    return ln.canonical()


@dataclass(frozen=True)
class LineSystem:
    """Multiset of lines in PG(dim - 1, 2).

    Lines are stored as given (representative pairs are kept); degenerate
    pairs are allowed here so that strength can report them.
    """

    dim: int
    lines: tuple[PGLine, ...]

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))

    @property
    def codepoints(self) -> list[int]:
        """All points on the lines, with multiplicity (3 per line)."""
        return [p for ln in self.lines if not ln.degenerate for p in ln.points]

    def __len__(self) -> int:
        return len(self.lines)


@dataclass(frozen=True)
class WeightFunction:
    """Point weights of a PG(dim - 1, 2); ``weights[p]`` for p in 1..2^dim - 1."""

    dim: int
    weights: tuple[int, ...]

    def __getitem__(self, p: int) -> int:
        return self.weights[p]

    @property
    def points(self) -> range:
        return range(1, 1 << self.dim)

    def total(self) -> int:
        return sum(self.weights[1:])

    def counts(self) -> Counter:
        return Counter(self.weights[1:])

    @property
    def m(self) -> tuple[int, int, int]:
        c = self.counts()
        return (c[1], c[2], c[3])

    def weight_of(self, points: Iterable[int]) -> int:
        return sum(self.weights[p] for p in points)

    @classmethod
    def from_dict(cls, dim: int, w: dict[int, int]) -> WeightFunction:
        return cls(dim, tuple(w.get(p, 0) if p else 0 for p in range(1 << dim)))


# --- small projective spaces ----------------------------------------------


@lru_cache(maxsize=None)
def pg_lines(dim: int) -> tuple[tuple[int, int, int], ...]:
    """All lines of PG(dim - 1, 2) as sorted point triples, sorted."""
    n = 1 << dim
    return tuple(sorted({tuple(sorted((a, b, a ^ b))) for a in range(1, n) for b in range(a + 1, n)}))


@lru_cache(maxsize=None)
def hyperplane_points(dim: int, normal: int) -> frozenset[int]:
    return frozenset(p for p in range(1, 1 << dim) if not parity(p & normal))


def apply_linear(images: Sequence[int], p: int, dim: int) -> int:
    """Image of ``p`` under the map sending basis vector ``i`` (MSB first) to ``images[i]``."""
    out = 0
    for i in range(dim):
        if (p >> (dim - 1 - i)) & 1:
            out ^= images[i]
    return out


@lru_cache(maxsize=None)
def general_linear_group(dim: int) -> tuple[tuple[int, ...], ...]:
    """GL(dim, 2) as tuples of basis images; 168 elements for dim 3, 20160 for dim 4."""
    n = 1 << dim
    out = []

    def extend(prefix: list[int], spanned: set[int]):
        if len(prefix) == dim:
            out.append(tuple(prefix))
            return
        for v in range(1, n):
            if v not in spanned:
                extend(prefix + [v], spanned | {x ^ v for x in spanned})

    extend([], {0})
    return tuple(out)


# --- weights ----------------------------------------------------------------


def subspace_weight(ls: LineSystem, basis: Sequence[int]) -> int:
    """Number of codepoints (with multiplicity) inside ``span(basis)``."""
    basis = [b for b in basis]
    if not basis:
        return 0
    if rank_of_ints(basis) != len(basis):
        raise ValueError("basis vectors are dependent")
    m = BitMatrix(tuple(basis), ls.dim)
    r, red, piv = rref(m)
    rows = red.rows[:r]
    return sum(1 for p in ls.codepoints if reduce_vector(p, rows, piv, ls.dim) == 0)


@dataclass(frozen=True)
class FactorSpace:
    """Quotient of the ambient space by ``span(basis)``.

    Quotient coordinates are the non-pivot columns of the reduced basis, in
    column order, so ``project`` is linear and canonical.
    """

    dim: int
    basis: tuple[int, ...]
    _rows: tuple[int, ...] = field(init=False, repr=False)
    _piv: tuple[int, ...] = field(init=False, repr=False)
    _free: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.basis:
            r, red, piv = rref(BitMatrix(tuple(self.basis), self.dim))
            if r != len(self.basis):
                raise ValueError("basis vectors are dependent")
            rows = red.rows[:r]
        else:
            rows, piv = (), []
        object.__setattr__(self, "_rows", tuple(rows))
        object.__setattr__(self, "_piv", tuple(piv))
        object.__setattr__(self, "_free", tuple(j for j in range(self.dim) if j not in set(piv)))

    @property
    def quotient_dim(self) -> int:
        return len(self._free)

    def project(self, v: int) -> int:
        """Quotient point of ``v``; 0 means ``v`` lies in the base subspace."""
        v = reduce_vector(v, self._rows, self._piv, self.dim)
        out = 0
        for j in self._free:
            out = (out << 1) | ((v >> (self.dim - 1 - j)) & 1)
        return out

    def lift(self, q: int) -> int:
        """A representative of quotient point ``q``."""
        k = self.quotient_dim
        v = 0
        for i, j in enumerate(self._free):
            if (q >> (k - 1 - i)) & 1:
                v |= 1 << (self.dim - 1 - j)
        return v


def factor_weights(ls: LineSystem, u: Sequence[int]) -> WeightFunction:
    """Weights on the factor space mod ``span(u)``.

    ``w(P)`` counts codepoints in the preimage of P that are outside U.
    """
    fs = FactorSpace(ls.dim, tuple(u))
    w = [0] * (1 << fs.quotient_dim)
    for p in ls.codepoints:
        q = fs.project(p)
        if q:
            w[q] += 1
    return WeightFunction(fs.quotient_dim, tuple(w))


def averaging_bounds(total: int, hyperplane_max: int, ambient_dim: int, levels: int | None = None) -> list[int]:
    """Maximum weights of subspaces of codimension 1, 2, ... by averaging.

    A codimension-c subspace S lies in 2^c - 1 subspaces of codimension c - 1,
    which partition the points outside S, so ``i + (2^c - 1)(b - i) >= total``
    with ``b`` the previous bound. Returns one value per codimension, largest
    subspace first.
    """
    if total <= 0:
        raise ValueError("total must be positive")
    if levels is None:
        levels = min(5, ambient_dim - 1)
    bounds = [min(hyperplane_max, total)]
    for c in range(2, levels + 1):
        b = bounds[-1]
        k = (1 << c) - 1
        i = (k * b - total) // (k - 1)
        bounds.append(max(0, min(i, b)))
    return bounds


@dataclass(frozen=True)
class HyperplaneProfile:
    normals: np.ndarray  # (H,)
    inside: np.ndarray  # lines contained in each hyperplane
    weight: np.ndarray  # codepoints on each hyperplane

    @property
    def max_inside(self) -> int:
        return int(self.inside.max())

    @property
    def max_weight(self) -> int:
        return int(self.weight.max())


def parity_table(bits: int) -> np.ndarray:
    t = np.zeros(1 << bits, dtype=np.uint8)
    for b in range(bits):
        t[1 << b:2 << b] = t[: 1 << b] ^ 1
    return t


def hyperplane_line_profile(ls: LineSystem) -> HyperplaneProfile:
    """Per hyperplane: how many lines it contains and its weight."""
    if ls.dim > 12:
        raise ValueError("hyperplane enumeration limited to dimension 12")
    par = parity_table(ls.dim)
    normals = np.arange(1, 1 << ls.dim, dtype=np.int64)
    inside = np.zeros(normals.shape, dtype=np.int64)
    weight = np.zeros(normals.shape, dtype=np.int64)
    for ln in ls.lines:
        if ln.degenerate:
            continue
        on = [par[normals & p] == 0 for p in ln.points]
        both = on[0] & on[1]
        inside += both
        # a line meets a hyperplane in all 3 points or exactly 1
        weight += np.where(both, 3, 1)
    return HyperplaneProfile(normals, inside, weight)


# --- Fano plane oracle ------------------------------------------------------


@dataclass(frozen=True)
class FanoOracleResult:
    candidates: int
    solutions: int
    profiles: frozenset[tuple[int, ...]]


def _canonical_fano(weights: Sequence[int], group) -> tuple[int, ...]:
    """Lexicographically largest relabelling of a weight vector on points 1..7."""
    best = None
    for g in group:
        t = [0] * 7
        for p in range(1, 8):
            t[apply_linear(g, p, 3) - 1] = weights[p - 1]
        t = tuple(t)
        if best is None or t > best:
            best = t
    return best


def fano_profile_oracle(total: int = 32, point_cap: int = 5, line_cap: int = 14) -> FanoOracleResult:
    """All weightings of the Fano plane with values ``0..point_cap``, the given
    sum and every line weight at most ``line_cap``, up to collineation."""
    vals = np.arange(point_cap + 1)
    grid = np.stack(np.meshgrid(*([vals] * 7), indexing="ij"), axis=-1).reshape(-1, 7)
    ok = grid.sum(axis=1) == total
    for ln in pg_lines(3):
        ok &= grid[:, [p - 1 for p in ln]].sum(axis=1) <= line_cap
    sols = grid[ok]
    group = general_linear_group(3)
    profiles = frozenset(_canonical_fano(tuple(int(x) for x in s), group) for s in sols)
    return FanoOracleResult(len(grid), len(sols), profiles)


def is_lemma_profile(profile: Sequence[int]) -> bool:
    """Three collinear points of weight 4 and four points of weight 5."""
    fours = {p for p in range(1, 8) if profile[p - 1] == 4}
    fives = [p for p in range(1, 8) if profile[p - 1] == 5]
    return len(fives) == 4 and len(fours) == 3 and tuple(sorted(fours)) in pg_lines(3)
