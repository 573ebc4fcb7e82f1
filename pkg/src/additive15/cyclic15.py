"""The cyclic additive [15, 4.5, 9] code built from trace coordinates over GF(16)."""

from __future__ import annotations

from dataclasses import dataclass, field

from .addcode import AdditiveCode, min_distance, rotate, same_code, strength, to_line_system
from .gf2core import BitMatrix

MODULUS = 0b10011  # e^4 = e + 1
EPS = 0b0010


def gf16_mul(x: int, y: int) -> int:
    out = 0
    while y:
        if y & 1:
            out ^= x
        y >>= 1
        x <<= 1
        if x & 0b10000:
            x ^= MODULUS
    return out


def gf16_pow(x: int, e: int) -> int:
    out = 1
    for _ in range(e % 15 if x else e):
        out = gf16_mul(out, x)
    return out


def trace(x: int) -> int:
    """x + x^2 + x^4 + x^8, which lies in {0, 1}."""
    t, y = 0, x
    for _ in range(4):
        t ^= y
        y = gf16_mul(y, y)
    assert t in (0, 1)
    return t


def _row(pair_of) -> int:
    r = 0
    for i in range(15):
        a, b = pair_of(i)
        r = (r << 2) | (a << 1) | b
    return r


BASIS = (1, EPS, gf16_pow(EPS, 2), gf16_pow(EPS, 3))


def c1_pair(u: int, i: int) -> tuple[int, int]:
    return trace(gf16_mul(u, gf16_pow(EPS, i + 1))), trace(gf16_mul(u, gf16_pow(EPS, i)))


def c2_pair(u: int, i: int) -> tuple[int, int]:
    return trace(gf16_mul(u, gf16_pow(EPS, 3 * i))), trace(gf16_mul(u, gf16_pow(EPS, 3 * i + 2)))


def build_cyclic_code() -> AdditiveCode:
    """Direct sum of the repetition word (11)^15 and two trace codes of dimension 4.

    Coordinate ``i`` corresponds to ``e^i``.
    """
    rows = [_row(lambda i: (1, 1))]
    rows += [_row(lambda i, u=u: c1_pair(u, i)) for u in BASIS]
    rows += [_row(lambda i, u=u: c2_pair(u, i)) for u in BASIS]
    return AdditiveCode(15, BitMatrix(tuple(rows), 30))


class PropertyFailed(AssertionError):
    pass


@dataclass
class CyclicReport:
    shift_closed: bool
    strength: int
    min_distance: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_cyclic_properties(c: AdditiveCode, raise_on_failure: bool = True) -> CyclicReport:
    shift = same_code(rotate(c, 1), c)
    t = strength(to_line_system(c))
    d = min_distance(c)
    rep = CyclicReport(shift, t, d)
    if not shift:
        rep.failures.append("shift-by-1 closure")
    if t != 3:
        rep.failures.append(f"strength {t} != 3")
    if d != 9:
        rep.failures.append(f"minimum distance {d} != 9")
    if rep.failures and raise_on_failure:
        raise PropertyFailed("; ".join(rep.failures))
    return rep
