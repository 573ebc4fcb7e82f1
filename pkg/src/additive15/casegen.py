"""Case analysis in the factor space PG(3,2) of a 10-point V6.

Points of PG(3,2) are 4-bit ints written ``y1y2y3y4`` with y1 the most
significant bit, e.g. ``pt("1000") == 8``. An h-function assigns to each of
the 35 lines the number of codelines (other than L1..L4) projecting onto it.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .projgeom import (
    WeightFunction,
    apply_linear,
    general_linear_group,
    hyperplane_points,
    pg_lines,
)

DIM = 4
POINTS = tuple(range(1, 16))
LINES: tuple[tuple[int, int, int], ...] = pg_lines(DIM)
LINE_INDEX = {ln: i for i, ln in enumerate(LINES)}
PLANES: tuple[int, ...] = POINTS  # by normal vector
PLANE_POINTS = {e: hyperplane_points(DIM, e) for e in PLANES}
LINES_THROUGH = {p: tuple(i for i, ln in enumerate(LINES) if p in ln) for p in POINTS}
LINES_IN = {e: tuple(i for i, ln in enumerate(LINES) if set(ln) <= PLANE_POINTS[e]) for e in PLANES}
TOTAL_H = 11
SLOT_NAMES = ("L5", "L6") + tuple(f"R{i}" for i in range(1, 10))

CASES = ((1, None), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2))


def pt(s: str) -> int:
    return int(s, 2)


def ps(p: int) -> str:
    return format(p, "04b")


def line_of(a: int, b: int) -> tuple[int, int, int]:
    if a == b or not a or not b:
        raise ValueError(f"{ps(a)}, {ps(b)} do not span a line")
    return tuple(sorted((a, b, a ^ b)))


def line_str(ln: Sequence[int]) -> str:
    return "{" + ",".join(ps(p) for p in ln) + "}"


class UnknownCase(ValueError):
    pass


class NonIntegralTarget(ValueError):
    pass


@dataclass(frozen=True)
class CaseFrame:
    case: int
    subcase: int | None
    w: WeightFunction
    p0: int
    special: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def label(self) -> str:
        return f"Case {self.case}" + (f" subcase ({self.case},{self.subcase})" if self.subcase else "")

    def plane_weight(self, e: int) -> int:
        return self.w.weight_of(PLANE_POINTS[e])

    def line_weight(self, ln: Sequence[int]) -> int:
        return self.w.weight_of(ln)

    @property
    def g0_candidates(self) -> tuple[tuple[int, int, int], ...]:
        return self.special.get("g0_candidates", ())

    def lifts(self) -> dict[str, tuple[int, int]]:
        """10-bit columns (row 0 = MSB) of L1..L4; the top of L4's second column is left zero."""
        top = lambda bits: int(bits, 2) << 4  # noqa: E731
        return {
            "L1": (top("100000"), top("010000")),
            "L2": (top("001000"), top("000100")),
            "L3": (top("000010"), top("000001")),
            "L4": (top("101010"), self.p0),
        }


def make_frame(case: int, subcase: int | None = None) -> CaseFrame:
    """The pinned coordinates of one case or subcase."""
    w: dict[int, int] = {}
    special: dict = {}
    if case == 1:
        if subcase not in (None, 0):
            raise UnknownCase((case, subcase))
        subcase = None
        quad = {pt(s) for s in ("0100", "0010", "0001", "0111")}
        l0 = tuple(sorted(pt(s) for s in ("0110", "0101", "0011")))
        for p in POINTS:
            w[p] = 3 if p & 8 else (2 if p in quad else 1)
        p0 = pt("1000")
        special = {
            "E0": pt("1000"),
            "l0": l0,
            "g0_candidates": (line_of(p0, pt("0100")), line_of(p0, pt("0110"))),
            # residual choice fixed by the published solutions: the line through 0101
            "figure_pin": line_of(pt("0101"), pt("1001")),
        }
    elif case == 2:
        if subcase not in (1, 2, 3):
            raise UnknownCase((case, subcase))
        for p in POINTS:
            if p == pt("0100"):
                w[p] = 1
            elif not p & 8 or p in (pt("1000"), pt("1100")):
                w[p] = 2
            else:
                w[p] = 3
        p0 = pt({1: "1000", 2: "0010", 3: "1010"}[subcase])
        special = {"E0": pt("1000")}
    elif case == 3:
        if subcase not in (1, 2):
            raise UnknownCase((case, subcase))
        frame_pts = tuple(pt(s) for s in ("1000", "0100", "0010", "0001", "1111"))
        for p in POINTS:
            w[p] = 3 if p in frame_pts else 2
        p0 = pt({1: "1100", 2: "1000"}[subcase])
        special = {"frame": frame_pts}
    else:
        raise UnknownCase((case, subcase))
    return CaseFrame(case, subcase, WeightFunction.from_dict(DIM, w), p0, special)


def all_frames() -> list[CaseFrame]:
    return [make_frame(c, s) for c, s in CASES]


# --- constraints --------------------------------------------------------------


@dataclass(frozen=True)
class ConstraintSystem:
    """Linear equations on the h-function: sums over lines through a point or in a plane."""

    point: dict[int, int]
    plane: dict[int, int]
    total: int = TOTAL_H


def hweight_targets(f: CaseFrame) -> ConstraintSystem:
    point = {p: f.w[p] - (2 if p == f.p0 else 0) for p in POINTS}
    plane = {}
    for e in PLANES:
        excess = f.plane_weight(e) - (13 if f.p0 in PLANE_POINTS[e] else 11)
        if excess < 0 or excess % 2:
            raise NonIntegralTarget(f"plane {ps(e)}: weight {f.plane_weight(e)} gives target {excess}/2")
        plane[e] = excess // 2
    if any(v < 0 for v in point.values()):
        raise NonIntegralTarget("negative point target")
    return ConstraintSystem(point, plane)


def structural_checks(f: CaseFrame) -> list[str]:
    """Violated weight predicates of the frame (empty if all hold)."""
    bad = []
    w = f.w
    if w.total() != 35:
        bad.append(f"total weight {w.total()} != 35")
    if w[f.p0] < 2:
        bad.append(f"w(P0) = {w[f.p0]} < 2")
    for p in POINTS:
        if w[p] not in (1, 2, 3):
            bad.append(f"point {ps(p)} has weight {w[p]} not in {{1,2,3}}")
    lw = {ln: f.line_weight(ln) for ln in LINES}
    pw = {e: f.plane_weight(e) for e in PLANES}
    for ln, x in lw.items():
        if x > 8:
            bad.append(f"line {line_str(ln)} has weight {x} > 8")
    for e, x in pw.items():
        if x % 2 == 0 or not 11 <= x <= 17:
            bad.append(f"plane {ps(e)} has weight {x}, not odd in [11,17]")
    for ln, x in lw.items():
        if x == 8:
            n17 = sum(1 for e in PLANES if set(ln) <= PLANE_POINTS[e] and pw[e] == 17)
            if n17 != 3:
                bad.append(f"8-line {line_str(ln)} lies in {n17} 17-planes, not 3")
    for e, x in pw.items():
        if x == 17:
            n3 = sum(1 for p in PLANE_POINTS[e] if w[p] == 3)
            if n3 not in (3, 4):
                bad.append(f"17-plane {ps(e)} has {n3} weight-3 points")
            if any(w[p] == 0 for p in PLANE_POINTS[e]):
                bad.append(f"17-plane {ps(e)} has a weight-0 point")
    for p in POINTS:
        if w[p] != 3:
            continue
        planes = Counter(pw[e] for e in PLANES if p in PLANE_POINTS[e])
        lines = Counter(lw[LINES[i]] for i in LINES_THROUGH[p])
        if (planes[15], planes[17]) != (1, 6):
            bad.append(f"weight-3 point {ps(p)} on planes {dict(planes)}")
        if (lines[7], lines[8]) != (3, 4):
            bad.append(f"weight-3 point {ps(p)} on lines {dict(lines)}")
    return bad


def plane_weight_counts(f: CaseFrame) -> Counter:
    return Counter(f.plane_weight(e) for e in PLANES)


# --- solutions ----------------------------------------------------------------


@dataclass(frozen=True)
class HLineSystem:
    """An h-function together with the column pairs that realise it."""

    h: tuple[int, ...]
    slots: tuple[tuple[str, int, int], ...]

    @classmethod
    def from_h(cls, h: Sequence[int]) -> HLineSystem:
        h = tuple(h)
        pairs = [(LINES[i][0], LINES[i][1]) for i, c in enumerate(h) for _ in range(c)]
        names = SLOT_NAMES if len(pairs) == len(SLOT_NAMES) else tuple(f"S{i + 1}" for i in range(len(pairs)))
        return cls(h, tuple((nm, a, b) for nm, (a, b) in zip(names, pairs)))

    @classmethod
    def from_slots(cls, slots: Iterable[tuple[str, int, int]]) -> HLineSystem:
        slots = tuple(slots)
        h = [0] * len(LINES)
        for name, a, b in slots:
            h[LINE_INDEX[line_of(a, b)]] += 1
        return cls(tuple(h), slots)

    def lines(self) -> list[tuple[int, int, int]]:
        return [LINES[i] for i, c in enumerate(self.h) for _ in range(c)]

    def canonical(self) -> HLineSystem:
        return HLineSystem.from_h(self.h)


def validate_solution(f: CaseFrame, s: HLineSystem) -> list[str]:
    """Violated equations (empty if ``s`` solves the frame's system)."""
    bad = []
    for name, a, b in s.slots:
        if a == b or not a or not b or a >> 4 or b >> 4:
            bad.append(f"slot {name}: {ps(a)} {ps(b)} is not a line")
    if any(c < 0 for c in s.h):
        bad.append("negative h-weight")
    tot = sum(s.h)
    if tot != TOTAL_H:
        bad.append(f"sum of h-weights {tot} != {TOTAL_H}")
    try:
        cs = hweight_targets(f)
    except NonIntegralTarget as exc:
        return bad + [str(exc)]
    for p, t in cs.point.items():
        got = sum(s.h[i] for i in LINES_THROUGH[p])
        if got != t:
            bad.append(f"point {ps(p)}: lines through it carry {got}, need {t}")
    for e, t in cs.plane.items():
        got = sum(s.h[i] for i in LINES_IN[e])
        if got != t:
            bad.append(f"plane {ps(e)}: lines inside carry {got}, need {t}")
    return bad


def _solve(cs: ConstraintSystem, order: Sequence[int], pins: dict[int, int]) -> list[tuple[int, ...]]:
    """Depth-first enumeration over lines in ``order`` with slack pruning."""
    n = len(order)
    pos_lines = [LINES[i] for i in order]
    pos_planes = [[e for e in PLANES if set(ln) <= PLANE_POINTS[e]] for ln in pos_lines]
    # last position touching each point / plane: the slack must be closed there
    last_pt = {p: max(k for k, ln in enumerate(pos_lines) if p in ln) for p in POINTS}
    last_pl = {e: max(k for k, pl in enumerate(pos_planes) if e in pl) for e in PLANES}
    closes = [[] for _ in range(n)]
    for p, k in last_pt.items():
        closes[k].append(("p", p))
    for e, k in last_pl.items():
        closes[k].append(("e", e))
    prem = dict(cs.point)
    erem = dict(cs.plane)
    h = [0] * len(LINES)
    out = []

    def rec(k: int, left: int):
        if k == n:
            if left == 0:
                out.append(tuple(h))
            return
        i = order[k]
        ln = pos_lines[k]
        cap = min(left, min(prem[p] for p in ln), min(erem[e] for e in pos_planes[k]))
        choices = [pins[i]] if i in pins else range(cap, -1, -1)
        for c in choices:
            if c > cap:
                continue
            for p in ln:
                prem[p] -= c
            for e in pos_planes[k]:
                erem[e] -= c
            if all((prem if kind == "p" else erem)[x] == 0 for kind, x in closes[k]):
                h[i] = c
                rec(k + 1, left - c)
                h[i] = 0
            for p in ln:
                prem[p] += c
            for e in pos_planes[k]:
                erem[e] += c

    rec(0, cs.total)
    return out


def _sort_key(h: Sequence[int]) -> tuple[int, ...]:
    return tuple(i for i, c in enumerate(h) for _ in range(c))


def enumerate_solutions(
    f: CaseFrame,
    g0: Sequence[int] | None = None,
    pins: dict[tuple[int, int, int], int] | None = None,
    line_order: Sequence[int] | None = None,
) -> list[HLineSystem]:
    """All h-functions solving the frame's equations, sorted by canonical line order.

    For Case 1 the line g0 through P0 is pinned to h = 1; with ``g0=None``
    both candidate lines are tried in turn and the results concatenated.
    ``pins`` fixes further h values.
    """
    cs = hweight_targets(f)
    order = list(range(len(LINES))) if line_order is None else list(line_order)
    base = {LINE_INDEX[tuple(sorted(k))]: v for k, v in (pins or {}).items()}
    branches: list[dict[int, int]] = [base]
    if f.case == 1:
        cands = f.g0_candidates if g0 is None else (tuple(sorted(g0)),)
        branches = [{**base, LINE_INDEX[g]: 1} for g in cands]
    sols: set[tuple[int, ...]] = set()
    for b in branches:
        sols.update(_solve(cs, order, b))
    return [HLineSystem.from_h(h) for h in sorted(sols, key=_sort_key)]


# --- symmetry -------------------------------------------------------------------


def frame_stabilizer(f: CaseFrame, fixed_lines: Iterable[Sequence[int]] = ()) -> list[tuple[int, ...]]:
    """Elements of GL(4,2) preserving the weights, P0 and each line in ``fixed_lines``."""
    fixed = [tuple(sorted(ln)) for ln in fixed_lines]
    out = []
    for g in general_linear_group(DIM):
        if apply_linear(g, f.p0, DIM) != f.p0:
            continue
        if any(f.w[apply_linear(g, p, DIM)] != f.w[p] for p in POINTS):
            continue
        if any(tuple(sorted(apply_linear(g, p, DIM) for p in ln)) != ln for ln in fixed):
            continue
        out.append(g)
    return out


@lru_cache(maxsize=None)
def _line_perm(g: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(LINE_INDEX[tuple(sorted(apply_linear(g, p, DIM) for p in ln))] for ln in LINES)


def transform(h: Sequence[int], g: tuple[int, ...]) -> tuple[int, ...]:
    perm = _line_perm(g)
    out = [0] * len(LINES)
    for i, c in enumerate(h):
        out[perm[i]] = c
    return tuple(out)


def orbit_representatives(sols: Iterable[HLineSystem], group: Sequence[tuple[int, ...]]) -> list[HLineSystem]:
    """First member (in input order) of each orbit."""
    seen: set[tuple[int, ...]] = set()
    reps = []
    for s in sols:
        if s.h in seen:
            continue
        reps.append(s)
        seen.update(transform(s.h, g) for g in group)
    return reps


@dataclass
class CaseCount:
    frame: CaseFrame
    raw: int
    orbits: int
    stabilizer_order: int
    g0_raw: dict = field(default_factory=dict)
    g0_orbits: dict = field(default_factory=dict)


def count_case(f: CaseFrame) -> CaseCount:
    """Raw solution count and orbit count under the frame stabilizer.

    For Case 1 the two g0 branches are counted separately as well; orbits of a
    branch are taken under the stabilizer that also fixes its g0.
    """
    sols = enumerate_solutions(f) if f.case != 1 else None
    if f.case != 1:
        grp = frame_stabilizer(f)
        return CaseCount(f, len(sols), len(orbit_representatives(sols, grp)), len(grp))
    cc = CaseCount(f, 0, 0, len(frame_stabilizer(f)))
    for g in f.g0_candidates:
        branch = enumerate_solutions(f, g0=g)
        grp = frame_stabilizer(f, [g])
        key = line_str(g)
        cc.g0_raw[key] = len(branch)
        cc.g0_orbits[key] = len(orbit_representatives(branch, grp))
        cc.raw += len(branch)
        cc.orbits += cc.g0_orbits[key]
    return cc


# --- solution files ------------------------------------------------------------

_SOL = re.compile(r"^solution\s+(\d+)\s+(\S+)\s+(\d+)$")
_SLOT = re.compile(r"^slot\s+(\S+)\s+([01]{4})\s+([01]{4})$")


@dataclass(frozen=True)
class SolutionRecord:
    case: int
    subcase: int | None
    index: int
    solution: HLineSystem


def format_solutions(records: Iterable[SolutionRecord]) -> str:
    out = []
    for r in records:
        sub = "-" if r.subcase is None else str(r.subcase)
        out.append(f"solution {r.case} {sub} {r.index}")
        for name, a, b in r.solution.slots:
            out.append(f"slot {name} {ps(a)} {ps(b)}")
    return "\n".join(out) + "\n"


def parse_solutions(text: str) -> list[SolutionRecord]:
    records = []
    head = None
    slots: list[tuple[str, int, int]] = []

    def flush():
        if head is not None:
            c, s, i = head
            records.append(SolutionRecord(c, s, i, HLineSystem.from_slots(slots)))

    for no, raw in enumerate(text.splitlines(), 1):
        ln = raw.split("#", 1)[0].strip()
        if not ln:
            continue
        m = _SOL.match(ln)
        if m:
            flush()
            sub = None if m.group(2) in ("-", "0") else int(m.group(2))
            head, slots = (int(m.group(1)), sub, int(m.group(3))), []
            continue
        m = _SLOT.match(ln)
        if m and head is not None:
            slots.append((m.group(1), pt(m.group(2)), pt(m.group(3))))
            continue
        raise ValueError(f"line {no}: cannot parse {raw!r}")
    flush()
    return records


def read_solutions(path: str | Path) -> list[SolutionRecord]:
    return parse_solutions(Path(path).read_text())


def figure_solutions() -> list[SolutionRecord]:
    """The twelve published Case 1 solutions (shipped as ``fig12.sol``)."""
    return parse_solutions(resources.files("additive15.data").joinpath("fig12.sol").read_text())


def figure_branch(f: CaseFrame | None = None) -> list[HLineSystem]:
    """Case 1 solutions in the branch and normalisation used by the published list.

    g0 is the line through P0 and 0110, and the line through 0101 is the one
    carrying 1001 (the other candidate is its image under the stabilizer).
    """
    f = f or make_frame(1)
    return enumerate_solutions(f, g0=f.g0_candidates[1], pins={f.special["figure_pin"]: 1})
