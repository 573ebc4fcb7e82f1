"""Exhaustive completion of partially fixed generator matrices.

A :class:`CompletionInstance` is an ``r x 2n`` binary matrix, column by
column: ``fixed[c]`` holds the known cells of column ``c`` (an ``r``-bit int,
row 0 is the MSB) and ``free[c]`` marks the cells still to be chosen. The
search fills the free cells so that every nonzero message has codeword
weight at least ``d``; optionally the columns must also describe a line
system of strength at least 3.

Free cells are grouped into decision slots. ``line`` strategy: one slot per
coordinate (both columns at once). ``row`` strategy: one slot per coordinate
and row, rows taken top down. A message ``x`` sees coordinate ``j`` once all
free cells of ``j`` in the rows of ``x`` are set; from then on its zero count
at ``j`` is final. A message may have at most ``n - d`` zero coordinates,
which is the only weight prune (equivalently: no hyperplane contains more
than ``n - d`` lines).
"""

from __future__ import annotations

import hashlib
import itertools
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .addcode import AdditiveCode, line_system, min_distance, strength
from .casegen import LINE_INDEX, CaseFrame, HLineSystem, line_of
from .gf2core import BitMatrix, popcount, rank_of_ints
from .projgeom import parity_table

STRATEGIES = ("line", "row")


class NoFullRankPair(ValueError):
    pass


class MixedInstance(ValueError):
    pass


class StaleCheckpoint(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """Raised by :func:`search` with ``raise_on_budget``; carries the outcome and its checkpoint."""

    def __init__(self, outcome):
        super().__init__(f"budget exhausted after {outcome.stats['nodes']} nodes")
        self.outcome = outcome
        self.checkpoint = outcome.checkpoints[0] if outcome.checkpoints else None


@dataclass(frozen=True)
class CompletionInstance:
    r: int
    n: int
    d: int
    fixed: tuple[int, ...]
    free: tuple[int, ...]
    names: tuple[str, ...] = ()
    require_strength3: bool = False
    slot_order: tuple[int, ...] = ()  # coordinates in line-major decision order
    provenance: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if len(self.fixed) != 2 * self.n or len(self.free) != 2 * self.n:
            raise ValueError("need 2n columns")
        for f, m in zip(self.fixed, self.free):
            if f & m:
                raise ValueError("fixed and free cells overlap")
            if (f | m) >> self.r:
                raise ValueError("column wider than r")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"c{j}" for j in range(self.n)))
        order = self.slot_order or tuple(j for j in range(self.n) if self.free[2 * j] | self.free[2 * j + 1])
        object.__setattr__(self, "slot_order", tuple(order))

    @property
    def free_cells(self) -> int:
        return sum(popcount(m) for m in self.free)

    def coord_free(self, j: int) -> int:
        return self.free[2 * j] | self.free[2 * j + 1]

    def generator(self, assignment: Sequence[int] | None = None) -> BitMatrix:
        cols = list(self.fixed if assignment is None else assignment)
        return BitMatrix.from_columns(cols, self.r)

    def describe(self) -> str:
        """Canonical text used for hashing and reports."""
        lines = [f"r={self.r} n={self.n} d={self.d} strength3={int(self.require_strength3)}"]
        for j in range(self.n):
            cells = []
            for c in (2 * j, 2 * j + 1):
                f, m = self.fixed[c], self.free[c]
                cells.append("".join("*" if (m >> (self.r - 1 - i)) & 1 else str((f >> (self.r - 1 - i)) & 1)
                                     for i in range(self.r)))
            lines.append(f"{self.names[j]} {cells[0]} {cells[1]}")
        lines.append("order " + " ".join(map(str, self.slot_order)))
        lines += [f"{k}={v}" for k, v in self.provenance]
        return "\n".join(lines)

    def skeleton(self) -> list[str]:
        """Rows of the matrix with ``*`` for free cells, coordinates separated by spaces."""
        out = []
        for i in range(self.r):
            cells = []
            for j in range(self.n):
                s = ""
                for c in (2 * j, 2 * j + 1):
                    bit = 1 << (self.r - 1 - i)
                    s += "*" if self.free[c] & bit else str(int(bool(self.fixed[c] & bit)))
                cells.append(s)
            out.append(" ".join(cells))
        return out

    def instance_hash(self, strategy: str = "line") -> str:
        return hashlib.sha256((self.describe() + f"\nstrategy={strategy}").encode()).hexdigest()[:16]


# --- building instances from case data ----------------------------------------


def _bottom_rank(pairs: Iterable[tuple[int, int]]) -> int:
    return rank_of_ints(v for p in pairs for v in p)


def build_instance(
    f: CaseFrame, s: HLineSystem, normalize: bool = True, strict: bool = False, d: int = 9
) -> CompletionInstance:
    """Normal-form skeleton for one frame and one solution.

    Coordinates are L1..L4 followed by the solution's slots. The tops of the
    first slot pair with invertible bottom block are zeroed; then the top row
    of L4's second column is pinned to 0 and its other top cells become free.
    """
    lifts = f.lifts()
    names = ["L1", "L2", "L3", "L4"] + [nm for nm, _, _ in s.slots]
    fixed: list[int] = []
    free: list[int] = []
    top_all = 0b111111 << 4
    for nm in ("L1", "L2", "L3"):
        fixed += list(lifts[nm])
        free += [0, 0]
    zeroed: tuple[int, int] | None = None
    if normalize:
        for a, b in itertools.combinations(range(len(s.slots)), 2):
            if _bottom_rank([s.slots[a][1:], s.slots[b][1:]]) == 4:
                zeroed = (a, b)
                break
        if zeroed is None and strict:
            raise NoFullRankPair("no two slots have an invertible bottom block")
    l4a, l4b = lifts["L4"]
    fixed.append(l4a)
    free.append(0)
    if zeroed is not None:
        # elimination spoils the top of L4's second column; its first top cell
        # can be cleared again by replacing it with the sum of both columns
        fixed.append(l4b)
        free.append(top_all & ~(1 << 9))
    else:
        fixed.append(l4b)
        free.append(0)
    for k, (_, a, b) in enumerate(s.slots):
        fixed += [a, b]
        if zeroed is not None and k in zeroed:
            free += [0, 0]
        else:
            free += [top_all, top_all]
    # decision order: L4, then slots by descending multiplicity and canonical line order
    mult = {k: s.h[LINE_INDEX[line_of(a, b)]] for k, (_, a, b) in enumerate(s.slots)}
    slot_coords = sorted(
        (k for k in range(len(s.slots)) if free[2 * (4 + k)]),
        key=lambda k: (-mult[k], LINE_INDEX[line_of(s.slots[k][1], s.slots[k][2])], k),
    )
    order = ([3] if free[7] else []) + [4 + k for k in slot_coords]
    prov = [("frame", f"{f.case}.{f.subcase or 0}"), ("p0", format(f.p0, "04b")),
            ("solution", " ".join(f"{nm}:{a:04b}/{b:04b}" for nm, a, b in s.slots))]
    if zeroed is not None:
        prov.append(("normalization", f"zeroed {s.slots[zeroed[0]][0]},{s.slots[zeroed[1]][0]}; L4 top pin row0=0"))
    else:
        prov.append(("normalization", "skipped: no full-rank pair" if normalize else "disabled"))
    return CompletionInstance(10, 15, d, tuple(fixed), tuple(free), tuple(names), True, tuple(order), tuple(prov))


# --- search records ------------------------------------------------------------


@dataclass(frozen=True)
class SearchShard:
    instance_hash: str
    prefix: tuple[int, ...] = ()
    status: str = "pending"  # pending / exhausted / found / checkpointed
    nodes: int = 0

    @property
    def depth(self) -> int:
        return len(self.prefix)


@dataclass
class Checkpoint:
    instance_hash: str
    strategy: str
    shard: tuple[int, ...]
    path: list[tuple[int, int | None, int | None, int]]  # (slot, value, next, width)
    stats: dict
    nine_row_flag: bool = False
    found: list[tuple[int, ...]] = field(default_factory=list)

    def to_text(self) -> str:
        out = [f"ckpt {self.instance_hash} {self.strategy}"]
        out.append("shard " + " ".join([str(len(self.shard))] + [str(v) for v in self.shard]))
        for slot, value, nxt, width in self.path:
            fmt = lambda v: "-" if v is None else format(v, f"0{width}b") if width else "0"  # noqa: E731
            out.append(f"slot {slot} value {fmt(value)} next {'end' if nxt is None else fmt(nxt)}")
        for cols in self.found:
            out.append("found " + " ".join(map(str, cols)))
        out.append("stats " + " ".join(f"{k}={v}" for k, v in sorted(self.stats.items()))
                   + f" nine_row_flag={int(self.nine_row_flag)}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Checkpoint:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "ckpt" or len(head) != 3:
            raise ValueError("not a checkpoint file")
        shard_tok = lines[1].split()
        if shard_tok[0] != "shard":
            raise ValueError("missing shard line")
        shard = tuple(int(v) for v in shard_tok[2:])
        path, found, stats, flag = [], [], {}, False
        for ln in lines[2:]:
            tok = ln.split()
            if tok[0] == "slot":
                val = None if tok[3] == "-" else int(tok[3], 2)
                nxt = None if tok[5] == "end" else int(tok[5], 2)
                width = max(len(tok[3]) if tok[3] != "-" else 0, len(tok[5]) if tok[5] != "end" else 0)
                path.append((int(tok[1]), val, nxt, width))
            elif tok[0] == "found":
                found.append(tuple(int(v) for v in tok[1:]))
            elif tok[0] == "stats":
                for kv in tok[1:]:
                    k, v = kv.split("=")
                    if k == "nine_row_flag":
                        flag = bool(int(v))
                    else:
                        stats[k] = int(v)
        return cls(head[1], head[2], shard, path, stats, flag, found)

    def write(self, path: str | Path) -> None:
        """Atomic: write a sibling file then rename over the target."""
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(self.to_text())
        os.replace(tmp, path)

    @classmethod
    def read(cls, path: str | Path) -> Checkpoint:
        return cls.from_text(Path(path).read_text())


STAT_KEYS = ("nodes", "leaves", "prune_weight", "prune_strength", "prune_symmetry", "max_depth")


@dataclass
class SearchOutcome:
    instance_hash: str
    verdict: str  # none-found / found / budget-exhausted
    found: list[BitMatrix] = field(default_factory=list)
    stats: dict = field(default_factory=lambda: dict.fromkeys(STAT_KEYS, 0))
    nine_row_flag: bool = False
    checkpoints: list[Checkpoint] = field(default_factory=list)
    shards: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def completions(self) -> int:
        return len(self.found)


def _found_key(m: BitMatrix) -> tuple:
    return (m.ncols, m.rows)


def merge(outcomes: Sequence[SearchOutcome]) -> SearchOutcome:
    """Combine shard outcomes of one instance; order of the inputs is irrelevant."""
    if not outcomes:
        raise ValueError("nothing to merge")
    hashes = {o.instance_hash for o in outcomes}
    if len(hashes) != 1:
        raise MixedInstance(sorted(hashes))
    found = sorted((m for o in outcomes for m in o.found), key=_found_key)
    if found:
        verdict = "found"
    elif any(o.verdict == "budget-exhausted" for o in outcomes):
        verdict = "budget-exhausted"
    else:
        verdict = "none-found"
    stats = dict.fromkeys(STAT_KEYS, 0)
    for o in outcomes:
        for k, v in o.stats.items():
            stats[k] = max(stats.get(k, 0), v) if k == "max_depth" else stats.get(k, 0) + v
    cps = sorted((c for o in outcomes for c in o.checkpoints), key=lambda c: c.shard)
    return SearchOutcome(
        hashes.pop(), verdict, found, stats,
        any(o.nine_row_flag for o in outcomes), cps,
        sorted(s for o in outcomes for s in o.shards),
    )


# --- the engine ----------------------------------------------------------------


def _bits_of(mask: int, r: int) -> list[int]:
    """Bit positions set in ``mask``, MSB (row 0) first."""
    return [r - 1 - i for i in range(r) if (mask >> (r - 1 - i)) & 1]


def _span_points(vectors: Sequence[int]) -> list[int]:
    pts = [0]
    for v in vectors:
        pts += [p ^ v for p in pts]
    return pts[1:]


@dataclass
class _Slot:
    coord: int
    row: int | None
    pos_a: list[int]
    pos_b: list[int]
    completes: bool
    messages: np.ndarray = None  # messages that see this coordinate after this slot

    @property
    def width(self) -> int:
        return len(self.pos_a) + len(self.pos_b)


class _Frame:
    __slots__ = ("slot", "cands", "pos", "undo")

    def __init__(self, slot: int, cands: np.ndarray):
        self.slot = slot
        self.cands = cands
        self.pos = 0
        self.undo = None


class _Engine:
    def __init__(self, inst: CompletionInstance, strategy: str, prune: bool, symmetry: bool):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        self.inst = inst
        self.strategy = strategy
        self.prune = prune
        self.r, self.n = inst.r, inst.n
        self.slack = inst.n - inst.d
        self.nmsg = 1 << inst.r
        self.par = parity_table(inst.r)
        self.msgs = np.arange(self.nmsg, dtype=np.int64)
        self._build_slots()
        self.sym_link: list[int | None] = [None] * len(self.slots)
        if symmetry and strategy == "line":
            self._link_symmetric()
        self._zcache: dict = {}

    # slots and visibility ------------------------------------------------------

    def _build_slots(self):
        inst, r = self.inst, self.r
        slots: list[_Slot] = []
        if self.strategy == "line":
            for j in inst.slot_order:
                fa, fb = inst.free[2 * j], inst.free[2 * j + 1]
                slots.append(_Slot(j, None, _bits_of(fa, r), _bits_of(fb, r), True))
        else:
            last_row_of = {}
            for i in range(r):
                bit = 1 << (r - 1 - i)
                for j in inst.slot_order:
                    fa, fb = inst.free[2 * j] & bit, inst.free[2 * j + 1] & bit
                    if fa | fb:
                        slots.append(_Slot(j, i, _bits_of(fa, r), _bits_of(fb, r), False))
                        last_row_of[j] = len(slots) - 1
            for j, k in last_row_of.items():
                slots[k].completes = True
        self.slots = slots
        # det[x, j]: index of the slot after which message x sees coordinate j (-1: from the start)
        det = np.full((self.nmsg, self.n), -1, dtype=np.int64)
        for k, sl in enumerate(slots):
            cells = 0
            for p in sl.pos_a + sl.pos_b:
                cells |= 1 << p
            hit = (self.msgs & cells) != 0
            det[hit, sl.coord] = k
        for k, sl in enumerate(slots):
            m = self.msgs[det[:, sl.coord] == k]
            sl.messages = m[m != 0]
        self.det = det
        # 9-row flag: all slots outside the last free row are set
        self.flag_step = None
        if self.strategy == "row" and slots:
            last = slots[-1].row
            self.flag_step = next(k for k, sl in enumerate(slots) if sl.row == last)

    def _link_symmetric(self):
        inst = self.inst
        key = lambda j: (inst.fixed[2 * j], inst.fixed[2 * j + 1], inst.free[2 * j], inst.free[2 * j + 1])  # noqa: E731
        last_by_key: dict = {}
        for k, sl in enumerate(self.slots):
            kk = key(sl.coord)
            if kk in last_by_key:
                self.sym_link[k] = last_by_key[kk]
            last_by_key[kk] = k

    # state -----------------------------------------------------------------------

    def reset(self) -> bool:
        """Initial state; returns False when the fixed part is already infeasible."""
        inst = self.inst
        self.cols = list(inst.fixed)
        self.values: list[int | None] = [None] * len(self.slots)
        counts = np.zeros(self.nmsg, dtype=np.int16)
        for j in range(self.n):
            x = self.msgs[self.det[:, j] == -1]
            x = x[x != 0]
            z = (self.par[x & self.cols[2 * j]] == 0) & (self.par[x & self.cols[2 * j + 1]] == 0)
            counts[x] += z
        self.counts = counts
        alive = not (self.prune and (counts[1:] > self.slack).any())
        self.complete: list[tuple[int, int]] = []
        self.forbidden = np.zeros(self.nmsg, dtype=bool) if inst.require_strength3 else None
        for j in range(self.n):
            if not inst.coord_free(j):
                ok = self._add_line(self.cols[2 * j], self.cols[2 * j + 1])
                if not ok and self.prune:
                    alive = False
        return alive

    def _line_ok(self, a, b):
        f = self.forbidden
        return (a != 0) & (b != 0) & (a != b) & ~f[a] & ~f[b] & ~f[a ^ b]

    def _add_line(self, a: int, b: int) -> bool:
        if self.forbidden is None:
            return True
        ok = bool(self._line_ok(np.int64(a), np.int64(b)))
        if a and b and a != b:
            f = self.forbidden
            f[[a, b, a ^ b]] = True
            for x, y in self.complete:
                f[_span_points([a, b, x, y])] = True
            self.complete.append((a, b))
        return ok

    def _candidate_columns(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        sl = self.slots[k]
        w = sl.width
        v = np.arange(1 << w, dtype=np.int64)
        a = np.full(v.shape, self.cols[2 * sl.coord], dtype=np.int64)
        b = np.full(v.shape, self.cols[2 * sl.coord + 1], dtype=np.int64)
        for t, p in enumerate(sl.pos_a + sl.pos_b):
            bit = ((v >> (w - 1 - t)) & 1) << p
            if t < len(sl.pos_a):
                a |= bit
            else:
                b |= bit
        return a, b

    def _zeros(self, k: int):
        """Packed zero-pattern of every candidate over the slot's messages."""
        sl = self.slots[k]
        key = (k, self.cols[2 * sl.coord], self.cols[2 * sl.coord + 1])
        hit = self._zcache.get(key)
        if hit is not None:
            return hit
        a, b = self._candidate_columns(k)
        x = sl.messages
        z = (self.par[a[:, None] & x[None, :]] == 0) & (self.par[b[:, None] & x[None, :]] == 0)
        packed = np.packbits(z, axis=1)
        pad = (-packed.shape[1]) % 8
        if pad:
            packed = np.pad(packed, ((0, 0), (0, pad)))
        out = (a, b, packed, packed.view(np.uint64))
        if self.strategy == "line" or len(self._zcache) < 4096:
            self._zcache[key] = out
        return out

    def candidates(self, k: int, stats: dict, prefix: Sequence[int]) -> np.ndarray:
        sl = self.slots[k]
        a, b, packed, words = self._zeros(k)
        ok = np.ones(len(a), dtype=bool)
        if self.prune and len(sl.messages):
            tight = self.counts[sl.messages] >= self.slack
            if tight.any():
                tp = np.packbits(tight)
                tp = np.pad(tp, (0, packed.shape[1] - len(tp))).view(np.uint64)
                bad = (words & tp).any(axis=1)
                stats["prune_weight"] += int(bad.sum())
                ok &= ~bad
        if self.prune and sl.completes and self.forbidden is not None:
            good = self._line_ok(a, b)
            stats["prune_strength"] += int((ok & ~good).sum())
            ok &= good
        link = self.sym_link[k]
        if link is not None:
            low = np.arange(len(a)) >= self.values[link]
            stats["prune_symmetry"] += int((ok & ~low).sum())
            ok &= low
        cands = np.nonzero(ok)[0]
        if k < len(prefix):
            cands = cands[cands == prefix[k]]
        return cands

    def enter(self, fr: _Frame, v: int):
        k = fr.slot
        sl = self.slots[k]
        a, b, packed, _ = self._zeros(k)
        j = sl.coord
        z = np.unpackbits(packed[v])[: len(sl.messages)].astype(np.int16)
        self.counts[sl.messages] += z
        undo = (self.cols[2 * j], self.cols[2 * j + 1], z, None, len(self.complete))
        self.cols[2 * j], self.cols[2 * j + 1] = int(a[v]), int(b[v])
        self.values[k] = v
        if sl.completes and self.forbidden is not None:
            prev = self.forbidden.copy()
            self._add_line(self.cols[2 * j], self.cols[2 * j + 1])
            undo = undo[:3] + (prev, undo[4])
        fr.undo = undo

    def leave(self, fr: _Frame):
        k = fr.slot
        sl = self.slots[k]
        j = sl.coord
        ca, cb, z, prev, ncomplete = fr.undo
        self.counts[sl.messages] -= z
        self.cols[2 * j], self.cols[2 * j + 1] = ca, cb
        self.values[k] = None
        if prev is not None:
            self.forbidden = prev
            del self.complete[ncomplete:]
        fr.undo = None


def verify_completion(inst: CompletionInstance, cols: Sequence[int]) -> bool:
    """Independent check of a full assignment through the code machinery."""
    if any((c & ~m) != f for c, f, m in zip(cols, inst.fixed, inst.free)):
        return False
    g = BitMatrix.from_columns(list(cols), inst.r)
    try:
        code = AdditiveCode(inst.n, g)
    except ValueError:
        return False
    if min_distance(code) < inst.d:
        return False
    if inst.require_strength3 and strength(line_system(code)) < 3:
        return False
    return True


def search(
    inst: CompletionInstance,
    budget: int | None = None,
    shard: SearchShard | None = None,
    strategy: str = "line",
    prune: bool = True,
    symmetry: bool = True,
    max_found: int | None = None,
    resume: Checkpoint | None = None,
    checkpoint_every: int | None = None,
    checkpoint_path: str | Path | None = None,
    time_limit: float | None = None,
    raise_on_budget: bool = False,
) -> SearchOutcome:
    """Depth-first completion search.

    ``budget`` caps the nodes entered in this call; on exhaustion the outcome
    carries a checkpoint from which :func:`search` can ``resume`` without
    revisiting finished subtrees.
    """
    eng = _Engine(inst, strategy, prune, symmetry)
    ihash = inst.instance_hash(strategy)
    prefix = tuple(shard.prefix) if shard else ()
    if shard and shard.instance_hash not in (ihash, inst.instance_hash("line"), inst.instance_hash("row")):
        raise MixedInstance("shard belongs to another instance")
    stats = dict.fromkeys(STAT_KEYS, 0)
    found_cols: list[tuple[int, ...]] = []
    flag = False
    nslots = len(eng.slots)
    alive = eng.reset()

    def outcome(verdict, cp=None):
        mats = [inst.generator(list(c)) for c in found_cols]
        return SearchOutcome(ihash, verdict, mats, stats, flag, [cp] if cp else [], [prefix])

    stack: list[_Frame] = []
    if resume is not None:
        if resume.instance_hash != ihash or resume.strategy != strategy:
            raise StaleCheckpoint("checkpoint does not match instance/strategy")
        if tuple(resume.shard) != prefix:
            raise StaleCheckpoint("checkpoint belongs to another shard")
        stats.update(resume.stats)
        flag = resume.nine_row_flag
        found_cols = [tuple(c) for c in resume.found]
        if not alive:
            raise StaleCheckpoint("instance root is infeasible")
        for depth, (k, value, nxt, _) in enumerate(resume.path):
            if k != depth:
                raise StaleCheckpoint("path out of order")
            fr = _Frame(k, eng.candidates(k, dict.fromkeys(STAT_KEYS, 0), prefix))
            lst = fr.cands.tolist()
            if value is not None:
                if value not in lst:
                    raise StaleCheckpoint(f"value {value} not a candidate at slot {k}")
                fr.pos = lst.index(value) + 1
                eng.enter(fr, value)
            else:
                fr.pos = lst.index(nxt) if nxt is not None else len(lst)
            expect = lst[fr.pos] if fr.pos < len(lst) else None
            if expect != nxt:
                raise StaleCheckpoint(f"next candidate mismatch at slot {k}")
            stack.append(fr)
    else:
        if not alive:
            return outcome("none-found")
        if nslots == 0:
            if verify_completion(inst, eng.cols):
                found_cols.append(tuple(eng.cols))
            return outcome("found" if found_cols else "none-found")
        stack.append(_Frame(0, eng.candidates(0, stats, prefix)))

    def make_checkpoint() -> Checkpoint:
        path = []
        for fr in stack:
            w = eng.slots[fr.slot].width
            val = int(fr.cands[fr.pos - 1]) if fr.undo is not None else None
            nxt = int(fr.cands[fr.pos]) if fr.pos < len(fr.cands) else None
            path.append((fr.slot, val, nxt, w))
        return Checkpoint(ihash, strategy, prefix, path, dict(stats), flag, list(found_cols))

    used = 0
    t0 = time.monotonic()
    while stack:
        fr = stack[-1]
        if fr.undo is not None:
            eng.leave(fr)
        if fr.pos == len(fr.cands):
            stack.pop()
            continue
        if (budget is not None and used >= budget) or (
            time_limit is not None and used % 256 == 0 and time.monotonic() - t0 > time_limit
        ):
            cp = make_checkpoint()
            if checkpoint_path:
                cp.write(checkpoint_path)
            out = outcome("budget-exhausted", cp)
            if raise_on_budget:
                raise BudgetExceeded(out)
            return out
        v = int(fr.cands[fr.pos])
        fr.pos += 1
        eng.enter(fr, v)
        used += 1
        stats["nodes"] += 1
        depth = len(stack)
        stats["max_depth"] = max(stats["max_depth"], depth)
        if checkpoint_every and checkpoint_path and stats["nodes"] % checkpoint_every == 0:
            make_checkpoint().write(checkpoint_path)
        if eng.flag_step is not None and depth == eng.flag_step and (prune or _prefix_rows_ok(eng)):
            flag = True
        if depth == nslots:
            stats["leaves"] += 1
            if verify_completion(inst, eng.cols):
                if strategy == "line":
                    flag = True
                found_cols.append(tuple(eng.cols))
                if max_found is not None and len(found_cols) >= max_found:
                    eng.leave(fr)
                    return outcome("found")
            elif prune:
                raise AssertionError("pruned search reached an invalid leaf")
            continue
        stack.append(_Frame(depth, eng.candidates(depth, stats, prefix)))
    if checkpoint_path and Path(checkpoint_path).exists():
        Path(checkpoint_path).unlink()
    return outcome("found" if found_cols else "none-found")


def _prefix_rows_ok(eng: _Engine) -> bool:
    """Without pruning, check the rows above the last free row directly."""
    last = eng.slots[-1].row
    keep = [i for i in range(eng.r) if i != last]
    rows = BitMatrix.from_columns(eng.cols, eng.r).rows
    sub = BitMatrix(tuple(rows[i] for i in keep), 2 * eng.n)
    try:
        code = AdditiveCode(eng.n, sub)
    except ValueError:
        return False
    return min_distance(code) >= eng.inst.d


def make_shards(inst: CompletionInstance, depth: int, strategy: str = "line", prune: bool = True,
                symmetry: bool = True) -> list[SearchShard]:
    """Surviving prefixes of the first ``depth`` decision slots."""
    eng = _Engine(inst, strategy, prune, symmetry)
    if depth > len(eng.slots):
        raise ValueError("depth exceeds the number of decision slots")
    ihash = inst.instance_hash(strategy)
    if depth == 0:
        return [SearchShard(ihash)]
    if not eng.reset():
        return []
    stats = dict.fromkeys(STAT_KEYS, 0)
    out = []
    prefix: list[int] = []

    def rec(k: int):
        fr = _Frame(k, eng.candidates(k, stats, ()))
        for v in fr.cands.tolist():
            fr.pos += 1
            eng.enter(fr, v)
            prefix.append(v)
            if k + 1 == depth:
                out.append(SearchShard(ihash, tuple(prefix)))
            else:
                rec(k + 1)
            prefix.pop()
            eng.leave(fr)

    rec(0)
    return out


def run_shards(inst: CompletionInstance, shards: Sequence[SearchShard], jobs: int = 1, **kw) -> SearchOutcome:
    """Search every shard (optionally in worker processes) and merge."""
    if not shards:
        return SearchOutcome(inst.instance_hash(kw.get("strategy", "line")), "none-found")
    if jobs <= 1:
        return merge([search(inst, shard=s, **kw) for s in shards])
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as ex:
        futs = [ex.submit(search, inst, shard=s, **kw) for s in shards]
        return merge([f.result() for f in futs])


def planted_instance(code: AdditiveCode, free_coords: Sequence[int], top_rows: int, d: int,
                     require_strength3: bool = True) -> tuple[CompletionInstance, BitMatrix]:
    """Reduce ``code`` to echelon form and free the top rows of some coordinates.

    Returns the instance and the echelon generator, which is one of its completions.
    """
    from .gf2core import rref

    _, g, _ = rref(code.gen)
    r = g.nrows
    top = ((1 << top_rows) - 1) << (r - top_rows)
    free = [0] * (2 * code.n)
    for j in free_coords:
        free[2 * j] = free[2 * j + 1] = top
    fixed = tuple(c & ~m for c, m in zip(g.columns(), free))
    prov = (("planted", "echelon form"), ("free", ",".join(map(str, free_coords))))
    return CompletionInstance(r, code.n, d, fixed, tuple(free), require_strength3=require_strength3,
                              provenance=prov), g
