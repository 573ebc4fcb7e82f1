"""Griesmer bound, concatenation arguments and the table of optimal parameters."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

TABLE_RESOURCE = "optimal_table.txt"


class MissingEntry(KeyError):
    pass


def griesmer_min_length(dim: int, d: int, q: int = 2) -> int:
    """Smallest length allowed by the Griesmer bound for a linear [n, dim, d]_q code."""
    if dim < 1 or d < 1 or q < 2:
        raise ValueError("need dim >= 1, d >= 1, q >= 2")
    return sum(-(-d // q**i) for i in range(dim))


@dataclass(frozen=True)
class TableEntry:
    n: int
    dim2: int
    lo: int
    hi: int

    def __post_init__(self):
        if not 1 <= self.lo <= self.hi <= self.n:
            raise ValueError(f"bad entry {self}")

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def __str__(self) -> str:
        d = str(self.lo) if self.exact else f"{self.lo}-{self.hi}"
        return f"[{self.n},{self.dim2 / 2:g},{d}]"


class OptimalTable:
    """Optimal minimum distances keyed by ``(n, dim2)``."""

    def __init__(self, entries: dict[tuple[int, int], TableEntry]):
        self.entries = dict(entries)

    @classmethod
    def parse(cls, text: str) -> OptimalTable:
        entries = {}
        for ln in text.splitlines():
            ln = ln.split("#", 1)[0].strip()
            if not ln:
                continue
            dim2, n, d = ln.split()
            lo, _, hi = d.partition("-")
            e = TableEntry(int(n), int(dim2), int(lo), int(hi or lo))
            entries[(e.n, e.dim2)] = e
        return cls(entries)

    @classmethod
    def load(cls, path: str | Path | None = None) -> OptimalTable:
        if path is None:
            text = resources.files("additive15.data").joinpath(TABLE_RESOURCE).read_text()
        else:
            text = Path(path).read_text()
        return cls.parse(text)

    def __getitem__(self, key: tuple[int, int]) -> TableEntry:
        try:
            return self.entries[key]
        except KeyError:
            raise MissingEntry(key) from None

    def get(self, n: int, dim2: int) -> TableEntry | None:
        return self.entries.get((n, dim2))

    def with_entry(self, n: int, dim2: int, lo: int, hi: int | None = None) -> OptimalTable:
        e = dict(self.entries)
        e[(n, dim2)] = TableEntry(n, dim2, lo, lo if hi is None else hi)
        return OptimalTable(e)


@dataclass(frozen=True)
class Violation:
    rule: str
    larger: TableEntry
    smaller: TableEntry

    def __str__(self) -> str:
        return f"{self.rule}: {self.larger} vs {self.smaller}"


def table_consistency(table: OptimalTable) -> list[Violation]:
    """Check the propagation rules between neighbouring entries.

    With d(n, k) the optimal distance:
      puncture   d(n-1, k)   >= d(n, k) - 1
      shorten    d(n-1, k-1) >= d(n, k)
      extend     d(n, k)     >= d(n-1, k)
      subcode    d(n, k-1/2) >= d(n, k)
    A range fails a rule only if no values inside the ranges satisfy it.
    """
    out = []
    for (n, dim2), e in sorted(table.entries.items()):
        p = table.get(n - 1, dim2)
        if p is not None:
            if p.hi < e.lo - 1:
                out.append(Violation("puncture", e, p))
            if e.hi < p.lo:
                out.append(Violation("extend", e, p))
        s = table.get(n - 1, dim2 - 2)
        if s is not None and s.hi < e.lo:
            out.append(Violation("shorten", e, s))
        sub = table.get(n, dim2 - 1)
        if sub is not None and sub.hi < e.lo:
            out.append(Violation("subcode", e, sub))
    return out


# Results taken from the literature rather than derived here.
# (n, dim2, d): no code with these n, dim2 and minimum distance >= d.
CITED_NONEXISTENT = {
    (12, 14, 5): "no additive [12,7,5] code (cited, not re-derived)",
}
CITED_EXISTENT = {
    (13, 13, 6): "cyclic [13,6.5,6] codes exist (cited, not re-derived)",
}
# Entries that rest on the [15,5,9] result itself; never used as evidence.
MAIN_RESULT_ENTRIES = {(15, 10)}


@dataclass
class NonexistenceVerdict:
    n: int
    dim2: int
    d: int
    verdict: str  # "exists" | "nonexistent" | "unknown"
    reason: str = ""
    trace: list[str] = field(default_factory=list)

    def __str__(self) -> str:
        head = f"[{self.n},{self.dim2 / 2:g},{self.d}]_4: {self.verdict}"
        if self.reason:
            head += f" ({self.reason})"
        return "\n".join([head] + ["  " + t for t in self.trace])


def _griesmer_concat(n: int, dim2: int, d: int) -> str | None:
    if dim2 < 1:
        return None
    g = griesmer_min_length(dim2, 2 * d, 2)
    if g > 3 * n:
        return (f"concatenation with [3,2,2]_2 gives binary [{3 * n},{dim2},{2 * d}]_2; "
                f"Griesmer needs length >= {g} > {3 * n}")
    return None


def _cited_nonexistent(n: int, dim2: int, d: int) -> str | None:
    for (cn, cdim2, cd), msg in CITED_NONEXISTENT.items():
        if (n, dim2) == (cn, cdim2) and d >= cd:
            return msg
    return None


def _derivation_moves(n: int, dim2: int, d: int):
    """Codes implied by an [n, dim2/2, d] code (distance read as 'at least d')."""
    yield "shorten", (n - 1, dim2 - 2, d)
    yield "puncture", (n - 1, dim2, d - 1)
    yield "subcode", (n, dim2 - 1, d)


def quaternary_nonexistence(n: int, dim2: int, d: int, table: OptimalTable | None = None) -> NonexistenceVerdict:
    """Decide existence of an additive [n, dim2/2, d]_4 code from the known arguments.

    Tried in order: Griesmer after concatenation; breadth-first chains of
    shortening, puncturing and subcodes down to a Griesmer contradiction or a
    cited fact; the table.
    """
    v = NonexistenceVerdict(n, dim2, d, "unknown")
    if d > n:
        v.verdict, v.reason = "nonexistent", "singleton"
        v.trace.append(f"d = {d} exceeds length {n}")
        return v
    msg = _griesmer_concat(n, dim2, d)
    if msg:
        v.verdict, v.reason = "nonexistent", "griesmer-concat"
        v.trace.append(msg)
        return v
    msg = _cited_nonexistent(n, dim2, d)
    if msg:
        v.verdict, v.reason = "nonexistent", "table-fact"
        v.trace.append(msg)
        return v
    start = (n, dim2, d)
    parent: dict[tuple[int, int, int], tuple[tuple[int, int, int], str] | None] = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for how, nxt in _derivation_moves(*state):
            nn, ddim, dd = nxt
            if nn < 1 or ddim < 1 or dd < 1 or nxt in parent:
                continue
            parent[nxt] = (state, how)
            why = _griesmer_concat(*nxt) or _cited_nonexistent(*nxt)
            if why:
                steps = []
                cur = nxt
                while parent[cur] is not None:
                    prev, h = parent[cur]
                    steps.append(f"{h} -> [{cur[0]},{cur[1] / 2:g},{cur[2]}]_4")
                    cur = prev
                v.verdict, v.reason = "nonexistent", "shorten-chain"
                v.trace += steps[::-1] + [why]
                return v
            queue.append(nxt)
    if (n, dim2, d) in CITED_EXISTENT:
        v.verdict, v.reason = "exists", "table-fact"
        v.trace.append(CITED_EXISTENT[(n, dim2, d)])
        return v
    table = table or OptimalTable.load()
    e = table.get(n, dim2)
    if e is not None and (n, dim2) not in MAIN_RESULT_ENTRIES:
        if d <= e.lo:
            v.verdict, v.reason = "exists", "table-fact"
            v.trace.append(f"table entry {e}")
        elif d > e.hi:
            v.verdict, v.reason = "nonexistent", "table-fact"
            v.trace.append(f"table entry {e}")
    return v
