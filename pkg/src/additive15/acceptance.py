"""Reproduction checks, shared by ``additive15 verify-paper`` and the test suite.

Each check returns a :class:`CheckResult`; ``run_all`` prints one line per
check. Searches use node budgets so the suite runs in a few minutes.
"""

from __future__ import annotations

import random
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import addcode, bounds, casegen, completion, cyclic15, projgeom
from .gf2core import BitMatrix


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name}: {self.detail}"


def check_subspace_bounds() -> tuple[bool, str]:
    got = projgeom.averaging_bounds(45, 27, 10)
    return got == [27, 18, 13, 10, 8], f"averaging_bounds(45, 27, PG(9,2)) = {got}"


def check_griesmer() -> tuple[bool, str]:
    g8 = bounds.griesmer_min_length(8, 18, 2)
    g5 = bounds.griesmer_min_length(5, 18, 2)
    verdicts = [bounds.quaternary_nonexistence(n, dim2, d) for n, dim2, d in ((13, 8, 9), (12, 5, 9), (15, 20, 5))]
    ok = g8 == 40 and g5 == 37 and all(v.verdict == "nonexistent" and v.trace for v in verdicts)
    ok &= [v.reason for v in verdicts] == ["griesmer-concat", "griesmer-concat", "shorten-chain"]
    names = ", ".join(f"[{v.n},{v.dim2 / 2:g},{v.d}] {v.verdict} via {v.reason}" for v in verdicts)
    return ok, f"g(8,18)={g8}, g(5,18)={g5}; {names}"


def check_cyclic() -> tuple[bool, str]:
    c = cyclic15.build_cyclic_code()
    rep = cyclic15.verify_cyclic_properties(c, raise_on_failure=False)
    words = len(c.codewords())
    dd = addcode.dual_distance(c, method="enumerate")
    ok = rep.ok and words == 512 and rep.min_distance == 9 and rep.strength == 3 and dd.value == 4
    return ok, (f"{words} codewords, d={rep.min_distance}, strength={rep.strength}, "
                f"shift-closed={rep.shift_closed}, dual distance={dd.value}")


def check_fano() -> tuple[bool, str]:
    res = projgeom.fano_profile_oracle()
    ok = len(res.profiles) == 1 and all(projgeom.is_lemma_profile(p) for p in res.profiles)
    return ok, f"{res.candidates} assignments, {res.solutions} solutions, {len(res.profiles)} profile(s) up to collineation"


def check_frames() -> tuple[bool, str]:
    bad = {f.label: casegen.structural_checks(f) for f in casegen.all_frames()}
    bad = {k: v for k, v in bad.items() if v}
    c3 = [casegen.plane_weight_counts(casegen.make_frame(3, s)) for s in (1, 2)]
    ok = not bad and all(c[17] == 10 and c[15] == 5 for c in c3)
    return ok, f"structural violations: {len(bad)}; case 3 plane weights: {[dict(sorted(c.items())) for c in c3]}"


PUBLISHED_COUNTS = {(1, None): 12, (2, 1): 12, (2, 2): 40, (2, 3): 101, (3, 1): 43, (3, 2): 70}


def check_case_counts() -> tuple[bool, str]:
    ok = True
    parts = []
    for case, sub in casegen.CASES:
        cc = casegen.count_case(casegen.make_frame(case, sub))
        want = PUBLISHED_COUNTS[(case, sub)]
        ok &= cc.orbits == want
        parts.append(f"{cc.frame.label}: {cc.orbits} orbits ({cc.raw} raw)")
        if case == 1:
            f = cc.frame
            g_bad = casegen.line_str(f.g0_candidates[0])
            fig = casegen.figure_branch(f)
            ok &= cc.g0_raw[g_bad] == 0
            ok &= len(fig) == want
            parts.append(f"g0={g_bad}: {cc.g0_raw[g_bad]} raw / {cc.g0_orbits[g_bad]} orbits (expected 0)")
    return ok, "; ".join(parts)


def check_fixtures() -> tuple[bool, str]:
    f = casegen.make_frame(1)
    recs = casegen.figure_solutions()
    valid = sum(not casegen.validate_solution(f, r.solution) for r in recs)
    fixture_h = sorted(r.solution.h for r in recs)
    enum_h = sorted(s.h for s in casegen.figure_branch(f))
    ok = valid == 12 and len(recs) == 12 and fixture_h == enum_h
    return ok, f"{valid}/{len(recs)} valid; enumeration equals fixtures: {fixture_h == enum_h}"


# --- oracle-scale search ----------------------------------------------------------


def brute_force_completions(inst: completion.CompletionInstance) -> list[tuple[int, ...]]:
    """Every assignment of the free cells that meets the instance's requirements."""
    cells = [(c, b) for c in range(2 * inst.n) for b in range(inst.r) if inst.free[c] >> b & 1]
    if len(cells) > 16:
        raise ValueError("too many free cells for brute force")
    idx = np.arange(1 << len(cells), dtype=np.int64)
    cols = np.tile(np.array(inst.fixed, dtype=np.int64), (len(idx), 1))
    for t, (c, b) in enumerate(cells):
        cols[:, c] |= ((idx >> t) & 1) << b
    msgs = np.arange(1, 1 << inst.r, dtype=np.int64)
    par = np.array([bin(v).count("1") & 1 for v in range(1 << inst.r)], dtype=bool)
    ok = np.ones(len(idx), dtype=bool)
    for start in range(0, len(idx), 512):
        block = cols[start:start + 512]
        a = par[msgs[None, :, None] & block[:, None, 0::2]]
        b = par[msgs[None, :, None] & block[:, None, 1::2]]
        weight = (a | b).sum(axis=2)
        ok[start:start + 512] = (weight >= inst.d).all(axis=1)
    out = []
    for row in cols[ok]:
        cand = tuple(int(x) for x in row)
        if inst.require_strength3:
            code = addcode.AdditiveCode(inst.n, BitMatrix.from_columns(cand, inst.r))
            if addcode.strength(addcode.line_system(code)) < 3:
                continue
        out.append(cand)
    return sorted(out)


def random_instance(rng: random.Random, max_free: int = 12) -> completion.CompletionInstance:
    """A random generator matrix with some cells freed; its distance (or one more) is the target."""
    r = rng.choice([3, 4, 5, 6])
    n = rng.randint(r // 2 + 2, 8)
    while True:
        cols = [rng.getrandbits(r) for _ in range(2 * n)]
        try:
            code = addcode.AdditiveCode(n, BitMatrix.from_columns(cols, r))
        except ValueError:
            continue
        break
    d = addcode.min_distance(code) + (1 if rng.random() < 0.3 else 0)
    free = [0] * (2 * n)
    for _ in range(rng.randint(1, max_free)):
        free[rng.randrange(2 * n)] |= 1 << rng.randrange(r)
    if rng.random() < 0.3 and n >= 3:  # two interchangeable coordinates
        cols[2 * n - 2:] = cols[2 * n - 4:2 * n - 2]
        free[2 * n - 2:] = free[2 * n - 4:2 * n - 2]
    while sum(bin(m).count("1") for m in free) > max_free:
        c = rng.randrange(2 * n)
        free[c] &= free[c] - 1
    fixed = tuple(c & ~m for c, m in zip(cols, free))
    s3 = r == 6 and rng.random() < 0.5
    return completion.CompletionInstance(r, n, max(d, 1), fixed, tuple(free), require_strength3=s3)


def _cols(o: completion.SearchOutcome) -> list[tuple[int, ...]]:
    return sorted(tuple(m.columns()) for m in o.found)


def check_oracle_search(count: int = 24, seed: int = 2024) -> tuple[bool, str]:
    rng = random.Random(seed)
    ok = True
    nonempty = 0
    for _ in range(count):
        inst = random_instance(rng)
        want = brute_force_completions(inst)
        nonempty += bool(want)
        for strategy in completion.STRATEGIES:
            for prune in (True, False):
                o = completion.search(inst, strategy=strategy, prune=prune, symmetry=False)
                ok &= _cols(o) == want and o.verdict == ("found" if want else "none-found")
            for depth in range(min(2, len(inst.slot_order)) + 1):
                shards = completion.make_shards(inst, depth, strategy=strategy, symmetry=False)
                ok &= _cols(completion.run_shards(inst, shards, strategy=strategy, symmetry=False)) == want
    return ok, f"{count} instances ({nonempty} with completions), both strategies, prune on/off, shard depths 0-2"


def check_plant_and_recover() -> tuple[bool, str]:
    code = cyclic15.build_cyclic_code()
    inst, planted = completion.planted_instance(code, range(10, 15), 5, 9)
    o = completion.search(inst)
    hit = any(m.rows == planted.rows for m in o.found)
    return o.verdict == "found" and hit, (f"{inst.free_cells} free cells; {len(o.found)} completion(s), "
                                          f"planted recovered: {hit}; {o.stats['nodes']} nodes")


SMOKE_BUDGET = {"line": 4000, "row": 20000}


def check_real_smoke(budget: dict | None = None) -> tuple[bool, str]:
    budget = budget or SMOKE_BUDGET
    f = casegen.make_frame(1)
    inst = completion.build_instance(f, casegen.figure_solutions()[0].solution)
    ok = inst.free_cells == 113
    parts = [f"{inst.free_cells} free cells"]
    with tempfile.TemporaryDirectory() as tmp:
        for strategy, b in budget.items():
            shard = completion.make_shards(inst, 1, strategy=strategy)[0]
            path = Path(tmp) / f"{strategy}.ckpt"
            first = completion.search(inst, shard=shard, strategy=strategy, budget=b // 2, checkpoint_path=path)
            written = path.exists()
            resumed = completion.search(inst, shard=shard, strategy=strategy, budget=b - b // 2,
                                        resume=completion.Checkpoint.read(path))
            single = completion.search(inst, shard=shard, strategy=strategy, budget=b)
            same = resumed.stats == single.stats and resumed.checkpoints[0].path == single.checkpoints[0].path
            ok &= written and same and not resumed.found and first.stats["nodes"] == b // 2
            if strategy == "row":
                ok &= not resumed.nine_row_flag
            parts.append(f"{strategy}: {resumed.stats['nodes']} nodes, {resumed.verdict}, "
                         f"resume consistent: {same}, nine-row flag: {resumed.nine_row_flag}")
    return ok, "; ".join(parts)


def check_table() -> tuple[bool, str]:
    t = bounds.OptimalTable.load()
    clean = bounds.table_consistency(t)
    seeded = [t.with_entry(14, 8, 11), t.with_entry(10, 12, 2), t.with_entry(15, 6, 12)]
    caught = [bool(bounds.table_consistency(s)) for s in seeded]
    return not clean and all(caught), f"{len(t.entries)} entries, {len(clean)} violations; corruptions detected: {caught}"


CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("subspace-bound chain", check_subspace_bounds),
    ("griesmer contradictions", check_griesmer),
    ("cyclic [15,4.5,9] code", check_cyclic),
    ("fano weight profile", check_fano),
    ("case frames", check_frames),
    ("case enumeration counts", check_case_counts),
    ("published case-1 solutions", check_fixtures),
    ("search against brute force", check_oracle_search),
    ("plant and recover", check_plant_and_recover),
    ("case-1 smoke shard", check_real_smoke),
    ("bounds table consistency", check_table),
]


def run_check(number: int) -> CheckResult:
    name, fn = CHECKS[number - 1]
    t0 = time.monotonic()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported like one
        passed, detail = False, f"error: {exc!r}"
    return CheckResult(number, name, passed, detail, time.monotonic() - t0)


def run_all(echo: Callable[[str], None] | None = print) -> list[CheckResult]:
    results = []
    for k in range(1, len(CHECKS) + 1):
        res = run_check(k)
        if echo:
            echo(res.line())
        results.append(res)
    return results
