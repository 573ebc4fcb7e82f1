"""Command-line entry point: ``additive15 <command> ...``.

Exit codes: 0 success, 1 a checked property failed (or a completion was
found), 2 usage error, 3 search budget exhausted with a checkpoint.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import acceptance, addcode, bounds, casegen, completion, cyclic15

OK, FAILED, USAGE, BUDGET = 0, 1, 2, 3


class Report:
    """Ordered key/value report printed as text or as ``key=value`` lines."""

    def __init__(self, machine: bool):
        self.machine = machine
        self.items: list[tuple[str, object]] = []
        self.text: list[str] = []

    def add(self, key: str, value, text: str | None = None):
        self.items.append((key, value))
        if text is not None:
            self.text.append(text)

    def say(self, text: str):
        self.text.append(text)

    def emit(self, out=None):
        out = out or sys.stdout
        if self.machine:
            for k, v in self.items:
                print(f"{k}={v}", file=out)
        else:
            for ln in self.text:
                print(ln, file=out)


def _subcase(s: str | None) -> int | None:
    if s in (None, "-", "0"):
        return None
    return int(s)


def cmd_cyclic(a, rep: Report) -> int:
    c = cyclic15.build_cyclic_code()
    r = cyclic15.verify_cyclic_properties(c, raise_on_failure=False)
    dd = addcode.dual_distance(c)
    rep.add("n", c.n, f"cyclic additive code [{c.n},{c.k:g},{r.min_distance}]_4")
    rep.add("dim2", c.dim2)
    rep.add("min_distance", r.min_distance, f"minimum distance {r.min_distance}")
    rep.add("strength", r.strength, f"strength {r.strength}")
    rep.add("dual_distance", dd.value, f"dual distance {dd.value} ({dd.method})")
    rep.add("shift_closed", int(r.shift_closed), f"closed under cyclic shift: {r.shift_closed}")
    for f in r.failures:
        rep.say(f"FAILED: {f}")
    if a.out:
        Path(a.out).write_text(addcode.format_generator(c))
        rep.add("written", a.out, f"generator written to {a.out}")
    ok = r.ok and dd.value == r.strength + 1
    rep.add("status", "ok" if ok else "failed")
    return OK if ok else FAILED


def _dim2(a) -> int:
    if a.dim2 is not None:
        return a.dim2
    k = Fraction(a.k)
    if (2 * k).denominator != 1:
        raise ValueError(f"dimension {a.k} is not a multiple of 1/2")
    return int(2 * k)


def cmd_bounds(a, rep: Report) -> int:
    if a.bounds_cmd == "griesmer":
        g = bounds.griesmer_min_length(a.dim, a.d, a.q)
        rep.add("griesmer", g, str(g))
        return OK
    if a.bounds_cmd == "nonexist":
        v = bounds.quaternary_nonexistence(a.n, _dim2(a), a.d)
        rep.add("verdict", v.verdict)
        rep.add("reason", v.reason or "-")
        for i, t in enumerate(v.trace):
            rep.add(f"trace{i}", t)
        rep.say(str(v))
        return OK
    table = bounds.OptimalTable.load(a.table)
    bad = bounds.table_consistency(table)
    rep.add("entries", len(table.entries), f"{len(table.entries)} entries")
    rep.add("violations", len(bad), f"{len(bad)} violations")
    for v in bad:
        rep.say(f"  {v}")
    return OK if not bad else FAILED


def cmd_enumerate(a, rep: Report) -> int:
    f = casegen.make_frame(a.case, _subcase(a.subcase))
    cc = casegen.count_case(f)
    rep.add("frame", f.label, f.label)
    rep.add("solutions", cc.orbits, f"{cc.orbits} solutions")
    rep.add("raw", cc.raw, f"{cc.raw} raw solutions, stabilizer of order {cc.stabilizer_order}")
    for g, n in cc.g0_raw.items():
        rep.add(f"g0 {g}", f"{cc.g0_orbits[g]}/{n}", f"  g0 = {g}: {cc.g0_orbits[g]} solutions ({n} raw)")
    if a.out:
        sols = casegen.figure_branch(f) if a.figure_branch else casegen.enumerate_solutions(f)
        recs = [casegen.SolutionRecord(f.case, f.subcase, i + 1, s) for i, s in enumerate(sols)]
        Path(a.out).write_text(casegen.format_solutions(recs))
        rep.add("written", a.out, f"{len(recs)} solutions written to {a.out}")
    return OK


def cmd_validate(a, rep: Report) -> int:
    recs = casegen.read_solutions(a.solutions)
    good = 0
    for r in recs:
        f = casegen.make_frame(r.case, r.subcase)
        bad = casegen.validate_solution(f, r.solution)
        good += not bad
        for b in bad:
            rep.say(f"solution {r.index} ({f.label}): {b}")
    rep.add("valid", good, f"{good}/{len(recs)} valid")
    rep.add("total", len(recs))
    return OK if good == len(recs) else FAILED


def _solutions_for(f: casegen.CaseFrame, path: str | None) -> list[casegen.HLineSystem]:
    if path:
        return [r.solution for r in casegen.read_solutions(path)
                if (r.case, r.subcase) == (f.case, f.subcase)]
    if f.case == 1:
        return [r.solution for r in casegen.figure_solutions()]
    sols = casegen.enumerate_solutions(f)
    return casegen.orbit_representatives(sols, casegen.frame_stabilizer(f))


def _report_outcome(rep: Report, o: completion.SearchOutcome):
    rep.add("verdict", o.verdict, f"verdict: {o.verdict}")
    for k in completion.STAT_KEYS:
        rep.add(k, o.stats.get(k, 0))
    rep.say("  " + " ".join(f"{k}={o.stats.get(k, 0)}" for k in completion.STAT_KEYS))
    rep.add("nine_row_flag", int(o.nine_row_flag), f"  nine-row flag: {o.nine_row_flag}")
    rep.add("found", len(o.found))
    for m in o.found:
        rep.say("found generator:")
        rep.text += ["  " + r for r in m.to_strings()]


def _complete_one(a, f, sol, rep: Report, tag: str = "") -> int:
    inst = completion.build_instance(f, sol)
    rep.add(tag + "instance", inst.instance_hash(a.strategy), f"{tag}instance {inst.instance_hash(a.strategy)}")
    rep.add(tag + "free_cells", inst.free_cells, f"  {inst.free_cells} free cells")
    kw = dict(strategy=a.strategy, prune=not a.no_prune, budget=a.budget, time_limit=a.time_limit,
              max_found=a.max_found)
    if a.shard_depth is not None:
        shards = completion.make_shards(inst, a.shard_depth, strategy=a.strategy)
        rep.add(tag + "shards", len(shards), f"  {len(shards)} shards at depth {a.shard_depth}")
        if a.shard is not None:
            if not 0 <= a.shard < len(shards):
                raise ValueError(f"shard {a.shard} out of range 0..{len(shards) - 1}")
            shards = [shards[a.shard]]
    else:
        shards = [completion.SearchShard(inst.instance_hash(a.strategy))]
    if len(shards) == 1:
        resume = completion.Checkpoint.read(a.checkpoint) if a.resume else None
        o = completion.search(inst, shard=shards[0], resume=resume, checkpoint_path=a.checkpoint,
                              checkpoint_every=a.checkpoint_every, **kw)
    else:
        if a.resume:
            raise ValueError("--resume needs a single shard (use --shard)")
        o = completion.run_shards(inst, shards, jobs=a.jobs, **kw)
    _report_outcome(rep, o)
    if o.verdict == "found":
        return FAILED
    if o.verdict == "budget-exhausted":
        if a.checkpoint and len(shards) == 1:
            rep.add("checkpoint", a.checkpoint, f"  checkpoint written to {a.checkpoint}")
        return BUDGET
    return OK


def cmd_complete(a, rep: Report) -> int:
    if a.exhaustive:
        worst = OK
        for case, sub in casegen.CASES:
            f = casegen.make_frame(case, sub)
            for k, sol in enumerate(_solutions_for(f, a.solutions), 1):
                rep.say(f"{f.label}, solution {k}")
                worst = max(worst, _complete_one(a, f, sol, rep, tag=f"{case}.{sub or 0}.{k}."))
        return worst
    if a.case is None or a.solution is None:
        raise ValueError("--case and --solution are required")
    f = casegen.make_frame(a.case, _subcase(a.subcase))
    sols = _solutions_for(f, a.solutions)
    if not 1 <= a.solution <= len(sols):
        raise ValueError(f"solution {a.solution} out of range 1..{len(sols)}")
    return _complete_one(a, f, sols[a.solution - 1], rep)


def cmd_verify(a, rep: Report) -> int:
    results = acceptance.run_all(echo=None if a.machine else print)
    for r in results:
        rep.add(f"check{r.number}", "pass" if r.passed else "fail")
        if a.stats:
            rep.add(f"check{r.number}_seconds", f"{r.seconds:.2f}", f"  check {r.number}: {r.seconds:.2f} s")
    passed = sum(r.passed for r in results)
    rep.add("passed", passed, f"{passed}/{len(results)} checks passed")
    return OK if passed == len(results) else FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="additive15", description=__doc__.splitlines()[0])
    p.add_argument("--machine", action="store_true", help="key=value output")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("cyclic", help="build and verify the cyclic [15,4.5,9] code")
    c.add_argument("--out", help="write the generator matrix here")

    b = sub.add_parser("bounds", help="Griesmer bound, nonexistence arguments, table check")
    bs = b.add_subparsers(dest="bounds_cmd", required=True)
    g = bs.add_parser("griesmer")
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--q", type=int, default=2)
    ne = bs.add_parser("nonexist")
    ne.add_argument("--n", type=int, required=True)
    grp = ne.add_mutually_exclusive_group(required=True)
    grp.add_argument("--k", help="quaternary dimension, may be half-integral")
    grp.add_argument("--dim2", type=int, help="binary dimension")
    ne.add_argument("--d", type=int, required=True)
    tc = bs.add_parser("table-check")
    tc.add_argument("--table", help="table file (default: shipped table)")

    e = sub.add_parser("enumerate", help="solve the h-weight equations of a case")
    e.add_argument("--case", type=int, required=True)
    e.add_argument("--subcase")
    e.add_argument("--out", help="write solutions to this file")
    e.add_argument("--figure-branch", action="store_true",
                   help="with --out for case 1: only the normalisation of the published list")

    v = sub.add_parser("validate", help="check a solution file against its frames")
    v.add_argument("--solutions", required=True)

    m = sub.add_parser("complete", help="completion search for one case solution")
    m.add_argument("--case", type=int)
    m.add_argument("--subcase")
    m.add_argument("--solution", type=int, help="1-based index")
    m.add_argument("--solutions", help="solution file (default: published list or enumeration)")
    m.add_argument("--shard-depth", type=int)
    m.add_argument("--shard", type=int)
    m.add_argument("--budget", type=int, help="node budget per shard")
    m.add_argument("--time-limit", type=float, help="seconds")
    m.add_argument("--strategy", choices=completion.STRATEGIES, default="line")
    m.add_argument("--checkpoint")
    m.add_argument("--checkpoint-every", type=int)
    m.add_argument("--resume", action="store_true")
    m.add_argument("--jobs", type=int, default=1)
    m.add_argument("--max-found", type=int)
    m.add_argument("--no-prune", action="store_true")
    m.add_argument("--exhaustive", action="store_true", help="every solution of every case")

    vp = sub.add_parser("verify-paper", help="run every reproduction check")
    vp.add_argument("--stats", action="store_true", help="add timings")
    return p


COMMANDS = {
    "cyclic": cmd_cyclic,
    "bounds": cmd_bounds,
    "enumerate": cmd_enumerate,
    "validate": cmd_validate,
    "complete": cmd_complete,
    "verify-paper": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    if a.cmd == "complete" and a.resume and not a.checkpoint:
        parser.print_usage(sys.stderr)
        print("error: --resume needs --checkpoint", file=sys.stderr)
        return USAGE
    rep = Report(a.machine)
    try:
        code = COMMANDS[a.cmd](a, rep)
    except (casegen.UnknownCase, ValueError, FileNotFoundError, KeyError) as exc:
        rep.emit()
        msg = f"unknown case/subcase {exc.args[0]}" if isinstance(exc, casegen.UnknownCase) else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return USAGE if isinstance(exc, (casegen.UnknownCase, FileNotFoundError)) else FAILED
    rep.emit()
    return code


if __name__ == "__main__":
    sys.exit(main())
