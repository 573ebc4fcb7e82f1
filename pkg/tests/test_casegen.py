import pytest

from additive15.casegen import (
    CASES,
    LINES,
    LINES_IN,
    LINES_THROUGH,
    PLANE_POINTS,
    HLineSystem,
    SolutionRecord,
    UnknownCase,
    all_frames,
    count_case,
    enumerate_solutions,
    figure_branch,
    figure_solutions,
    format_solutions,
    frame_stabilizer,
    hweight_targets,
    make_frame,
    parse_solutions,
    plane_weight_counts,
    pt,
    structural_checks,
    transform,
    validate_solution,
)


def test_incidence_counts():
    assert len(LINES) == 35
    assert all(len(v) == 7 for v in LINES_THROUGH.values())
    assert all(len(v) == 7 for v in LINES_IN.values())
    assert all(len(v) == 7 for v in PLANE_POINTS.values())


@pytest.mark.parametrize("case,sub", CASES)
def test_frames_are_structurally_sound(case, sub):
    f = make_frame(case, sub)
    assert structural_checks(f) == []
    assert f.w.total() == 35
    hweight_targets(f)  # integral targets


def test_point_type_counts():
    assert make_frame(1).w.m == (3, 4, 8)
    assert make_frame(2, 1).w.m == (1, 8, 6)
    assert make_frame(3, 1).w.m == (0, 10, 5)


def test_plane_weights():
    for sub in (1, 2):
        c = plane_weight_counts(make_frame(3, sub))
        assert c[17] == 10 and c[15] == 5
    c2 = plane_weight_counts(make_frame(2, 1))
    assert (c2[13], c2[15], c2[17]) == (1, 3, 11)


def test_unknown_case():
    with pytest.raises(UnknownCase):
        make_frame(2, 7)
    with pytest.raises(UnknownCase):
        make_frame(4)


def test_structural_checks_catch_bad_weights():
    f = make_frame(3, 1)
    bad = type(f)(f.case, f.subcase, f.w.__class__(4, (0,) + (2,) * 15), f.p0, f.special)
    assert structural_checks(bad)


EXPECTED = {(1, None): (72, 12), (2, 1): (264, 12), (2, 2): (232, 40), (2, 3): (792, 101),
            (3, 1): (398, 43), (3, 2): (1290, 70)}


@pytest.mark.parametrize("case,sub", CASES)
def test_counts(case, sub):
    cc = count_case(make_frame(case, sub))
    assert (cc.raw, cc.orbits) == EXPECTED[(case, sub)]


def test_case1_branches():
    cc = count_case(make_frame(1))
    assert cc.g0_raw == {"{0100,1000,1100}": 48, "{0110,1000,1110}": 24}
    assert cc.g0_orbits == {"{0100,1000,1100}": 9, "{0110,1000,1110}": 3}


@pytest.mark.parametrize("case,sub", CASES)
def test_enumerated_solutions_validate_and_orbits_are_closed(case, sub):
    f = make_frame(case, sub)
    sols = enumerate_solutions(f)
    hs = {s.h for s in sols}
    assert len(hs) == len(sols)
    for s in sols[:25]:
        assert validate_solution(f, s) == []
    if f.case != 1:  # the Case 1 g0 rule breaks the frame symmetry
        for g in frame_stabilizer(f)[:6]:
            assert all(transform(h, g) in hs for h in list(hs)[:25])


def test_figure_solutions_validate():
    f = make_frame(1)
    recs = figure_solutions()
    assert len(recs) == 12
    assert [r.index for r in recs] == list(range(1, 13))
    for r in recs:
        assert validate_solution(f, r.solution) == []
        assert sum(r.solution.h) == 11


def test_figure_branch_equals_fixtures():
    fixture = sorted(r.solution.h for r in figure_solutions())
    assert sorted(s.h for s in figure_branch()) == fixture


def test_validate_rejects_broken_solution():
    f = make_frame(1)
    s = figure_solutions()[0].solution
    slots = list(s.slots)
    slots[0] = ("L5", pt("1111"), pt("0001"))
    assert validate_solution(f, HLineSystem.from_slots(slots))


def test_solution_file_roundtrip():
    recs = [SolutionRecord(2, 3, i + 1, s) for i, s in enumerate(enumerate_solutions(make_frame(2, 3))[:5])]
    back = parse_solutions(format_solutions(recs))
    assert back == recs
    with pytest.raises(ValueError):
        parse_solutions("solution 1 - 1\nslot L5 10 01\n")


def test_all_frames():
    assert [f.label for f in all_frames()] == [make_frame(c, s).label for c, s in CASES]
