import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from additive15.gf2core import parity, rank_of_ints
from additive15.projgeom import (
    FactorSpace,
    LineSystem,
    PGLine,
    WeightFunction,
    apply_linear,
    averaging_bounds,
    factor_weights,
    fano_profile_oracle,
    general_linear_group,
    hyperplane_line_profile,
    hyperplane_points,
    is_lemma_profile,
    line,
    pg_lines,
    subspace_weight,
)


@pytest.mark.parametrize("dim,count", [(2, 1), (3, 7), (4, 35), (5, 155)])
def test_line_counts(dim, count):
    lines = pg_lines(dim)
    assert len(lines) == count
    assert all(a ^ b == c for a, b, c in lines)


def test_hyperplanes_of_pg3():
    for n in range(1, 16):
        pts = hyperplane_points(4, n)
        assert len(pts) == 7 and 0 not in pts
        assert all(parity(p & n) == 0 for p in pts)


def test_general_linear_group_orders():
    assert len(general_linear_group(2)) == 6
    assert len(general_linear_group(3)) == 168
    g = general_linear_group(3)[5]
    images = {apply_linear(g, p, 3) for p in range(1, 8)}
    assert images == set(range(1, 8))


def test_pgline_canonical_and_membership():
    ln = line(0b110, 0b011)
    assert sorted(ln.points) == [0b011, 0b101, 0b110]
    assert 0b101 in ln
    assert PGLine(0b101, 0b011).canonical() == PGLine(0b011, 0b101)
    assert PGLine(3, 3).degenerate


def random_system(rng, dim, n):
    lines = []
    while len(lines) < n:
        a, b = rng.randrange(1, 1 << dim), rng.randrange(1, 1 << dim)
        if a != b:
            lines.append(PGLine(a, b))
    return LineSystem(dim, lines)


def test_subspace_and_factor_weights(rng):
    for _ in range(20):
        ls = random_system(rng, 6, 8)
        u = [rng.randrange(1, 64) for _ in range(2)]
        if rank_of_ints(u) < 2:
            continue
        span_u = {0, u[0], u[1], u[0] ^ u[1]}
        inside = sum(p in span_u for p in ls.codepoints)
        assert subspace_weight(ls, u) == inside
        wf = factor_weights(ls, u)
        assert wf.dim == 4
        assert wf.total() == len(ls.codepoints) - inside
        fs = FactorSpace(6, tuple(u))
        for q in range(1, 16):
            assert fs.project(fs.lift(q)) == q
        for p in span_u:
            assert fs.project(p) == 0


@given(st.integers(1, 60), st.integers(0, 60), st.integers(3, 10))
def test_averaging_bounds_monotone(total, hmax, dim):
    b = averaging_bounds(total, hmax, dim)
    assert len(b) == min(5, dim - 1)
    assert all(x >= y >= 0 for x, y in zip(b, b[1:]))


def test_averaging_bounds_known_chain():
    assert averaging_bounds(45, 27, 10) == [27, 18, 13, 10, 8]


def test_hyperplane_profile_matches_naive(rng):
    ls = random_system(rng, 5, 6)
    prof = hyperplane_line_profile(ls)
    for k, n in enumerate(prof.normals.tolist()):
        pts = hyperplane_points(5, n)
        assert prof.inside[k] == sum(all(p in pts for p in ln.points) for ln in ls.lines)
        assert prof.weight[k] == sum(p in pts for p in ls.codepoints)


def test_weight_function_stats():
    wf = WeightFunction.from_dict(3, {1: 3, 2: 2, 3: 1})
    assert wf.total() == 6
    assert wf.m == (1, 1, 1)
    assert wf.weight_of([1, 2]) == 5


def test_fano_oracle_finds_single_profile():
    res = fano_profile_oracle()
    assert res.candidates == 6 ** 7
    assert len(res.profiles) == 1
    (prof,) = res.profiles
    assert is_lemma_profile(prof)


def test_fano_profile_predicate():
    lines = pg_lines(3)
    for prof in itertools.islice(itertools.product(range(6), repeat=7), 0, 20000, 97):
        fours = [p + 1 for p in range(7) if prof[p] == 4]
        want = sorted(prof).count(5) == 4 and len(fours) == 3 and tuple(fours) in lines
        assert is_lemma_profile(prof) == want
    assert not is_lemma_profile(np.array([5, 5, 5, 5, 4, 4, 4]))  # 5,6,7 is not a line
