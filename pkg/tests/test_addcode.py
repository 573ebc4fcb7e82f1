import itertools

import pytest
from hypothesis import assume, given, strategies as st

from additive15.addcode import (
    AdditiveCode,
    DegenerateLine,
    DegenerateResult,
    binary_min_weight,
    concat_binary,
    dual_distance,
    format_generator,
    line_system,
    min_distance,
    parse_generator,
    puncture,
    quaternary_weight,
    rotate,
    same_code,
    shorten,
    strength,
    symplectic_dual,
    symplectic_form,
    to_line_system,
    weight_distribution,
)
from additive15.gf2core import BitMatrix, rank


@st.composite
def codes(draw, max_n=6, max_dim2=6):
    n = draw(st.integers(2, max_n))
    dim2 = draw(st.integers(1, min(max_dim2, 2 * n)))
    rows = draw(st.lists(st.integers(1, (1 << 2 * n) - 1), min_size=dim2, max_size=dim2))
    g = BitMatrix(tuple(rows), 2 * n)
    assume(rank(g) == dim2)
    return AdditiveCode(n, g)


def naive_words(c):
    out = []
    for x in range(1 << c.dim2):
        w = 0
        for i, row in enumerate(c.gen.rows):
            if x >> i & 1:
                w ^= row
        out.append(w)
    return out


def test_quaternary_weight_counts_nonzero_pairs():
    assert quaternary_weight(0b10_00_11_01, 4) == 3
    assert quaternary_weight(0, 4) == 0


def test_rank_deficient_generator_rejected():
    with pytest.raises(ValueError):
        AdditiveCode(2, BitMatrix((0b1100, 0b1100), 4))


@given(codes())
def test_min_distance_matches_naive(c):
    words = naive_words(c)
    assert min_distance(c) == min(quaternary_weight(w, c.n) for w in words[1:])
    dist = weight_distribution(c)
    assert sum(dist.values()) == 1 << c.dim2
    assert dist[0] == 1


@given(codes())
def test_symplectic_dual(c):
    dual = symplectic_dual(c)
    assert dual.dim2 == 2 * c.n - c.dim2
    for u in c.gen.rows:
        for v in dual.gen.rows:
            assert symplectic_form(u, v, c.n) == 0
    if dual.dim2:
        assert same_code(symplectic_dual(dual), c)


@given(codes())
def test_dual_distance_is_strength_plus_one(c):
    assume(c.dim2 < 2 * c.n)
    by_enum = dual_distance(c, method="enumerate").value
    assert by_enum == strength(line_system(c)) + 1
    if not any(ln.degenerate for ln in line_system(c).lines):
        assert dual_distance(c, method="strength").value == by_enum


@given(codes())
def test_concatenation_doubles_weights(c):
    assert binary_min_weight(concat_binary(c)) == 2 * min_distance(c)


@given(codes(), st.data())
def test_puncture_and_shorten(c, data):
    i = data.draw(st.integers(0, c.n - 1))
    d = min_distance(c)
    try:
        p = puncture(c, i)
    except DegenerateResult:
        pass
    else:
        assert p.dim2 == c.dim2 and min_distance(p) >= d - 1
    s = shorten(c, i)
    assert s.dim2 >= c.dim2 - 2
    if s.dim2:
        assert min_distance(s) >= d
    # shortened words are exactly the codewords vanishing at i, with i removed
    keep = {w for w in naive_words(c) if quaternary_weight(w >> (2 * (c.n - 1 - i)) & 3, 1) == 0}
    assert len(keep) == 1 << s.dim2


@given(codes(), st.integers(-3, 7))
def test_rotate(c, s):
    r = rotate(c, s)
    assert weight_distribution(r) == weight_distribution(c)
    assert same_code(rotate(r, -s), c)


@given(codes())
def test_generator_text_roundtrip(c):
    back = parse_generator(format_generator(c))
    assert back == c


def test_generator_text_errors():
    with pytest.raises(ValueError):
        parse_generator("additive n=2 dim2=1\n10 1")
    with pytest.raises(ValueError):
        parse_generator("nonsense")


def test_strength_of_independent_lines():
    # three lines in 6 dims spanning everything: strength 3
    c = AdditiveCode(3, BitMatrix.identity(6))
    assert strength(to_line_system(c)) == 3
    degenerate = AdditiveCode(2, BitMatrix((0b1000, 0b0010), 4))
    assert strength(line_system(degenerate)) == 0
    with pytest.raises(DegenerateLine):
        to_line_system(degenerate)


def test_strength_matches_definition(rng):
    for _ in range(20):
        n, r = 5, 6
        cols = [rng.getrandbits(r) or 1 for _ in range(2 * n)]
        g = BitMatrix.from_columns(cols, r)
        if rank(g) < r:
            continue
        ls = line_system(AdditiveCode(n, g))
        want = 0
        if not any(ln.degenerate for ln in ls.lines):
            for t in range(1, 4):
                if all(rank(BitMatrix.from_columns([v for ln in sub for v in (ln.a, ln.b)], r).transpose()) == 2 * t
                       for sub in itertools.combinations(ls.lines, t)):
                    want = t
                else:
                    break
        assert strength(ls) == want
