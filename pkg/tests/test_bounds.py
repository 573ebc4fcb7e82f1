import math

import pytest
from hypothesis import given, strategies as st

from additive15.bounds import (
    MissingEntry,
    OptimalTable,
    griesmer_min_length,
    quaternary_nonexistence,
    table_consistency,
)


def test_griesmer_examples():
    assert griesmer_min_length(8, 18, 2) == 40
    assert griesmer_min_length(5, 18, 2) == 37
    assert griesmer_min_length(3, 4, 3) == 4 + 2 + 1


@given(st.integers(1, 12), st.integers(1, 40), st.sampled_from([2, 3, 4]))
def test_griesmer_formula(k, d, q):
    assert griesmer_min_length(k, d, q) == sum(math.ceil(d / q ** i) for i in range(k))


def test_nonexistence_by_concatenation():
    v = quaternary_nonexistence(13, 8, 9)
    assert v.verdict == "nonexistent" and v.reason == "griesmer-concat"
    assert "40 > 39" in v.trace[0]
    v = quaternary_nonexistence(12, 5, 9)
    assert v.verdict == "nonexistent" and "37 > 36" in v.trace[0]


def test_nonexistence_by_shortening_chain():
    v = quaternary_nonexistence(15, 20, 5)
    assert v.verdict == "nonexistent" and v.reason == "shorten-chain"
    assert v.trace[:3] == ["shorten -> [14,9,5]_4", "shorten -> [13,8,5]_4", "shorten -> [12,7,5]_4"]
    assert "[12,7,5]" in v.trace[-1]


def test_main_result_is_not_assumed():
    assert quaternary_nonexistence(15, 10, 9).verdict == "unknown"


def test_existence_from_table():
    v = quaternary_nonexistence(15, 9, 9)
    assert v.verdict == "exists"


@given(st.integers(4, 15), st.integers(2, 20), st.integers(1, 14))
def test_nonexistence_is_monotone_in_d(n, dim2, d):
    if quaternary_nonexistence(n, dim2, d).verdict == "nonexistent":
        assert quaternary_nonexistence(n, dim2, d + 1).verdict == "nonexistent"


def test_table_loads_and_is_consistent():
    t = OptimalTable.load()
    assert len(t.entries) == 213
    assert table_consistency(t) == []
    assert t[15, 10].exact and t[15, 10].lo == 8
    assert t[15, 9].exact and t[15, 9].lo == 9
    with pytest.raises(MissingEntry):
        t[16, 2]


@pytest.mark.parametrize("n,dim2,d", [(14, 8, 11), (10, 12, 2), (15, 6, 12), (9, 4, 3)])
def test_seeded_corruption_is_detected(n, dim2, d):
    t = OptimalTable.load().with_entry(n, dim2, d)
    assert table_consistency(t)


def test_parse_ranges_and_comments():
    t = OptimalTable.parse("# header\n4 6 3-4  # range\n4 5 3\n")
    assert t[6, 4].lo == 3 and t[6, 4].hi == 4
    assert str(t[5, 4]) == "[5,2,3]"
