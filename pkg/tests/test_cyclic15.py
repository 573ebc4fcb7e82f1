import pytest

from additive15.addcode import (
    binary_min_weight,
    concat_binary,
    dual_distance,
    min_distance,
    puncture,
    rotate,
    same_code,
    shorten,
    weight_distribution,
)
from additive15.cyclic15 import (
    PropertyFailed,
    build_cyclic_code,
    gf16_mul,
    gf16_pow,
    trace,
    verify_cyclic_properties,
)


@pytest.fixture(scope="module")
def code():
    return build_cyclic_code()


def test_field_axioms():
    for x in range(1, 16):
        assert gf16_mul(x, gf16_pow(x, 14)) == 1
        for y in range(16):
            assert gf16_mul(x, y) == gf16_mul(y, x)
    assert len({gf16_pow(2, i) for i in range(15)}) == 15


def test_trace_is_linear_and_balanced():
    values = [trace(x) for x in range(16)]
    assert values.count(1) == 8
    for x in range(16):
        for y in range(16):
            assert trace(x ^ y) == trace(x) ^ trace(y)
        assert trace(gf16_mul(x, x)) == trace(x)


def test_parameters(code):
    assert (code.n, code.dim2) == (15, 9)
    assert len(code.codewords()) == 512
    rep = verify_cyclic_properties(code)
    assert rep.ok and rep.min_distance == 9 and rep.strength == 3 and rep.shift_closed


def test_weight_distribution(code):
    assert weight_distribution(code) == {0: 1, 9: 85, 10: 105, 11: 75, 12: 135, 13: 75, 14: 15, 15: 21}


def test_every_rotation_is_the_same_code(code):
    assert all(same_code(rotate(code, s), code) for s in range(15))


def test_dual_distance_by_both_methods(code):
    assert dual_distance(code, "enumerate").value == 4
    assert dual_distance(code, "strength").value == 4


def test_derived_codes(code):
    s = shorten(code, 0)
    assert s.dim2 == 7 and min_distance(s) == 9
    assert min_distance(puncture(code, 0)) == 8
    assert binary_min_weight(concat_binary(code)) == 18


def test_property_failure_is_reported(code):
    broken = shorten(code, 0)
    with pytest.raises(PropertyFailed):
        verify_cyclic_properties(broken)
    assert not verify_cyclic_properties(broken, raise_on_failure=False).ok
