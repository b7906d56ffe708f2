import pytest
from hypothesis import given, strategies as st

from klyachko.errors import FieldError
from klyachko.exactfield import CharacterValue, additive_character, field_arith, make_field, primitive_root


def test_make_field():
    assert make_field(5).p == 5
    assert make_field(2).p == 2
    with pytest.raises(FieldError, match="not prime"):
        make_field(6)
    with pytest.raises(FieldError):
        make_field(1)


def test_field_arith_examples():
    F5, F3 = make_field(5), make_field(3)
    assert field_arith("inv", F5(3)).value == 2
    assert field_arith("add", F5(2), F5(4)).value == 1
    assert field_arith("sub", F5(2), F5(4)).value == 3
    assert field_arith("mul", F5(2), F5(4)).value == 3
    assert field_arith("neg", F5(2)).value == 3
    with pytest.raises(ZeroDivisionError):
        field_arith("inv", F3(0))


def test_mixed_fields_rejected():
    with pytest.raises(FieldError):
        make_field(5)(1) + make_field(7)(1)


def test_character_examples():
    F7, F5, F3 = make_field(7), make_field(5), make_field(3)
    zero = additive_character(F7(0))
    assert (zero.exponent, zero.sign) == (0, 1) and zero.is_trivial
    prod = additive_character(F5(2)) * additive_character(F5(4))
    assert prod == CharacterValue(5, 1) == additive_character(F5(6 % 5))
    one = additive_character(F3(1))
    assert (one.exponent, one.sign) == (1, 1) and not one.is_trivial


def test_character_value_sign():
    v = CharacterValue(5, 0, -1)
    assert not v.is_trivial
    assert (v * v).is_trivial
    assert str(v) == "(0, -1)"
    # over F_2 the sign is the same thing as exponent 1
    assert CharacterValue(2, 0, -1) == CharacterValue(2, 1, 1)
    assert CharacterValue(2, 1, -1).is_trivial


def test_primitive_root():
    for p in (2, 3, 5, 7, 11, 101):
        g = primitive_root(p)
        assert len({pow(g, i, p) for i in range(p - 1)}) == p - 1


@given(st.sampled_from([2, 3, 5, 7, 101]), st.integers(), st.integers(), st.integers())
def test_field_axioms(p, a, b, c):
    F = make_field(p)
    x, y, z = F(a), F(b), F(c)
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + (-x) == F.zero
    if x.value:
        assert x * x.inverse() == F.one


@given(st.sampled_from([2, 3, 5, 101]), st.integers(), st.integers())
def test_character_additive(p, a, b):
    F = make_field(p)
    assert additive_character(F(a) + F(b)) == additive_character(F(a)) * additive_character(F(b))
    assert additive_character(F(a)).is_trivial == (F(a).value == 0)
