from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padic_bessel.errors import ParseError
from padic_bessel.symbol_algebra import (
    ConstantSpec,
    ExpTowerSpec,
    OneMinusJHatSpec,
    PowerSpec,
    TableSpec,
)
from padic_bessel.symbol_grammar import format_symbol_spec, parse_symbol_spec

positive = st.floats(min_value=1e-6, max_value=1e6, allow_nan=False, allow_infinity=False)
non_negative = st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False).map(abs)
signed = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
jhat_value = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)
gammas = st.integers(min_value=-60, max_value=60)

constants = st.builds(ConstantSpec, non_negative)
powers = st.builds(PowerSpec, positive, positive)
towers = st.builds(
    ExpTowerSpec,
    st.integers(min_value=1, max_value=3),
    st.lists(st.tuples(non_negative, st.integers(min_value=1, max_value=5)), min_size=1, max_size=4)
    .filter(lambda terms: any(c > 0 for c, _ in terms))
    .map(tuple),
)
tables = st.builds(
    TableSpec,
    st.dictionaries(gammas, signed, min_size=1, max_size=6).map(lambda d: tuple(d.items())),
    st.one_of(st.just("zero"), st.just("clamp"), signed),
)
jhats = st.builds(
    OneMinusJHatSpec,
    st.builds(
        TableSpec,
        st.dictionaries(gammas, jhat_value, min_size=1, max_size=6).map(lambda d: tuple(d.items())),
        st.just("clamp"),
    ),
)
specs = st.one_of(constants, powers, towers, tables, jhats)


@settings(max_examples=1000, deadline=None)
@given(specs)
def test_format_then_parse_returns_the_same_spec(spec) -> None:
    assert parse_symbol_spec(format_symbol_spec(spec)) == spec


@pytest.mark.parametrize(
    ("text", "expected"),
    [
        ("const:1", ConstantSpec(1.0)),
        ("const:0.25", ConstantSpec(0.25)),
        ("power:a=1,b=2", PowerSpec(1.0, 2.0)),
        ("power:a=0.5,b=3", PowerSpec(0.5, 3.0)),
        ("tower:j=1;terms=1*y^1", ExpTowerSpec(1, ((1.0, 1),))),
        ("tower:j=2;terms=0*y^1+2.5*y^3", ExpTowerSpec(2, ((0.0, 1), (2.5, 3)))),
        ("table:0:1,1:-2;default=clamp", TableSpec(((0, 1.0), (1, -2.0)), "clamp")),
        ("table:-3:0.5;default=zero", TableSpec(((-3, 0.5),), "zero")),
        ("table:2:1;default=-0.5", TableSpec(((2, 1.0),), -0.5)),
        ("oneminusjhat:table=0:0.25,1:-0.5", OneMinusJHatSpec(TableSpec(((0, 0.25), (1, -0.5)), "clamp"))),
        ("const:1e-3", ConstantSpec(0.001)),
    ],
)
def test_parse_examples(text: str, expected) -> None:
    assert parse_symbol_spec(text) == expected


def test_format_is_canonical() -> None:
    assert format_symbol_spec(PowerSpec(1.0, 2.0)) == "power:a=1.0,b=2.0"
    assert format_symbol_spec(TableSpec(((1, 2.0), (0, 1.0)), "zero")) == "table:0:1.0,1:2.0;default=zero"
    assert format_symbol_spec(ExpTowerSpec(1, ((1.0, 1), (2.0, 2)))) == "tower:j=1;terms=1.0*y^1+2.0*y^2"


@pytest.mark.parametrize(
    ("text", "offset"),
    [
        ("", 0),
        ("cons:1", 0),
        ("const:", 6),
        ("const:abc", 6),
        ("const:1x", 7),
        ("const: 1", 6),
        ("const:1 ", 7),
        ("const:1e999", 6),
        ("power:a=1", 9),
        ("power:a=0,b=2", 8),
        ("power:a=1,b=0", 12),
        ("power:b=2,a=1", 6),
        ("power:a=1,,b=2", 10),
        ("tower:j=0;terms=1*y^1", 8),
        ("tower:j=1;terms=1*y^0", 20),
        ("tower:j=1;terms=0*y^1", 16),
        ("tower:j=1;terms=1*y^1+", 22),
        ("tower:j=1;terms=1*x^1", 18),
        ("table:0:1,0:2;default=zero", 10),
        ("table:0:1;default=maybe", 18),
        ("table:0:1", 9),
        ("table:0:1e999;default=zero", 8),
        ("oneminusjhat:table=0:1.5", 21),
        ("oneminusjhat:table=", 19),
    ],
)
def test_malformed_specs_report_offsets(text: str, offset: int) -> None:
    with pytest.raises(ParseError) as excinfo:
        parse_symbol_spec(text)
    assert excinfo.value.offset == offset


def test_parse_error_lists_expected_tokens() -> None:
    with pytest.raises(ParseError) as excinfo:
        parse_symbol_spec("power:a=1")
    assert excinfo.value.offset == 9
    assert "','" in excinfo.value.expected
