from __future__ import annotations

import math

import pytest

from padic_bessel.errors import HypothesisAViolation, Psi1Vanishes
from padic_bessel.padic_core import ZERO, FiniteGrid, PrimeDim
from padic_bessel.symbol_algebra import (
    BesselSymbol,
    ConstantSpec,
    ExpTowerSpec,
    LogMagnitude,
    OneMinusJHatSpec,
    PowerSpec,
    TableSpec,
    branch_S,
    crossing_radius,
    eval_abs_psi,
    eval_psi,
    hypothesis_a_report,
    negdef_sample_check,
    posdef_sample_check,
    symbol_S,
    symbol_value,
)
from padic_bessel.symbol_grammar import parse_symbol_spec

P2 = PrimeDim(2, 1)
P3 = PrimeDim(3, 1)


def _symbol(psi1: str, psi2: str, alpha: float = 1.0, dims: PrimeDim = P2) -> BesselSymbol:
    return BesselSymbol.build(parse_symbol_spec(psi1), parse_symbol_spec(psi2), alpha, dims)


@pytest.mark.parametrize(
    ("psi1", "psi2", "dims", "expected"),
    [
        ("const:1", "power:a=1,b=2", P2, 0),
        ("const:2", "power:a=1,b=1", P2, 1),
        ("const:2", "power:a=1,b=1", P3, 0),
        ("const:3", "tower:j=1;terms=1*y^1", P2, 0),
        ("const:1", "power:a=0.5,b=3", P2, 0),
        ("power:a=1,b=1", "power:a=1,b=2", P2, 0),
    ],
)
def test_crossing_radius(psi1: str, psi2: str, dims: PrimeDim, expected: int) -> None:
    assert crossing_radius(parse_symbol_spec(psi1), parse_symbol_spec(psi2), dims) == expected


def test_crossing_radius_rejects_vanishing_psi1() -> None:
    with pytest.raises(Psi1Vanishes):
        crossing_radius(ConstantSpec(0.0), PowerSpec(1.0, 2.0), P2)


def test_crossing_radius_failure_reasons() -> None:
    with pytest.raises(HypothesisAViolation) as excinfo:
        crossing_radius(ConstantSpec(2.0), ConstantSpec(1.0), P2)
    assert excinfo.value.reason == "no_crossing"

    with pytest.raises(HypothesisAViolation) as excinfo:
        crossing_radius(ConstantSpec(1.0), ConstantSpec(2.0), P2)
    assert excinfo.value.reason == "origin_outside_ball"

    bumpy = TableSpec(((-1, 2.0), (0, 0.5), (1, 3.0)), "zero")
    with pytest.raises(HypothesisAViolation) as excinfo:
        crossing_radius(ConstantSpec(1.0), bumpy, P2)
    assert excinfo.value.reason == "not_downward_closed"


def test_hypothesis_a_report_does_not_raise() -> None:
    good = hypothesis_a_report(ConstantSpec(1.0), PowerSpec(1.0, 2.0), P2)
    assert good.holds and good.crossing_radius == 0
    bad = hypothesis_a_report(ConstantSpec(0.0), PowerSpec(1.0, 2.0), P2)
    assert not bad.holds and bad.crossing_radius is None and bad.reason


def test_worked_family_symbol_values() -> None:
    symbol = _symbol("const:1", "power:a=1,b=2")
    assert symbol_S(symbol, ZERO) == 1.0
    assert symbol_S(symbol, -5) == 1.0
    assert symbol_S(symbol, 0) == 1.0
    assert symbol_S(symbol, 1) == pytest.approx(0.25, abs=1e-15)
    assert symbol_S(symbol, 3) == pytest.approx(1 / 64, abs=1e-15)
    for gamma in range(-4, 5):
        assert branch_S(symbol, gamma) == pytest.approx(symbol_S(symbol, gamma), abs=1e-15)


def test_alpha_scales_the_exponent() -> None:
    symbol = _symbol("const:2", "power:a=1,b=1", alpha=0.5)
    assert symbol_S(symbol, ZERO) == pytest.approx(2**-0.5)
    assert symbol_S(symbol, 4) == pytest.approx(16**-0.5)
    assert symbol.with_alpha(2.0).alpha == 2.0
    with pytest.raises(ValueError):
        symbol.with_alpha(0.0)


def test_tower_magnitude_stays_finite_in_log_space() -> None:
    tower = ExpTowerSpec(2, ((1.0, 1),))
    mag = eval_abs_psi(tower, 64, 2)
    assert mag.overflowed
    assert eval_psi(tower, 64, 2) == math.inf
    small = eval_abs_psi(tower, 0, 2)
    # log|psi| = exp(p^0) = e at j = 2
    assert not small.overflowed and small.log_value == pytest.approx(math.e)


def test_log_magnitude_normalises_tower_height() -> None:
    assert LogMagnitude.of(2.0, 1) == LogMagnitude(0, math.exp(2.0))
    assert LogMagnitude.of(1e6, 1).tower_height == 1
    assert LogMagnitude(1, 0.0) > LogMagnitude(0, 1e300)


def test_symbol_underflow_is_flagged() -> None:
    symbol = _symbol("const:3", "tower:j=1;terms=1*y^1")
    result = symbol_value(symbol, 64)
    assert result.value == 0.0
    assert result.underflow


def test_table_and_one_minus_jhat_lookup() -> None:
    table = TableSpec(((1, -2.0), (0, 1.0)), "clamp")
    assert table.entries == ((0, 1.0), (1, -2.0))
    assert eval_psi(table, 5, 2) == -2.0
    assert eval_psi(table, -5, 2) == 1.0
    assert eval_psi(table, ZERO, 2) == 1.0
    assert eval_abs_psi(table, 1, 2).log_value == pytest.approx(math.log(2.0))

    jhat = OneMinusJHatSpec(TableSpec(((0, 0.25), (1, -0.5)), "zero"))
    assert jhat.inner.default == "clamp"
    assert eval_psi(jhat, 0, 2) == 0.75
    assert eval_psi(jhat, 3, 2) == 1.5

    with pytest.raises(ValueError):
        OneMinusJHatSpec(TableSpec(((0, 2.0),), "clamp"))


def test_spec_constructors_validate() -> None:
    with pytest.raises(ValueError):
        PowerSpec(0.0, 1.0)
    with pytest.raises(ValueError):
        ExpTowerSpec(1, ((0.0, 1),))
    with pytest.raises(ValueError):
        TableSpec(((0, 1.0), (0, 2.0)))
    with pytest.raises(ValueError):
        ConstantSpec(-1.0)


def test_negdef_spot_check_passes_for_powers_and_constants() -> None:
    grid = FiniteGrid(P2, 2, 2)
    for spec in (PowerSpec(1.0, 2.0), PowerSpec(0.5, 0.7), ConstantSpec(3.0)):
        report = negdef_sample_check(spec, grid, trials=100, seed=7)
        assert report.passed, report
        assert report.witness is None


def test_negdef_spot_check_finds_a_witness() -> None:
    grid = FiniteGrid(P2, 0, 1)
    report = negdef_sample_check(TableSpec(((0, -5.0),), "zero"), grid, trials=200, seed=0)
    assert not report.passed
    assert report.witness is not None
    assert report.witness.form_value < 0


def test_negdef_spot_check_is_reproducible() -> None:
    grid = FiniteGrid(P3, 1, 1)
    first = negdef_sample_check(PowerSpec(1.0, 1.0), grid, trials=20, seed=11)
    second = negdef_sample_check(PowerSpec(1.0, 1.0), grid, trials=20, seed=11)
    assert first == second


def test_posdef_spot_check_on_the_worked_symbol() -> None:
    symbol = _symbol("const:1", "power:a=1,b=2")
    report = posdef_sample_check(symbol, FiniteGrid(P2, 2, 2), trials=100, seed=3)
    assert report.kind == "positive_definite"
    assert report.passed
