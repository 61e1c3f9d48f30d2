from __future__ import annotations

import logging
import math
from fractions import Fraction

import numpy as np
import pytest

from padic_bessel import radial_transform
from padic_bessel.errors import OriginNotDefined, Psi1Vanishes, TailNotControlled, WindowExceeded
from padic_bessel.padic_core import ZERO, FiniteGrid, PrimeDim
from padic_bessel.radial_transform import (
    RadialFunctionHandle,
    TestFunction,
    apply_operator,
    ball_average,
    cell_series,
    constant_handle,
    distance_classes,
    first_increase,
    kernel_K,
    kernel_mass,
    positivity_scan,
    radial_fourier,
    symbol_handle,
    symbol_integrable,
)
from padic_bessel.symbol_algebra import BesselSymbol
from padic_bessel.symbol_grammar import parse_symbol_spec

P2 = PrimeDim(2, 1)


def _symbol(psi1: str = "const:1", psi2: str = "power:a=1,b=2", alpha: float = 1.0, dims: PrimeDim = P2) -> BesselSymbol:
    return BesselSymbol.build(parse_symbol_spec(psi1), parse_symbol_spec(psi2), alpha, dims)


def _worked_S(gamma: int) -> Fraction:
    # const:1 / power:a=1,b=2 at alpha=1, p=2
    return Fraction(1) if gamma <= 0 else Fraction(1, 4**gamma)


def _worked_kernel(gamma: int) -> float:
    """p^-gamma [mean of S over ||xi|| <= p^-gamma - S(p^{1-gamma})], summed exactly."""
    top = -gamma
    mean = sum(Fraction(1, 2) * Fraction(1, 2**j) * _worked_S(top - j) for j in range(400))
    mean += Fraction(1, 2**400)
    return float(Fraction(2) ** (-gamma) * (mean - _worked_S(1 - gamma)))


def _zp_profile() -> RadialFunctionHandle:
    return RadialFunctionHandle(lambda at: 1.0 if at.is_zero or at.gamma <= 0 else 0.0, "1[Zp]")


def test_kernel_golden_values() -> None:
    symbol = _symbol()
    assert kernel_K(symbol, 0).value == pytest.approx(0.75, abs=1e-12)
    assert kernel_K(symbol, 1).value == pytest.approx(0.0, abs=1e-12)
    assert kernel_K(symbol, -1).value == pytest.approx(1.125, abs=1e-12)


def test_kernel_matches_exact_geometric_sums() -> None:
    symbol = _symbol()
    for gamma in range(-6, 7):
        series = kernel_K(symbol, gamma)
        assert abs(series.value - _worked_kernel(gamma)) <= 1e-12 + series.tail_bound
        assert series.tail_bound <= 1e-9


def test_kernel_is_not_evaluated_at_the_origin() -> None:
    with pytest.raises(OriginNotDefined):
        kernel_K(_symbol(), ZERO)


def test_radial_fourier_of_the_unit_ball() -> None:
    g = _zp_profile()
    assert radial_fourier(g, 0, P2).value == pytest.approx(1.0, abs=1e-15)
    assert radial_fourier(g, 1, P2).value == pytest.approx(0.0, abs=1e-15)
    # the transform of 1[Zp] is 1[Zp]
    assert radial_fourier(g, -3, P2).value == pytest.approx(1.0, abs=1e-15)


def test_ball_average_of_a_constant_is_exact() -> None:
    result = ball_average(constant_handle(2.5), 4, PrimeDim(3, 2))
    assert result.value == pytest.approx(2.5, rel=1e-15)
    assert result.terms_used == 8


def test_ball_average_refuses_unbounded_profiles() -> None:
    with pytest.raises(TailNotControlled):
        ball_average(RadialFunctionHandle(lambda at: math.inf if at.is_zero else 1.0, "spike"), 0, P2)
    wobble = RadialFunctionHandle(lambda at: 0.0 if at.is_zero else float(at.gamma % 2), "wobble")
    with pytest.raises(TailNotControlled):
        ball_average(wobble, 0, P2)


def test_kernel_mass_and_integrability() -> None:
    assert kernel_mass(_symbol()) == 1.0
    assert kernel_mass(_symbol("const:2", "power:a=1,b=1", alpha=0.5)) == pytest.approx(2**-0.5)
    assert symbol_integrable(_symbol())
    assert not symbol_integrable(_symbol("const:2", "power:a=1,b=1", alpha=0.5))
    assert symbol_integrable(_symbol("const:3", "tower:j=1;terms=1*y^1"))
    with pytest.raises(Psi1Vanishes):
        kernel_mass(_symbol("power:a=1,b=1", "power:a=1,b=2"))


def test_positivity_scan_on_the_standard_family() -> None:
    symbol = _symbol()
    assert first_increase(symbol) is None
    report = positivity_scan(symbol, (-6, 6))
    assert report.precondition_holds
    assert report.passed
    assert report.min_value >= -1e-12


def test_first_increase_detects_a_bump() -> None:
    symbol = _symbol("const:1", "table:0:0.5,1:4,2:2;default=clamp")
    assert first_increase(symbol) == 2
    assert not positivity_scan(symbol, (-3, 3)).precondition_holds


def test_test_function_fourier_and_integral() -> None:
    phi = TestFunction.ball_indicator(P2, -1)
    assert phi.integral() == pytest.approx(0.5)
    assert phi.value(None) == 1
    assert phi.value([Fraction(1)]) == 0
    assert phi.fourier([Fraction(1, 2)]) == pytest.approx(0.5)
    assert phi.fourier([Fraction(1, 4)]) == 0
    shifted = TestFunction.ball_indicator(P2, 0, center=[Fraction(1, 2)])
    assert shifted.fourier([Fraction(1)]) == pytest.approx(-1.0)


def test_apply_operator_with_a_constant_multiplier_scales() -> None:
    phi = TestFunction.ball_indicator(P2, -1) + TestFunction.ball_indicator(P2, 1, coeff=2.0)
    for x in (None, [Fraction(1, 2)], [Fraction(1)], [Fraction(4)]):
        assert apply_operator(constant_handle(3.0), phi, x) == pytest.approx(3.0 * phi.value(x), abs=1e-13)


def test_apply_operator_matches_the_kernel_convolution() -> None:
    # S * 1[Zp]^ = 1[Zp] since S = 1 on Zp; 1[pZp] sees the shell where S = 1/4
    symbol = _symbol()
    handle = symbol_handle(symbol)
    unit = TestFunction.ball_indicator(P2, 0)
    assert apply_operator(handle, unit, None) == pytest.approx(1.0, abs=1e-13)
    inner = TestFunction.ball_indicator(P2, -1)
    # A phi(0) = p^-1 [S(0) + S(p)] = (1 + 1/4) / 2
    assert apply_operator(handle, inner, None) == pytest.approx(0.625, abs=1e-13)
    # A phi(1) = p^-1 [S(0) - S(p)]
    assert apply_operator(handle, inner, [Fraction(1)]) == pytest.approx(0.375, abs=1e-13)


def test_cell_series_integrates_the_kernel() -> None:
    symbol = _symbol()
    grid = FiniteGrid(P2, 2, 3)
    values, bounds = cell_series(symbol_handle(symbol), grid)
    total = float(np.sum(values)) * float(grid.weight)
    assert total == pytest.approx(1.0, abs=1e-10 + float(np.sum(bounds)))


def test_distance_classes_partition_the_grid() -> None:
    grid = FiniteGrid(P2, 1, 2)
    phi = TestFunction.ball_indicator(P2, -1) + TestFunction.ball_indicator(P2, 0, center=[Fraction(1, 2)])
    classes = distance_classes(grid, phi)
    assert sorted(index for indices in classes.values() for index in indices) == list(range(grid.size))
    for key, indices in classes.items():
        assert all(phi.distance_key(grid.point(index)) == key for index in indices)


@pytest.mark.parametrize("gamma", range(-3, 4))
def test_doubling_the_stable_run_stays_within_the_tail_bound(monkeypatch, gamma: int) -> None:
    # S = exp(-p^gamma) near 0: settles geometrically, never exactly
    symbol = _symbol("tower:j=1;terms=1*y^1", "tower:j=1;terms=1*y^2")
    first = kernel_K(symbol, gamma)
    monkeypatch.setattr(radial_transform, "STABLE_SHELLS", 2 * radial_transform.STABLE_SHELLS)
    second = kernel_K(symbol, gamma)
    assert second.terms_used > first.terms_used
    assert first.tail_bound > 0
    assert abs(second.value - first.value) <= first.tail_bound + 1e-13 * abs(first.value)


def test_transform_needs_the_outer_shell_inside_the_window() -> None:
    assert radial_fourier(_zp_profile(), -199, P2).value == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(WindowExceeded) as excinfo:
        radial_fourier(_zp_profile(), -200, P2)
    assert "gamma=201" in excinfo.value.detail


def test_underflowed_kernel_is_flagged_and_logged(monkeypatch, caplog) -> None:
    monkeypatch.setattr(logging.getLogger("padic_bessel"), "propagate", True)
    symbol = _symbol("const:3", "tower:j=1;terms=1*y^1")
    with caplog.at_level(logging.WARNING, logger="padic_bessel"):
        result = kernel_K(symbol, -63)
    assert result.underflow
    warnings = [record for record in caplog.records if record.levelno == logging.WARNING]
    assert any("underflows" in record.getMessage() for record in warnings)
