from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padic_bessel.errors import BudgetExceeded, WindowExceeded
from padic_bessel.oracle_grid import brute_sphere_integral
from padic_bessel.padic_core import (
    ZERO,
    FiniteGrid,
    NormExponent,
    PrimeDim,
    character,
    check_window,
    digits_to_rational,
    enumerate_grid,
    frac_part,
    frac_part_digits,
    is_prime,
    norm_exponent,
    pow_p,
    scaled_pow,
    unit_sphere_char_integral,
    valuation,
)


def test_is_prime_small_values() -> None:
    assert [value for value in range(20) if is_prime(value)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_prime_dim_rejects_composite_and_zero_dimension() -> None:
    with pytest.raises(ValueError):
        PrimeDim(4, 1)
    with pytest.raises(ValueError):
        PrimeDim(2, 0)
    assert PrimeDim(3, 2).inv_pn == pytest.approx(1 / 9)


def test_norm_exponent_examples() -> None:
    assert norm_exponent([Fraction(1, 4), Fraction(3)], 2) == NormExponent.finite(2)
    assert norm_exponent([Fraction(6), Fraction(0)], 2) == NormExponent.finite(-1)
    assert norm_exponent([0, 0], 3) == ZERO
    assert ZERO < NormExponent.finite(-100) < NormExponent.finite(0)


def test_valuation_of_zero_is_none() -> None:
    assert valuation(0, 5) is None
    assert valuation(Fraction(50, 3), 5) == 2


def test_frac_part_examples() -> None:
    assert frac_part(Fraction(3, 4), 2) == Fraction(3, 4)
    assert frac_part(Fraction(7, 4), 2) == Fraction(3, 4)
    assert frac_part(Fraction(1, 3), 2) == 0
    # 1/6 = 2^-1 * 1/3 and 1/3 = 1 mod 2, so {1/6}_2 = 1/2
    assert frac_part(Fraction(1, 6), 2) == Fraction(1, 2)
    assert frac_part(5, 3) == 0


def test_frac_part_digits_matches_the_leading_digits() -> None:
    # x = 1*2^-2 + 1*2^-1 + 1*2^0 + 1*2^1
    assert digits_to_rational([1, 1, 1, 1], -2, 2) == Fraction(15, 4)
    assert frac_part_digits([1, 1, 1, 1], -2, 2) == Fraction(3, 4)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(min_value=-500, max_value=500),
    st.integers(min_value=0, max_value=6),
    st.integers(min_value=-500, max_value=500),
    st.integers(min_value=0, max_value=6),
)
def test_character_is_additive(a: int, i: int, b: int, j: int) -> None:
    x = Fraction(a, 3**i)
    y = Fraction(b, 3**j)
    assert character(x + y, 3) == pytest.approx(character(x, 3) * character(y, 3), abs=1e-12)


def test_character_is_trivial_on_integers() -> None:
    assert character(17, 5) == pytest.approx(1.0)
    assert character(Fraction(1, 2), 2) == pytest.approx(-1.0)


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("n", [1, 2])
def test_sphere_formula_matches_exhaustive_sums(p: int, n: int) -> None:
    dims = PrimeDim(p, n)
    for j in range(-3, 5):
        assert abs(unit_sphere_char_integral(j, dims) - brute_sphere_integral(j, dims)) <= 1e-10


def test_sphere_formula_values() -> None:
    dims = PrimeDim(2, 1)
    assert unit_sphere_char_integral(0, dims) == 0.5
    assert unit_sphere_char_integral(1, dims) == -0.5
    assert unit_sphere_char_integral(2, dims) == 0.0


def test_window_and_pow_limits() -> None:
    check_window(200)
    with pytest.raises(WindowExceeded):
        check_window(-201)
    assert pow_p(2, 10) == 1024.0
    assert pow_p(3, -2, 9.0) == pytest.approx(1.0)
    with pytest.raises(WindowExceeded):
        pow_p(2, 1500)


def test_scaled_pow_keeps_extreme_exponents() -> None:
    tiny = scaled_pow(2, -1074)
    assert tiny > 0
    assert float(tiny) == math.ulp(0.0)
    huge = scaled_pow(2, 1100)
    assert mpmath.isfinite(huge)
    assert huge == mpmath.mpf(2) ** 1100
    assert scaled_pow(3, -1500, 2.0) > 0
    with pytest.raises(WindowExceeded):
        pow_p(2, 1100)
    with pytest.raises(WindowExceeded):
        scaled_pow(2, 2001)


def test_grid_points_round_trip_through_indices() -> None:
    grid = FiniteGrid(PrimeDim(3, 2), 1, 1)
    assert grid.size == 81
    assert grid.weight == Fraction(1, 9)
    assert grid.total_measure == 9
    for index in (0, 1, 17, 80):
        assert grid.index_of(grid.point(index)) == index


def test_grid_point_digits_and_norm() -> None:
    grid = FiniteGrid(PrimeDim(2, 1), 2, 2)
    point = grid.point_from_rationals([Fraction(3, 2)])
    assert point.coords == (6,)
    assert point.digits() == ((0, 1, 1, 0),)
    assert point.norm_exponent() == NormExponent.finite(1)
    assert point.rationals() == (Fraction(3, 2),)
    assert (point - point).norm_exponent() == ZERO
    assert (-point).rationals() == (Fraction(10, 4),)


def test_norm_exponent_array_agrees_with_grid_points() -> None:
    grid = FiniteGrid(PrimeDim(2, 2), 1, 2)
    gammas, origin = grid.norm_exponent_array()
    for index, point in enumerate(grid.points()):
        norm = point.norm_exponent()
        assert origin[index] == norm.is_zero
        if not norm.is_zero:
            assert gammas[index] == norm.gamma


def test_index_array_is_row_major() -> None:
    grid = FiniteGrid(PrimeDim(2, 2), 0, 2)
    coords = grid.index_array()
    assert coords.shape == (16, 2)
    assert tuple(coords[5]) == grid.point(5).coords


def test_pairing_phases_match_exact_pairing() -> None:
    grid = FiniteGrid(PrimeDim(3, 1), 1, 1)
    vector = [Fraction(1, 3)]
    phases = grid.pairing_phases(vector)
    for index, point in enumerate(grid.points()):
        exact = frac_part(point.rationals()[0] * vector[0], 3)
        assert math.isclose(phases[index], float(exact), abs_tol=1e-15)


def test_enumerate_grid_budget() -> None:
    with pytest.raises(BudgetExceeded):
        enumerate_grid(PrimeDim(3, 2), 4, 4, budget=1000)
    assert enumerate_grid(PrimeDim(2, 1), 2, 2).size == 16


def test_split_covers_the_grid() -> None:
    grid = FiniteGrid(PrimeDim(2, 1), 2, 3)
    parts = grid.split(3)
    assert sum(len(part) for part in parts) == grid.size
    assert np.all(np.diff([part.start for part in parts]) > 0)
