"""Exact p-adic primitives.

Norm exponents, fractional parts, additive characters, the unit-sphere
character integral and finite quotient groups p^{-M}Z_p^n / p^N Z_p^n.
Everything here is exact (integers and Fractions) until the final
trigonometric evaluation.
"""

from __future__ import annotations

import cmath
import itertools
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

import mpmath
import numpy as np

from padic_bessel.errors import BudgetExceeded, WindowExceeded

EXPONENT_WINDOW = 200
SCALED_POW_LIMIT = 2000
POINT_BUDGET = 10**7

Rational = Fraction | int


def is_prime(value: int) -> bool:
    if value < 2:
        return False
    if value < 4:
        return True
    if value % 2 == 0:
        return False
    return all(value % d for d in range(3, math.isqrt(value) + 1, 2))


@dataclass(frozen=True)
class PrimeDim:
    p: int
    n: int = 1

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")

    @property
    def inv_pn(self) -> float:
        """p^{-n}."""
        return float(self.p) ** (-self.n)


@total_ordering
@dataclass(frozen=True)
class NormExponent:
    """Finite(gamma) codes the norm p^gamma; gamma=None codes the origin."""

    gamma: int | None

    @classmethod
    def zero(cls) -> NormExponent:
        return cls(None)

    @classmethod
    def finite(cls, gamma: int) -> NormExponent:
        return cls(int(gamma))

    @property
    def is_zero(self) -> bool:
        return self.gamma is None

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, NormExponent):
            return NotImplemented
        if self.gamma is None:
            return other.gamma is not None
        if other.gamma is None:
            return False
        return self.gamma < other.gamma

    def __str__(self) -> str:
        return "Zero" if self.gamma is None else f"Finite({self.gamma})"


ZERO = NormExponent.zero()


def check_window(gamma: int, window: int = EXPONENT_WINDOW) -> None:
    if abs(gamma) > window:
        raise WindowExceeded(
            reason="exponent_window",
            detail=f"norm exponent {gamma} is outside the working window |gamma| <= {window}",
        )


@dataclass(frozen=True)
class SeriesValue:
    value: float
    tail_bound: float
    terms_used: int
    underflow: bool = False

    def __post_init__(self) -> None:
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be non-negative")


def int_valuation(value: int, p: int) -> int:
    if value == 0:
        raise ValueError("valuation of 0 is infinite")
    value = abs(value)
    count = 0
    while value % p == 0:
        value //= p
        count += 1
    return count


def valuation(x: Rational, p: int) -> int | None:
    """ord_p(x), or None for x = 0."""
    x = Fraction(x)
    if x == 0:
        return None
    return int_valuation(x.numerator, p) - int_valuation(x.denominator, p)


def norm_exponent(vector: Sequence[Rational], p: int) -> NormExponent:
    orders = [valuation(x, p) for x in vector]
    finite = [order for order in orders if order is not None]
    if not finite:
        return ZERO
    return NormExponent.finite(-min(finite))


def frac_part(x: Rational, p: int) -> Fraction:
    """The p-adic fractional part {x}_p as an exact rational in [0, 1)."""
    x = Fraction(x)
    order = valuation(x, p)
    if order is None or order >= 0:
        return Fraction(0)
    k = -order
    modulus = p**k
    unit_den = x.denominator // modulus
    # x = a / (p^k b) with gcd(b, p) = 1, so {x}_p = (a b^{-1} mod p^k) / p^k
    residue = (x.numerator * pow(unit_den, -1, modulus)) % modulus
    return Fraction(residue, modulus)


def digits_to_rational(digits: Sequence[int], low: int, p: int) -> Fraction:
    """sum_k a_k p^k for the digit vector (a_low, a_low+1, ...)."""
    total = Fraction(0)
    for offset, digit in enumerate(digits):
        if not 0 <= digit < p:
            raise ValueError(f"digit {digit} outside 0..{p - 1}")
        total += Fraction(digit) * Fraction(p) ** (low + offset)
    return total


def frac_part_digits(digits: Sequence[int], low: int, p: int) -> Fraction:
    return frac_part(digits_to_rational(digits, low, p), p)


def turn(q: Fraction) -> complex:
    """exp(2 pi i q) after exact reduction of q mod 1."""
    reduced = q - math.floor(q)
    return cmath.exp(2j * math.pi * float(reduced))


def character(x: Rational, p: int) -> complex:
    return turn(frac_part(x, p))


def pairing(x: Sequence[Rational], y: Sequence[Rational], p: int) -> Fraction:
    """{x . y}_p."""
    return frac_part(sum((Fraction(a) * Fraction(b) for a, b in zip(x, y)), Fraction(0)), p)


def unit_sphere_char_integral(j: int, dims: PrimeDim) -> float:
    """Integral over ||z||_p = 1 of chi_p(-p^{-j} x0 . z) for any ||x0||_p = 1."""
    if j <= 0:
        return 1.0 - dims.inv_pn
    if j == 1:
        return -dims.inv_pn
    return 0.0


def scaled_pow(p: int, base_exponent: int, scale: float = 1.0) -> mpmath.mpf:
    """scale * p^base_exponent with a free exponent field."""
    if abs(base_exponent) > SCALED_POW_LIMIT:
        raise WindowExceeded(
            reason="scaled_pow_window",
            detail=f"exponent {base_exponent} exceeds |e| <= {SCALED_POW_LIMIT}",
        )
    return mpmath.mpf(scale) * mpmath.power(mpmath.mpf(p), base_exponent)


def pow_p(p: int, exponent: int, scale: float = 1.0) -> float:
    value = float(scaled_pow(p, exponent, scale))
    if math.isinf(value):
        raise WindowExceeded(
            reason="float_overflow",
            detail=f"{scale} * {p}^{exponent} does not fit a binary64 float",
        )
    return value


@dataclass(frozen=True)
class GridPoint:
    """Coset representative of p^{-M}Z_p^n / p^N Z_p^n.

    Coordinate i is stored as the integer c_i in [0, p^{M+N}) with
    x_i = c_i p^{-M}; the digit vector of x_i is the base-p expansion of c_i.
    """

    coords: tuple[int, ...]
    p: int
    M: int
    N: int

    def __post_init__(self) -> None:
        modulus = self.p ** (self.M + self.N)
        for c in self.coords:
            if not 0 <= c < modulus:
                raise ValueError(f"coordinate index {c} outside 0..{modulus - 1}")

    @property
    def modulus(self) -> int:
        return self.p ** (self.M + self.N)

    def digits(self) -> tuple[tuple[int, ...], ...]:
        """Per coordinate (a_{-M}, ..., a_{N-1})."""
        out = []
        for c in self.coords:
            row = []
            for _ in range(self.M + self.N):
                c, digit = divmod(c, self.p)
                row.append(digit)
            out.append(tuple(row))
        return tuple(out)

    def rationals(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.p**self.M) for c in self.coords)

    def norm_exponent(self) -> NormExponent:
        lowest: int | None = None
        for row in self.digits():
            for k, digit in enumerate(row):
                if digit:
                    lowest = k if lowest is None else min(lowest, k)
                    break
        if lowest is None:
            return ZERO
        return NormExponent.finite(self.M - lowest)

    def __neg__(self) -> GridPoint:
        return GridPoint(tuple((-c) % self.modulus for c in self.coords), self.p, self.M, self.N)

    def __add__(self, other: GridPoint) -> GridPoint:
        return GridPoint(
            tuple((a + b) % self.modulus for a, b in zip(self.coords, other.coords)),
            self.p,
            self.M,
            self.N,
        )

    def __sub__(self, other: GridPoint) -> GridPoint:
        return self + (-other)


@dataclass(frozen=True)
class FiniteGrid:
    dims: PrimeDim
    M: int
    N: int

    def __post_init__(self) -> None:
        if self.M < 0 or self.N < 0:
            raise ValueError("grid exponents M and N must be >= 0")

    @property
    def modulus(self) -> int:
        return self.dims.p ** (self.M + self.N)

    @property
    def size(self) -> int:
        return self.modulus**self.dims.n

    @property
    def weight(self) -> Fraction:
        return Fraction(1, self.dims.p ** (self.dims.n * self.N))

    @property
    def total_measure(self) -> Fraction:
        return self.weight * self.size

    @property
    def dual(self) -> FiniteGrid:
        """p^{-N}Z_p^n / p^M Z_p^n, the frequency side of this grid."""
        return FiniteGrid(self.dims, self.N, self.M)

    def point(self, index: int) -> GridPoint:
        coords = []
        for _ in range(self.dims.n):
            index, c = divmod(index, self.modulus)
            coords.append(c)
        return GridPoint(tuple(reversed(coords)), self.dims.p, self.M, self.N)

    def index_of(self, point: GridPoint) -> int:
        index = 0
        for c in point.coords:
            index = index * self.modulus + c
        return index

    def points(self, start: int = 0, stop: int | None = None) -> Iterator[GridPoint]:
        stop = self.size if stop is None else stop
        if start == 0 and stop == self.size:
            for coords in itertools.product(range(self.modulus), repeat=self.dims.n):
                yield GridPoint(tuple(coords), self.dims.p, self.M, self.N)
            return
        for index in range(start, stop):
            yield self.point(index)

    def split(self, parts: int) -> list[range]:
        """Disjoint index ranges covering the grid, for partitioned reductions."""
        parts = max(1, min(parts, self.size))
        bounds = np.linspace(0, self.size, parts + 1).astype(int)
        return [range(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]

    def point_from_rationals(self, vector: Sequence[Rational]) -> GridPoint:
        coords = []
        for x in vector:
            scaled = Fraction(x) * self.dims.p**self.M
            if scaled.denominator % self.dims.p == 0:
                raise ValueError(f"{x} is not in p^-{self.M} Z_p")
            c = scaled.numerator * pow(scaled.denominator, -1, self.modulus)
            coords.append(c % self.modulus)
        return GridPoint(tuple(coords), self.dims.p, self.M, self.N)

    def index_array(self) -> np.ndarray:
        """Coordinate indices of all points, shape (size, n), row-major order."""
        grids = np.indices((self.modulus,) * self.dims.n).reshape(self.dims.n, -1)
        return grids.T.astype(np.int64)

    def norm_exponent_array(self) -> tuple[np.ndarray, np.ndarray]:
        """(gamma per point, origin mask); gamma is meaningless where the mask is set."""
        coords = self.index_array()
        depth = self.M + self.N
        val = np.full(coords.shape, depth, dtype=np.int64)
        nonzero = coords != 0
        val[nonzero] = 0
        for k in range(1, depth):
            val += (nonzero & (coords % self.dims.p**k == 0)).astype(np.int64)
        lowest = val.min(axis=1)
        origin = lowest == depth
        return self.M - lowest, origin

    def pairing_phases(self, vector: Sequence[Rational]) -> np.ndarray:
        """{x . xi}_p for every grid point xi, as floats in [0, 1).

        x must satisfy ||x||_p <= p^N so the pairing is constant on cosets of
        p^N Z_p^n, and its coordinates must have p-power denominators.
        """
        gamma = norm_exponent(vector, self.dims.p)
        if not gamma.is_zero and gamma.gamma > self.N:
            raise ValueError(f"||x|| = p^{gamma.gamma} exceeds the grid resolution p^{self.N}")
        s = 0 if gamma.is_zero else max(gamma.gamma, 0)
        denominator = self.dims.p ** (s + self.M)
        numerators = []
        for x in vector:
            scaled = Fraction(x) * self.dims.p**s
            if scaled.denominator != 1:
                raise ValueError(f"coordinate {x} must have a p-power denominator")
            numerators.append(int(scaled.numerator) % denominator)
        coords = self.index_array()
        residues = np.zeros(coords.shape[0], dtype=np.int64)
        for axis, u in enumerate(numerators):
            residues = (residues + (coords[:, axis] * u) % denominator) % denominator
        return residues.astype(np.float64) / float(denominator)


def enumerate_grid(dims: PrimeDim, M: int, N: int, budget: int = POINT_BUDGET) -> FiniteGrid:
    grid = FiniteGrid(dims, M, N)
    if grid.size > budget:
        raise BudgetExceeded(
            reason="grid_budget",
            detail=f"grid has {grid.size} points, budget is {budget}",
        )
    return grid


def unit_vector(dims: PrimeDim, gamma: int) -> tuple[Fraction, ...]:
    """p^{-gamma} e_1, a point of norm p^gamma."""
    first = Fraction(dims.p) ** (-gamma)
    return (first,) + (Fraction(0),) * (dims.n - 1)
