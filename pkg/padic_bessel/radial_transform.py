"""Series engine for radial Fourier transforms on Q_p^n.

Every transform here reduces to ball averages of a radial profile g:

    ball_average(g, top) = (1 - p^-n) * sum_{j >= 0} p^{-nj} g(top - j)

which is the mean of g over the ball of radius p^top. The series is cut once
g has settled to g(0) for a run of shells; the remainder is summed exactly
with g(0) and the deviation left over is reported as tail_bound.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from padic_bessel.errors import OriginNotDefined, Psi1Vanishes, TailNotControlled, WindowExceeded
from padic_bessel.padic_core import (
    EXPONENT_WINDOW,
    ZERO,
    FiniteGrid,
    GridPoint,
    NormExponent,
    PrimeDim,
    Rational,
    SeriesValue,
    check_window,
    norm_exponent,
    pairing,
    pow_p,
    turn,
)
from padic_bessel.reports import PositivityReport
from padic_bessel.symbol_algebra import (
    BesselSymbol,
    ExpTowerSpec,
    NormLike,
    PowerSpec,
    as_norm,
    eval_abs_psi,
    symbol_S,
    symbol_value,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
STABLE_SHELLS = 8
TAIL_SCAN_SHELLS = 64


@dataclass(frozen=True)
class RadialFunctionHandle:
    """A radial profile g(p^gamma), with g(0) at the origin."""

    eval: Callable[[NormExponent], float]
    description: str

    def __call__(self, at: NormLike) -> float:
        return self.eval(as_norm(at))


def symbol_handle(symbol: BesselSymbol) -> RadialFunctionHandle:
    return RadialFunctionHandle(lambda at: symbol_S(symbol, at), f"S[alpha={symbol.alpha}]")


def symbol_power_handle(symbol: BesselSymbol, alpha: float) -> RadialFunctionHandle:
    """The symbol of A^alpha' for the same psi1, psi2."""
    return symbol_handle(symbol.with_alpha(alpha))


def heat_handle(symbol: BesselSymbol, t: float) -> RadialFunctionHandle:
    return RadialFunctionHandle(lambda at: math.exp(-t * symbol_S(symbol, at)), f"exp(-{t}*S)")


def resolvent_handle(symbol: BesselSymbol, m: float) -> RadialFunctionHandle:
    m2 = m * m
    return RadialFunctionHandle(lambda at: 1.0 / (m2 + symbol_S(symbol, at)), f"1/({m2}+S)")


def constant_handle(c: float) -> RadialFunctionHandle:
    return RadialFunctionHandle(lambda at: c, f"const[{c}]")


@dataclass(frozen=True)
class BallTerm:
    """coeff * 1[||x - center||_p <= p^radius_exp]."""

    center: tuple[Fraction, ...]
    radius_exp: int
    coeff: complex = 1.0


@dataclass(frozen=True)
class TestFunction:
    __test__ = False

    terms: tuple[BallTerm, ...]
    dims: PrimeDim

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("test function needs at least one ball term")
        for term in self.terms:
            if len(term.center) != self.dims.n:
                raise ValueError(f"center {term.center} does not have {self.dims.n} coordinates")
            check_window(term.radius_exp)

    @classmethod
    def ball_indicator(
        cls,
        dims: PrimeDim,
        radius_exp: int,
        center: Sequence[Rational] | GridPoint | None = None,
        coeff: complex = 1.0,
    ) -> TestFunction:
        return cls((BallTerm(_as_vector(center, dims), radius_exp, complex(coeff)),), dims)

    def __add__(self, other: TestFunction) -> TestFunction:
        if other.dims != self.dims:
            raise ValueError("cannot add test functions over different Q_p^n")
        return TestFunction(self.terms + other.terms, self.dims)

    def value(self, x: Sequence[Rational] | GridPoint) -> complex:
        x = _as_vector(x, self.dims)
        p = self.dims.p
        total = 0j
        for term in self.terms:
            gamma = norm_exponent([a - b for a, b in zip(x, term.center)], p)
            if gamma.is_zero or gamma.gamma <= term.radius_exp:
                total += term.coeff
        return total

    def fourier(self, xi: Sequence[Rational] | GridPoint) -> complex:
        """coeff * chi(a . xi) * p^{nr} * 1[||xi|| <= p^-r], summed over terms."""
        xi = _as_vector(xi, self.dims)
        p, n = self.dims.p, self.dims.n
        gamma = norm_exponent(xi, p)
        total = 0j
        for term in self.terms:
            if gamma.is_zero or gamma.gamma <= -term.radius_exp:
                total += term.coeff * turn(pairing(term.center, xi, p)) * pow_p(p, n * term.radius_exp)
        return total

    def integral(self) -> complex:
        return sum((t.coeff * pow_p(self.dims.p, self.dims.n * t.radius_exp) for t in self.terms), 0j)

    def distance_key(self, x: Sequence[Rational] | GridPoint) -> tuple[int | None, ...]:
        """Norm exponents of x - a_k; every radial operator applied to self depends on x only through these."""
        x = _as_vector(x, self.dims)
        p = self.dims.p
        return tuple(norm_exponent([b - a for a, b in zip(x, term.center)], p).gamma for term in self.terms)


def _as_vector(x: Sequence[Rational] | GridPoint | None, dims: PrimeDim) -> tuple[Fraction, ...]:
    if x is None:
        return (Fraction(0),) * dims.n
    if isinstance(x, GridPoint):
        return x.rationals()
    vector = tuple(Fraction(c) for c in x)
    if len(vector) != dims.n:
        raise ValueError(f"point {x} does not have {dims.n} coordinates")
    return vector


def ball_average(g: RadialFunctionHandle, top: int, dims: PrimeDim, tol: float = DEFAULT_TOL) -> SeriesValue:
    """Mean of g over the ball ||xi||_p <= p^top."""
    check_window(top)
    limit = g(ZERO)
    if not math.isfinite(limit):
        raise TailNotControlled(
            reason="unbounded_at_origin",
            detail=f"{g.description} is not finite at the origin; the shell series has no limit",
        )
    inv = dims.inv_pn
    total = 0.0
    stable = 0
    j = 0
    while stable < STABLE_SHELLS:
        gamma = top - j
        if gamma < -EXPONENT_WINDOW:
            raise TailNotControlled(
                reason="no_stabilization",
                detail=f"{g.description} did not settle within {tol} of g(0)={limit} before gamma={-EXPONENT_WINDOW}",
            )
        value = g(gamma)
        total += (1.0 - inv) * inv**j * value
        stable = stable + 1 if abs(value - limit) <= tol else 0
        j += 1
    remaining = inv**j
    total += limit * remaining
    deviation = tol
    for k in range(TAIL_SCAN_SHELLS):
        gamma = top - j - k
        if gamma < -EXPONENT_WINDOW:
            break
        deviation = max(deviation, abs(g(gamma) - limit))
    logger.debug("ball_average %s top=%d: %d shells, deviation %.3g", g.description, top, j, deviation)
    return SeriesValue(value=total, tail_bound=deviation * remaining, terms_used=j)


def radial_fourier(g: RadialFunctionHandle, beta: int, dims: PrimeDim, tol: float = DEFAULT_TOL) -> SeriesValue:
    """Fourier transform of the radial profile g at ||xi||_p = p^beta, beta finite.

    Reads g on the shell p^{1-beta}, so beta = -EXPONENT_WINDOW is refused.
    """
    check_window(beta)
    if 1 - beta > EXPONENT_WINDOW:
        raise WindowExceeded(
            reason="exponent_window",
            detail=f"the transform at beta={beta} reads g at gamma={1 - beta}, outside |gamma| <= {EXPONENT_WINDOW}",
        )
    inner = ball_average(g, -beta, dims, tol)
    outer = g(1 - beta)
    scale = -dims.n * beta
    return SeriesValue(
        value=pow_p(dims.p, scale, inner.value - outer),
        tail_bound=pow_p(dims.p, scale, inner.tail_bound),
        terms_used=inner.terms_used + 1,
    )


def kernel_K(symbol: BesselSymbol, gamma_x: NormLike, tol: float = DEFAULT_TOL) -> SeriesValue:
    at = as_norm(gamma_x)
    if at.is_zero:
        raise OriginNotDefined(
            reason="kernel_at_origin",
            detail="K_alpha is a distribution; its value at x = 0 is not defined",
        )
    result = radial_fourier(symbol_handle(symbol), at.gamma, symbol.dims, tol)
    underflow = symbol_value(symbol, 1 - at.gamma).underflow or symbol_value(symbol, -at.gamma).underflow
    if underflow:
        logger.warning("K_alpha at gamma=%d: S underflows to 0 on the shells it reads", at.gamma)
        return SeriesValue(result.value, result.tail_bound, result.terms_used, underflow=True)
    return result


def kernel_mass(symbol: BesselSymbol) -> float:
    """Total mass of K_alpha, |psi1(0)|^-alpha."""
    if eval_abs_psi(symbol.psi1, ZERO, symbol.dims.p).is_neg_infinity:
        raise Psi1Vanishes(reason="psi1_vanishes", detail="|psi1(0)| = 0, K_alpha has infinite mass")
    return symbol_S(symbol, ZERO)


def symbol_integrable(symbol: BesselSymbol) -> bool:
    """Whether S is in L^1(Q_p^n), decided by the family of psi2, which governs S at infinity."""
    psi2 = symbol.psi2
    if isinstance(psi2, ExpTowerSpec):
        return True
    if isinstance(psi2, PowerSpec):
        return symbol.alpha * psi2.b > symbol.dims.n
    # constants and tables leave S bounded below at infinity
    return False


def first_increase(symbol: BesselSymbol) -> int | None:
    """First gamma in the symbol window where S exceeds its value one shell further in (or at 0)."""
    lo, hi = symbol.window
    previous = symbol_S(symbol, ZERO)
    for gamma in range(lo, hi + 1):
        current = symbol_S(symbol, gamma)
        if current > previous:
            return gamma
        previous = current
    return None


def positivity_scan(
    symbol: BesselSymbol,
    gamma_range: tuple[int, int],
    tol: float = DEFAULT_TOL,
) -> PositivityReport:
    increase = first_increase(symbol)
    lo, hi = gamma_range
    values = [(gamma, kernel_K(symbol, gamma, tol).value) for gamma in range(lo, hi + 1)]
    argmin, lowest = min(values, key=lambda item: item[1]) if values else (None, math.inf)
    holds = increase is None
    if not holds:
        logger.info("positivity precondition fails: S increases past gamma=%d", increase)
    return PositivityReport(
        precondition_holds=holds,
        precondition_window=symbol.window,
        first_increase=increase,
        gamma_range=gamma_range,
        min_value=lowest if values else 0.0,
        argmin_gamma=argmin,
        tol=tol,
        passed=holds and lowest >= -tol,
    )


def apply_operator(
    multiplier: RadialFunctionHandle,
    phi: TestFunction,
    x: Sequence[Rational] | GridPoint | None,
    tol: float = DEFAULT_TOL,
) -> complex:
    """F^-1[multiplier * phi^](x), term by term on the Fourier side; x = None is the origin."""
    dims = phi.dims
    p, n = dims.p, dims.n
    x = _as_vector(x, dims)
    total = 0j
    for term in phi.terms:
        r = term.radius_exp
        gamma_y = norm_exponent([a - b for a, b in zip(term.center, x)], p)
        if gamma_y.is_zero:
            total += term.coeff * ball_average(multiplier, -r, dims, tol).value
            continue
        gy = gamma_y.gamma
        top = min(-r, -gy)
        value = pow_p(p, n * (r + top), ball_average(multiplier, top, dims, tol).value)
        # shell ||xi|| = p^{1 - gy} still meets the Fourier support
        if 1 - gy <= -r:
            value -= pow_p(p, n * (r - gy), multiplier(1 - gy))
        total += term.coeff * value
    return total


def cell_series(g: RadialFunctionHandle, grid: FiniteGrid, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Cell means of F^-1[g] over every cell x + p^N Z_p^n, with their tail bounds, in row-major order.

    Off the origin the transform is constant on cells. The origin cell carries
    p^{nN} * ball_average(g, N), the exact mean of the distribution there.
    """
    dims = grid.dims
    gammas, origin = grid.norm_exponent_array()
    values = np.empty(grid.size, dtype=np.float64)
    bounds = np.empty(grid.size, dtype=np.float64)
    for gamma in np.unique(gammas[~origin]):
        mask = (gammas == gamma) & ~origin
        series = radial_fourier(g, int(gamma), dims, tol)
        values[mask] = series.value
        bounds[mask] = series.tail_bound
    centre = ball_average(g, grid.N, dims, tol)
    values[origin] = pow_p(dims.p, dims.n * grid.N, centre.value)
    bounds[origin] = pow_p(dims.p, dims.n * grid.N, centre.tail_bound)
    return values, bounds


def cell_values(g: RadialFunctionHandle, grid: FiniteGrid, tol: float = DEFAULT_TOL) -> np.ndarray:
    return cell_series(g, grid, tol)[0]


def distance_classes(grid: FiniteGrid, phi: TestFunction) -> dict[tuple[int | None, ...], list[int]]:
    """Grid indices grouped by TestFunction.distance_key, in first-seen order."""
    classes: dict[tuple[int | None, ...], list[int]] = {}
    for index, point in enumerate(grid.points()):
        classes.setdefault(phi.distance_key(point), []).append(index)
    return classes
