"""Green function G of m^2 + A^alpha, the inverse transform of 1/(m^2 + S)."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from padic_bessel.errors import BudgetExceeded, OriginNotDefined, PreconditionFailed
from padic_bessel.padic_core import ZERO, FiniteGrid, SeriesValue, norm_exponent, pow_p
from padic_bessel.radial_transform import (
    DEFAULT_TOL,
    RadialFunctionHandle,
    TestFunction,
    apply_operator,
    cell_series,
    distance_classes,
    radial_fourier,
    resolvent_handle,
)
from padic_bessel.reports import GreenBoundCase, GreenBoundsReport
from padic_bessel.symbol_algebra import BesselSymbol, NormLike, as_norm, eval_abs_psi, symbol_S

logger = logging.getLogger(__name__)

PAIRING_BUDGET = 10**5


@dataclass(frozen=True)
class GreenParams:
    symbol: BesselSymbol
    m: float

    def __post_init__(self) -> None:
        if not self.m > 0:
            raise ValueError(f"m must be positive, got {self.m}")

    @property
    def m2(self) -> float:
        return self.m * self.m

    @property
    def K1(self) -> float:
        return 1.0 / (self.m2 * (self.m2 + 1.0))

    @property
    def K2(self) -> float:
        return 1.0 / self.m2


def green_G(params: GreenParams, gamma_x: NormLike, tol: float = DEFAULT_TOL) -> SeriesValue:
    at = as_norm(gamma_x)
    if at.is_zero:
        raise OriginNotDefined(reason="green_at_origin", detail="G is not evaluated at x = 0")
    return radial_fourier(resolvent_handle(params.symbol, params.m), at.gamma, params.symbol.dims, tol)


def check_max_at_least_one(symbol: BesselSymbol) -> None:
    """max(|psi1|, |psi2|) >= 1 on the symbol window and at the origin."""
    p = symbol.dims.p
    lo, hi = symbol.window
    for at in [ZERO, *range(lo, hi + 1)]:
        top = max(eval_abs_psi(symbol.psi1, at, p), eval_abs_psi(symbol.psi2, at, p))
        if not (top.overflowed or top.log_value >= 0.0):
            raise PreconditionFailed(
                reason="max_below_one",
                detail=f"max(|psi1|, |psi2|) < 1 at {as_norm(at)}; the two-sided Green bounds need it >= 1",
            )


def green_bounds_certify(
    params: GreenParams,
    gamma_range: tuple[int, int],
    tol: float = DEFAULT_TOL,
) -> GreenBoundsReport:
    """-K1 p^{-n gamma} <= G <= K2 p^{-n gamma} with K1 = 1/(m^2(m^2+1)), K2 = 1/m^2."""
    check_max_at_least_one(params.symbol)
    n, p = params.symbol.dims.n, params.symbol.dims.p
    lo, hi = gamma_range
    cases = []
    for gamma in range(lo, hi + 1):
        series = green_G(params, gamma, tol)
        lower = -pow_p(p, -n * gamma, params.K1)
        upper = pow_p(p, -n * gamma, params.K2)
        lower_margin = series.value - lower
        upper_margin = upper - series.value
        cases.append(
            GreenBoundCase(
                gamma=gamma,
                value=series.value,
                lower=lower,
                upper=upper,
                lower_margin=lower_margin,
                upper_margin=upper_margin,
                passed=min(lower_margin, upper_margin) >= -series.tail_bound,
            )
        )
    return GreenBoundsReport(
        m=params.m,
        K1=params.K1,
        K2=params.K2,
        cases=cases,
        passed=all(case.passed for case in cases),
    )


def green_delta_fourier_side(params: GreenParams, phi: TestFunction, tol: float = DEFAULT_TOL) -> complex:
    """<G, (m^2 + A^alpha) phi> computed as the integral of phi^ * (m^2 + S)/(m^2 + S)."""
    symbol = params.symbol
    m2 = params.m2
    product = RadialFunctionHandle(
        lambda at: (m2 + symbol_S(symbol, at)) * (1.0 / (m2 + symbol_S(symbol, at))),
        "(m^2+S)/(m^2+S)",
    )
    return apply_operator(product, phi, None, tol)


def pairing_grid(params: GreenParams, phi: TestFunction, budget: int = PAIRING_BUDGET) -> FiniteGrid:
    """Grid carrying (m^2 + A^alpha) phi exactly: it is constant at scale p^{min r_k}
    and, for psi1 constant on the crossing ball, supported within p^{max(-r, r_k, ||a_k||)}."""
    dims = params.symbol.dims
    reach = [-params.symbol.crossing_radius, 0]
    for term in phi.terms:
        reach.append(term.radius_exp)
        centre = norm_exponent(term.center, dims.p)
        if not centre.is_zero:
            reach.append(centre.gamma)
    M = max(reach)
    N = max(1, -min(term.radius_exp for term in phi.terms))
    grid = FiniteGrid(dims, M, N)
    if grid.size > budget:
        raise BudgetExceeded(reason="pairing_budget", detail=f"pairing grid needs {grid.size} points, budget is {budget}")
    return grid


def green_delta_residual(
    params: GreenParams,
    phi: TestFunction,
    grid: FiniteGrid | None = None,
    tol: float = DEFAULT_TOL,
    budget: int = PAIRING_BUDGET,
) -> float:
    """|sum over cells of G * (m^2 + A^alpha) phi * p^{-nN} - phi(0)|.

    G enters through its cell means, so the origin cell carries the exact
    integral of G over p^N Z_p^n.
    """
    symbol = params.symbol
    grid = grid or pairing_grid(params, phi, budget)
    green, _ = cell_series(resolvent_handle(symbol, params.m), grid, tol)
    m2 = params.m2
    operator = RadialFunctionHandle(lambda at: m2 + symbol_S(symbol, at), "m^2+S")
    applied = np.empty(grid.size, dtype=np.complex128)
    for indices in distance_classes(grid, phi).values():
        applied[indices] = apply_operator(operator, phi, grid.point(indices[0]), tol)
    pairing = complex(np.sum(green * applied)) * float(grid.weight)
    residual = abs(pairing - phi.value(None))
    logger.debug("green delta pairing %s on %d points, residual %.3g", pairing, grid.size, residual)
    return residual
