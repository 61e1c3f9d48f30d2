"""Heat kernel Z_t = F^-1[exp(-t S)] and the Cauchy problem u_t + A^alpha u = 0."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from padic_bessel.errors import OriginNotDefined, PreconditionFailed, TZeroIsDelta
from padic_bessel.padic_core import ZERO, FiniteGrid, GridPoint, Rational, SeriesValue
from padic_bessel.radial_transform import (
    DEFAULT_TOL,
    BallTerm,
    TestFunction,
    apply_operator,
    distance_classes,
    heat_handle,
    radial_fourier,
)
from padic_bessel.reports import HeatCase, NonPositivityReport
from padic_bessel.symbol_algebra import BesselSymbol, NormLike, RadialSpec, as_norm, eval_abs_psi, symbol_S, symbol_value

logger = logging.getLogger(__name__)

NONPOSITIVE_TOL = 1e-12


@dataclass(frozen=True)
class HeatQuery:
    symbol: BesselSymbol
    t: float
    strict: bool = False

    def __post_init__(self) -> None:
        if not self.t >= 0:
            raise ValueError(f"t must be >= 0, got {self.t}")


def heat_Z(query: HeatQuery, gamma_x: NormLike, tol: float = DEFAULT_TOL) -> SeriesValue:
    if query.t == 0:
        raise TZeroIsDelta(reason="t_zero", detail="Z_0 is the Dirac delta; it has no pointwise values")
    at = as_norm(gamma_x)
    if at.is_zero:
        raise OriginNotDefined(reason="heat_at_origin", detail="Z_t is not evaluated at x = 0")
    symbol = query.symbol
    result = radial_fourier(heat_handle(symbol, query.t), at.gamma, symbol.dims, tol)
    if symbol_value(symbol, 1 - at.gamma).underflow:
        logger.warning("Z_t at t=%g, gamma=%d: S underflows to 0 on the outer shell", query.t, at.gamma)
        return SeriesValue(result.value, result.tail_bound, result.terms_used, underflow=True)
    return result


def _check_monotone(spec: RadialSpec, label: str, symbol: BesselSymbol, strict: bool) -> None:
    p = symbol.dims.p
    lo, hi = symbol.window
    previous = eval_abs_psi(spec, ZERO, p)
    for gamma in range(lo, hi + 1):
        current = eval_abs_psi(spec, gamma, p)
        if current < previous or (strict and current == previous):
            word = "increasing" if strict else "non-decreasing"
            raise PreconditionFailed(
                reason="not_monotone",
                detail=f"|{label}| is not {word} in the norm at gamma={gamma}",
            )
        previous = current


def check_monotone(query: HeatQuery) -> None:
    """|psi1| and |psi2| non-decreasing in the norm (strictly increasing with query.strict)."""
    _check_monotone(query.symbol.psi1, "psi1", query.symbol, query.strict)
    _check_monotone(query.symbol.psi2, "psi2", query.symbol, query.strict)


def proof_case(symbol: BesselSymbol, gamma: int) -> str:
    """Position of ||x|| = p^gamma against the sphere ||x|| = p^-r."""
    edge = -symbol.crossing_radius
    if gamma > edge:
        return "gt"
    if gamma == edge:
        return "eq"
    return "lt"


def nonpositivity_certify(
    query: HeatQuery,
    gamma_range: tuple[int, int],
    t_grid: Sequence[float],
    tol: float = DEFAULT_TOL,
) -> NonPositivityReport:
    """Z_t(x) <= 0 off the origin on gamma_range x t_grid."""
    check_monotone(query)
    symbol = query.symbol
    if not t_grid or any(not t > 0 for t in t_grid):
        raise ValueError("t_grid must hold positive times")
    lo, hi = gamma_range
    cases = []
    groups = {"gt": 0, "eq": 0, "lt": 0}
    for t in t_grid:
        timed = HeatQuery(symbol, float(t), query.strict)
        for gamma in range(lo, hi + 1):
            series = heat_Z(timed, gamma, tol)
            case = proof_case(symbol, gamma)
            groups[case] += 1
            cases.append(
                HeatCase(
                    gamma=gamma,
                    t=float(t),
                    value=series.value,
                    tail_bound=series.tail_bound,
                    proof_case=case,
                    passed=series.value <= NONPOSITIVE_TOL,
                )
            )
    worst = max(case.value for case in cases) if cases else -math.inf
    if worst > NONPOSITIVE_TOL:
        logger.warning("heat kernel positive somewhere: max value %.17g", worst)
    return NonPositivityReport(
        crossing_radius=symbol.crossing_radius,
        cases=cases,
        groups=groups,
        max_value=worst if cases else 0.0,
        passed=all(case.passed for case in cases),
    )


def cauchy_solve(
    symbol: BesselSymbol,
    u0: TestFunction,
    x: Sequence[Rational] | GridPoint | None,
    t: float,
    tol: float = DEFAULT_TOL,
) -> complex:
    """u(x, t) = F^-1[exp(-t S) u0^](x); u(x, 0) = u0(x)."""
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0:
        return u0.value(x)
    return apply_operator(heat_handle(symbol, t), u0, x, tol)


def _require_real(u0: TestFunction) -> None:
    if any(term.coeff.imag != 0 for term in u0.terms):
        raise ValueError("initial data must be real-valued")


def mass_evolution(symbol: BesselSymbol, u0: TestFunction, t: float) -> float:
    """Integral of u(., t): exp(-t S(0)) times the integral of u0."""
    _require_real(u0)
    if t == 0:
        return u0.integral().real
    return math.exp(-t * symbol_S(symbol, ZERO)) * u0.integral().real


def solution_grid_mass(
    symbol: BesselSymbol,
    u0: TestFunction,
    t: float,
    grid: FiniteGrid,
    tol: float = DEFAULT_TOL,
) -> float:
    """Integral of u(., t) over p^-M Z_p^n from one solver call per distance class."""
    _require_real(u0)
    total = 0j
    for indices in distance_classes(grid, u0).values():
        total += cauchy_solve(symbol, u0, grid.point(indices[0]), t, tol) * len(indices)
    return float(np.real(total)) * float(grid.weight)


def evolve_closed_form(symbol: BesselSymbol, u0: TestFunction, t: float) -> TestFunction:
    """u(., t) as ball data, available when S is constant on the Fourier support of every term."""
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t}")
    lo, _ = symbol.window
    limit = symbol_S(symbol, ZERO)
    terms = []
    for term in u0.terms:
        support_top = -term.radius_exp
        flat = all(symbol_S(symbol, gamma) == limit for gamma in range(min(lo, support_top), support_top + 1))
        if not flat:
            raise PreconditionFailed(
                reason="not_closed_form",
                detail=f"S varies on ||xi|| <= p^{support_top}; the ball of radius p^{term.radius_exp} does not evolve in closed form",
            )
        terms.append(BallTerm(term.center, term.radius_exp, term.coeff * math.exp(-t * limit)))
    return TestFunction(tuple(terms), u0.dims)
