"""Certification suites behind `verify`.

Each suite takes a RunConfig and returns SuiteCase records; a failed case is
data, only numerical breakdowns raise.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from fractions import Fraction

import numpy as np

from padic_bessel.config import RunConfig
from padic_bessel.errors import PreconditionFailed
from padic_bessel.green_function import (
    PAIRING_BUDGET,
    GreenParams,
    green_bounds_certify,
    green_delta_residual,
    green_G,
)
from padic_bessel.heat_kernel import (
    NONPOSITIVE_TOL,
    HeatQuery,
    cauchy_solve,
    evolve_closed_form,
    heat_Z,
    mass_evolution,
    nonpositivity_certify,
    solution_grid_mass,
)
from padic_bessel.oracle_grid import (
    brute_sphere_integral,
    compare_suite,
    grid_dft,
    oracle_dilated_value,
)
from padic_bessel.padic_core import ZERO, FiniteGrid, PrimeDim, enumerate_grid, unit_sphere_char_integral
from padic_bessel.radial_transform import (
    TestFunction,
    distance_classes,
    heat_handle,
    kernel_K,
    kernel_mass,
    positivity_scan,
    resolvent_handle,
    symbol_handle,
)
from padic_bessel.reports import ComparisonReport, SuiteCase
from padic_bessel.semigroup_measures import (
    CONVOLUTION_BUDGET,
    SAMPLE_BUDGET,
    delta_limit_scan,
    grid_mass,
    probability_verdict,
    sample_grid,
    symbol_semigroup_identity,
)
from padic_bessel.symbol_algebra import BesselSymbol, eval_abs_psi, symbol_S

logger = logging.getLogger(__name__)

# (psi1, psi2, alpha) with psi1 constant
STANDARD_BATTERY = (
    ("const:1", "power:a=1,b=2", 1.0),
    ("const:2", "power:a=1,b=1", 0.5),
    ("const:3", "tower:j=1;terms=1*y^1", 1.0),
    ("const:1", "power:a=0.5,b=3", 2.0),
)
SPHERE_JS = range(-3, 5)
SPHERE_TOL = 1e-10
INVOLUTION_BUDGET = 4096
INVOLUTION_TOL = 1e-9
SEMIGROUP_PAIRS = ((1.0, 1.0), (0.5, 1.5), (2.0, 3.0))
SEMIGROUP_GAMMAS = (-2, 2)
FOURIER_RESIDUAL_TOL = 1e-14
MASS_TOL = 1e-8
GREEN_DELTA_TOL = 1e-6
HEAT_TIMES = (0.1, 1.0, 10.0)
CAUCHY_TOL = 1e-12
DELTA_ALPHAS = (1e-2, 1e-4, 1e-6)
DELTA_FINAL_TOL = 1e-5

Suite = Callable[[RunConfig], list[SuiteCase]]


def standard_test_functions(dims: PrimeDim) -> dict[str, TestFunction]:
    unit = (Fraction(1),) + (Fraction(0),) * (dims.n - 1)
    return {
        "1[Zp]": TestFunction.ball_indicator(dims, 0),
        "1[pZp]": TestFunction.ball_indicator(dims, -1),
        "1[p^-1 Zp]": TestFunction.ball_indicator(dims, 1),
        "1[e1 + pZp]": TestFunction.ball_indicator(dims, -1, center=unit),
        "1[Zp] - 1/2 1[pZp]": TestFunction.ball_indicator(dims, 0) + TestFunction.ball_indicator(dims, -1, coeff=-0.5),
    }


def kernel_compactly_supported(symbol: BesselSymbol) -> bool:
    """S flat on ||xi|| <= p^r, which puts K_alpha inside ||x|| <= p^-r."""
    lo, _ = symbol.window
    limit = symbol_S(symbol, ZERO)
    return all(symbol_S(symbol, gamma) == limit for gamma in range(lo, symbol.crossing_radius + 1))


def _case(suite: str, case: str, passed: bool, margin: float | None, **detail: object) -> SuiteCase:
    return SuiteCase(suite=suite, case=case, passed=passed, margin=margin, detail=detail)


def _comparison_cases(suite: str, prefix: str, report: ComparisonReport) -> list[SuiteCase]:
    return [
        _case(
            suite,
            f"{prefix} gamma={item.label}",
            item.passed,
            item.margin,
            series=item.series_value,
            oracle=item.oracle_value,
        )
        for item in report.cases
    ]


def _gammas(config: RunConfig) -> list[int]:
    lo, hi = config.gamma
    return list(range(lo, hi + 1))


def suite_formula1_oracle(config: RunConfig) -> list[SuiteCase]:
    cases = []
    for j in SPHERE_JS:
        closed = unit_sphere_char_integral(j, config.dims)
        brute = brute_sphere_integral(j, config.dims, config.budget)
        diff = abs(closed - brute)
        cases.append(_case("formula1-oracle", f"j={j}", diff <= SPHERE_TOL, SPHERE_TOL - diff, closed=closed, brute=brute))
    return cases


def _involution_grid(config: RunConfig) -> FiniteGrid:
    cap = min(INVOLUTION_BUDGET, config.budget)
    grid = FiniteGrid(config.dims, config.M, config.N)
    if grid.size > cap:
        logger.info("grid M=%d N=%d too large for direct transforms, using a sample grid", config.M, config.N)
        grid = sample_grid(config.dims, cap)
    return enumerate_grid(config.dims, grid.M, grid.N, config.budget)


def suite_fourier_involution(config: RunConfig) -> list[SuiteCase]:
    grid = _involution_grid(config)
    rng = np.random.default_rng(config.seed)
    values = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
    forward = grid_dft(values, grid, budget=config.budget)
    twice = grid_dft(forward, grid.dual, budget=config.budget)
    back = grid_dft(forward, grid.dual, "inverse", budget=config.budget)
    factored = grid_dft(values, grid, method="factored", budget=config.budget)

    coords = (-grid.index_array()) % grid.modulus
    negated = np.zeros(grid.size, dtype=np.int64)
    for axis in range(grid.dims.n):
        negated = negated * grid.modulus + coords[:, axis]

    checks = {
        "forward twice is f(-x)": float(np.max(np.abs(twice - values[negated]))),
        "inverse after forward is f": float(np.max(np.abs(back - values))),
        "factored matches direct": float(np.max(np.abs(factored - forward))),
    }
    return [
        _case("fourier-involution", name, err <= INVOLUTION_TOL, INVOLUTION_TOL - err, grid_points=grid.size)
        for name, err in checks.items()
    ]


def suite_kernel_oracle(config: RunConfig) -> list[SuiteCase]:
    symbol = config.build_symbol()
    dims, tol = symbol.dims, config.tol
    gammas = _gammas(config)
    cases = _comparison_cases(
        "kernel-oracle",
        f"K[alpha={symbol.alpha}]",
        compare_suite(
            lambda g: kernel_K(symbol, g, tol),
            lambda g: oracle_dilated_value(symbol_handle(symbol), g, dims, config.budget),
            gammas,
        ),
    )
    for m in config.m:
        params = GreenParams(symbol, m)
        cases += _comparison_cases(
            "kernel-oracle",
            f"G[m={m}]",
            compare_suite(
                lambda g: green_G(params, g, tol),
                lambda g: oracle_dilated_value(resolvent_handle(symbol, m), g, dims, config.budget),
                gammas,
            ),
        )
    for t in config.t:
        if t == 0:
            continue
        query = HeatQuery(symbol, t)
        cases += _comparison_cases(
            "kernel-oracle",
            f"Z[t={t}]",
            compare_suite(
                lambda g: heat_Z(query, g, tol),
                lambda g: oracle_dilated_value(heat_handle(symbol, t), g, dims, config.budget),
                gammas,
            ),
        )
    return cases


def suite_semigroup(config: RunConfig) -> list[SuiteCase]:
    symbol = config.build_symbol()
    lo, hi = config.gamma
    gamma_set = list(range(max(lo, SEMIGROUP_GAMMAS[0]), min(hi, SEMIGROUP_GAMMAS[1]) + 1)) or [0]
    cases = []
    for alpha1, alpha2 in SEMIGROUP_PAIRS:
        report = symbol_semigroup_identity(
            symbol, alpha1, alpha2, gamma_set, tol=config.tol, budget=min(config.budget, CONVOLUTION_BUDGET)
        )
        label = f"alpha={alpha1}+{alpha2}"
        cases.append(
            _case(
                "semigroup",
                f"{label} fourier",
                report.fourier_residual <= FOURIER_RESIDUAL_TOL,
                FOURIER_RESIDUAL_TOL - report.fourier_residual,
            )
        )
        cases.append(
            _case(
                "semigroup",
                f"{label} physical",
                report.physical_residual <= report.physical_allowed,
                report.physical_allowed - report.physical_residual,
                grid_points=report.grid_points,
            )
        )
    return cases


def suite_mass(config: RunConfig) -> list[SuiteCase]:
    symbol = config.build_symbol()
    mass = kernel_mass(symbol)
    expected = eval_abs_psi(symbol.psi1, ZERO, symbol.dims.p).magnitude() ** (-symbol.alpha)
    drift = abs(mass - expected)
    allowed = MASS_TOL * max(1.0, expected)
    cases = [_case("mass", "closed form", drift <= allowed, allowed - drift, mass=mass)]

    if kernel_compactly_supported(symbol):
        grid = enumerate_grid(symbol.dims, max(config.M, -symbol.crossing_radius, 0), config.N, config.budget)
        integrated = grid_mass(symbol, grid, config.tol)
        diff = abs(integrated.value - mass)
        allowed = integrated.tail_bound + MASS_TOL
        cases.append(_case("mass", "grid integration", diff <= allowed, allowed - diff, integrated=integrated.value))
    else:
        logger.info("K_alpha is not compactly supported for this symbol; grid integration skipped")

    verdict = probability_verdict(symbol, config.gamma, config.tol)
    if verdict.is_sub_probability:
        positivity = verdict.positivity
        cases.append(
            _case(
                "mass",
                "probability measure" if verdict.is_probability else "sub-probability measure",
                positivity.passed and mass <= 1.0 + MASS_TOL,
                positivity.min_value + positivity.tol,
                mass=mass,
            )
        )
    return cases


def suite_positivity(config: RunConfig) -> list[SuiteCase]:
    report = positivity_scan(config.build_symbol(), config.gamma, config.tol)
    return [
        _case(
            "positivity",
            f"gamma={config.gamma[0]}..{config.gamma[1]}",
            report.passed,
            report.min_value + report.tol,
            argmin_gamma=report.argmin_gamma,
            first_increase=report.first_increase,
        )
    ]


def suite_green_bounds(config: RunConfig) -> list[SuiteCase]:
    symbol = config.build_symbol()
    cases = []
    for m in config.m:
        report = green_bounds_certify(GreenParams(symbol, m), config.gamma, config.tol)
        cases += [
            _case("green-bounds", f"m={m} gamma={item.gamma}", item.passed, min(item.lower_margin, item.upper_margin))
            for item in report.cases
        ]
    return cases


def suite_green_delta(config: RunConfig) -> list[SuiteCase]:
    symbol = config.build_symbol()
    cases = []
    for m in config.m:
        params = GreenParams(symbol, m)
        for name, phi in standard_test_functions(symbol.dims).items():
            residual = green_delta_residual(params, phi, tol=config.tol, budget=min(config.budget, PAIRING_BUDGET))
            cases.append(_case("green-delta", f"m={m} {name}", residual <= GREEN_DELTA_TOL, GREEN_DELTA_TOL - residual))
    return cases


def suite_heat_nonpositive(config: RunConfig) -> list[SuiteCase]:
    symbol = config.build_symbol()
    times = [t for t in config.t if t > 0] or list(HEAT_TIMES)
    report = nonpositivity_certify(HeatQuery(symbol, times[0], config.strict_monotone), config.gamma, times, config.tol)
    logger.info("proof-case groups: %s", report.groups)
    return [
        _case(
            "heat-nonpositive",
            f"t={item.t} gamma={item.gamma}",
            item.passed,
            NONPOSITIVE_TOL - item.value,
            proof_case=item.proof_case,
        )
        for item in report.cases
    ]


def suite_cauchy(config: RunConfig) -> list[SuiteCase]:
    symbol = config.build_symbol()
    dims = symbol.dims
    u0 = TestFunction.ball_indicator(dims, 0)
    grid = enumerate_grid(dims, max(0, -symbol.crossing_radius), max(1, config.N), config.budget)
    representatives = [grid.point(indices[0]) for indices in distance_classes(grid, u0).values()]
    cases = []

    start = max(abs(cauchy_solve(symbol, u0, x, 0.0) - u0.value(x)) for x in representatives)
    cases.append(_case("cauchy", "t=0 returns initial data", start == 0, -start))

    for t in config.t:
        if t == 0:
            continue
        try:
            closed = evolve_closed_form(symbol, u0, t)
        except PreconditionFailed as exc:
            logger.info("no closed form at t=%g: %s", t, exc.detail)
        else:
            err = max(abs(cauchy_solve(symbol, u0, x, t, config.tol) - closed.value(x)) for x in representatives)
            cases.append(_case("cauchy", f"t={t} closed form", err <= CAUCHY_TOL, CAUCHY_TOL - err))
        expected = mass_evolution(symbol, u0, t)
        integrated = solution_grid_mass(symbol, u0, t, grid, config.tol)
        diff = abs(integrated - expected)
        cases.append(_case("cauchy", f"t={t} mass", diff <= MASS_TOL, MASS_TOL - diff, mass=expected, integrated=integrated))
    return cases


def suite_delta_limit(config: RunConfig) -> list[SuiteCase]:
    symbol = config.build_symbol()
    alphas: Sequence[float] = config.alphas or DELTA_ALPHAS
    phi = TestFunction.ball_indicator(symbol.dims, -1)
    report = delta_limit_scan(symbol, phi, alphas, tol=config.tol, budget=min(config.budget, SAMPLE_BUDGET))
    cases = [
        _case("delta-limit", f"alpha={alpha:g}", True, None, deviation=deviation)
        for alpha, deviation in zip(report.alphas, report.deviations)
    ]
    final = report.deviations[-1]
    cases.append(
        _case(
            "delta-limit",
            "deviation vanishes",
            report.non_increasing and final <= DELTA_FINAL_TOL,
            DELTA_FINAL_TOL - final,
        )
    )
    return cases


SUITES: dict[str, Suite] = {
    "formula1-oracle": suite_formula1_oracle,
    "fourier-involution": suite_fourier_involution,
    "kernel-oracle": suite_kernel_oracle,
    "semigroup": suite_semigroup,
    "mass": suite_mass,
    "positivity": suite_positivity,
    "green-bounds": suite_green_bounds,
    "green-delta": suite_green_delta,
    "heat-nonpositive": suite_heat_nonpositive,
    "cauchy": suite_cauchy,
    "delta-limit": suite_delta_limit,
}


def run_suite(suite_id: str, config: RunConfig) -> list[SuiteCase]:
    suite = SUITES.get(suite_id)
    if suite is None:
        raise KeyError(f"no suite registered as {suite_id!r}")
    cases = suite(config)
    failed = sum(not case.passed for case in cases)
    if failed:
        logger.warning("%s: %d of %d cases failed", suite_id, failed, len(cases))
    return cases


def summarize(cases: Sequence[SuiteCase]) -> dict[str, object]:
    margins = [case.margin for case in cases if case.margin is not None and math.isfinite(case.margin)]
    return {
        "cases": len(cases),
        "failed": sum(not case.passed for case in cases),
        "worst_margin": min(margins) if margins else None,
    }
