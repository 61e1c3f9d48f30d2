"""Convolution semigroup (K_alpha)_{alpha > 0} and its probability criterion."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np

from padic_bessel.errors import BudgetExceeded
from padic_bessel.padic_core import ZERO, FiniteGrid, PrimeDim, SeriesValue
from padic_bessel.radial_transform import (
    DEFAULT_TOL,
    TestFunction,
    apply_operator,
    cell_series,
    distance_classes,
    kernel_mass,
    positivity_scan,
    symbol_handle,
    symbol_power_handle,
)
from padic_bessel.reports import DeltaLimitReport, ProbabilityVerdict, SemigroupReport
from padic_bessel.symbol_algebra import BesselSymbol, eval_abs_psi, symbol_S

logger = logging.getLogger(__name__)

CONVOLUTION_BUDGET = 10**5
CONVOLUTION_CELLS = 1 << 22
SAMPLE_BUDGET = 4096
DELTA_NOISE = 1e-10
PROBABILITY_TOL = 1e-12
COMPARE_SLACK = 1e-9


def grid_convolution(
    f_values: np.ndarray,
    g_values: np.ndarray,
    grid: FiniteGrid,
    budget: int = CONVOLUTION_BUDGET,
) -> np.ndarray:
    """(f * g)(x) = sum_y f(y) g(x - y) p^{-nN}, with x - y taken modulo p^N Z_p^n."""
    f = np.asarray(f_values)
    g = np.asarray(g_values)
    if f.shape != (grid.size,) or g.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} values per function, got {f.shape} and {g.shape}")
    if grid.size > budget:
        raise BudgetExceeded(
            reason="convolution_budget",
            detail=f"grid has {grid.size} points, convolution budget is {budget}",
        )
    coords = grid.index_array()
    modulus = grid.modulus
    out = np.empty(grid.size, dtype=np.result_type(f, g, np.float64))
    chunk = max(1, CONVOLUTION_CELLS // grid.size)
    for start in range(0, grid.size, chunk):
        block = coords[start : start + chunk]
        diff = (block[:, None, :] - coords[None, :, :]) % modulus
        index = np.zeros(diff.shape[:2], dtype=np.int64)
        for axis in range(grid.dims.n):
            index = index * modulus + diff[..., axis]
        out[start : start + chunk] = g[index] @ f
    return out * float(grid.weight)


def convolution_grid(symbol: BesselSymbol, gamma_set: Sequence[int], budget: int = CONVOLUTION_BUDGET) -> FiniteGrid:
    """Smallest grid holding the support of K_alpha (||x|| <= p^-r) and resolving every gamma in gamma_set."""
    M = max(0, -symbol.crossing_radius, *gamma_set)
    N = max(1, *(1 - gamma for gamma in gamma_set))
    grid = FiniteGrid(symbol.dims, M, N)
    if grid.size > budget:
        raise BudgetExceeded(
            reason="convolution_budget",
            detail=f"gamma set {list(gamma_set)} needs {grid.size} grid points, budget is {budget}",
        )
    return grid


def symbol_semigroup_identity(
    symbol: BesselSymbol,
    alpha1: float,
    alpha2: float,
    gamma_set: Sequence[int],
    grid: FiniteGrid | None = None,
    tol: float = DEFAULT_TOL,
    budget: int = CONVOLUTION_BUDGET,
) -> SemigroupReport:
    """K_a1 * K_a2 = K_{a1+a2}: exactly on the symbol side, by grid convolution on the kernel side."""
    if not (alpha1 > 0 and alpha2 > 0):
        raise ValueError("alpha1 and alpha2 must be positive")
    gamma_set = sorted(set(int(gamma) for gamma in gamma_set))
    if not gamma_set:
        raise ValueError("gamma_set is empty")
    first, second, total = (symbol.with_alpha(a) for a in (alpha1, alpha2, alpha1 + alpha2))
    residuals = []
    for at in [ZERO, *gamma_set]:
        target = symbol_S(total, at)
        residuals.append(abs(symbol_S(first, at) * symbol_S(second, at) - target) / max(1.0, target))
    fourier = max((r for r in residuals if math.isfinite(r)), default=0.0)

    grid = grid or convolution_grid(symbol, gamma_set, budget)
    k1, b1 = cell_series(symbol_handle(first), grid, tol)
    k2, b2 = cell_series(symbol_handle(second), grid, tol)
    k3, b3 = cell_series(symbol_handle(total), grid, tol)
    convolved = grid_convolution(k1, k2, grid)
    gammas, origin = grid.norm_exponent_array()
    mask = np.isin(gammas, gamma_set) & ~origin
    if not mask.any():
        raise ValueError(f"grid M={grid.M}, N={grid.N} resolves none of {gamma_set}")
    weight = float(grid.weight)
    physical = float(np.max(np.abs(convolved[mask] - k3[mask])))
    allowed = (
        float(np.max(b3[mask]))
        + float(np.max(b1)) * float(np.sum(np.abs(k2))) * weight
        + float(np.max(b2)) * float(np.sum(np.abs(k1))) * weight
        + COMPARE_SLACK
    )
    logger.debug("semigroup a1=%g a2=%g: fourier %.3g, physical %.3g (allowed %.3g)", alpha1, alpha2, fourier, physical, allowed)
    return SemigroupReport(
        alpha1=alpha1,
        alpha2=alpha2,
        fourier_residual=fourier,
        physical_residual=physical,
        physical_allowed=allowed,
        grid_points=grid.size,
        passed=fourier <= 1e-14 and physical <= allowed,
    )


def grid_mass(symbol: BesselSymbol, grid: FiniteGrid, tol: float = DEFAULT_TOL) -> SeriesValue:
    """Integral of K_alpha over p^-M Z_p^n from its cell means."""
    values, bounds = cell_series(symbol_handle(symbol), grid, tol)
    weight = float(grid.weight)
    return SeriesValue(
        value=float(np.sum(values)) * weight,
        tail_bound=float(np.sum(bounds)) * weight,
        terms_used=grid.size,
    )


def probability_verdict(
    symbol: BesselSymbol,
    gamma_range: tuple[int, int] = (-6, 6),
    tol: float = DEFAULT_TOL,
) -> ProbabilityVerdict:
    mass = kernel_mass(symbol)
    log_abs = eval_abs_psi(symbol.psi1, ZERO, symbol.dims.p)
    at_least_one = log_abs.overflowed or log_abs.log_value >= 0.0
    exactly_one = not log_abs.overflowed and abs(math.exp(log_abs.log_value) - 1.0) <= PROBABILITY_TOL
    return ProbabilityVerdict(
        mass=mass,
        is_sub_probability=at_least_one,
        is_probability=exactly_one,
        positivity=positivity_scan(symbol, gamma_range, tol),
    )


def sample_grid(dims: PrimeDim, budget: int = SAMPLE_BUDGET) -> FiniteGrid:
    if dims.p**dims.n > budget:
        raise BudgetExceeded(reason="sample_budget", detail=f"budget {budget} cannot hold a grid for p={dims.p}, n={dims.n}")
    levels = 1
    while dims.p ** (dims.n * (levels + 1)) <= budget:
        levels += 1
    return FiniteGrid(dims, levels // 2, levels - levels // 2)


def delta_limit_scan(
    symbol: BesselSymbol,
    phi: TestFunction,
    alphas: Sequence[float],
    grid: FiniteGrid | None = None,
    tol: float = DEFAULT_TOL,
    noise: float = DELTA_NOISE,
    budget: int = SAMPLE_BUDGET,
) -> DeltaLimitReport:
    """sup over grid points of |A^alpha phi - phi| for each alpha of a decreasing list."""
    alphas = [float(a) for a in alphas]
    if not alphas or any(a <= 0 for a in alphas):
        raise ValueError("alphas must be a non-empty list of positive values")
    if any(later >= earlier for earlier, later in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be strictly decreasing")
    grid = grid or sample_grid(symbol.dims, budget)
    representatives = [grid.point(indices[0]) for indices in distance_classes(grid, phi).values()]

    deviations = []
    for alpha in alphas:
        handle = symbol_power_handle(symbol, alpha)
        worst = 0.0
        for x in representatives:
            worst = max(worst, abs(apply_operator(handle, phi, x, tol) - phi.value(x)))
        deviations.append(worst)
    monotone = all(later <= earlier + noise for earlier, later in zip(deviations, deviations[1:]))
    if not monotone:
        logger.warning("delta-limit deviations are not non-increasing: %s", deviations)
    return DeltaLimitReport(alphas=alphas, deviations=deviations, noise=noise, non_increasing=monotone)
