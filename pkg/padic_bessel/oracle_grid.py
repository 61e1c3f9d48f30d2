"""Brute-force character sums over finite quotient groups.

Nothing here calls into radial_transform: values are plain sums of
exp(2 pi i {x . xi}_p) over p^{-M}Z_p^n / p^N Z_p^n, so agreement with the
series engine is independent evidence.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np

from padic_bessel.errors import BudgetExceeded, TailNotControlled, WindowExceeded
from padic_bessel.padic_core import (
    EXPONENT_WINDOW,
    ZERO,
    POINT_BUDGET,
    FiniteGrid,
    GridPoint,
    PrimeDim,
    Rational,
    SeriesValue,
    check_window,
    enumerate_grid,
    norm_exponent,
    pow_p,
    unit_sphere_char_integral,
    unit_vector,
)
from padic_bessel.radial_transform import RadialFunctionHandle
from padic_bessel.reports import ComparisonCase, ComparisonReport

logger = logging.getLogger(__name__)

COMPARE_SLACK = 1e-9
OUTER_SHELLS = 16
TAIL_SCAN_SHELLS = 64
FLAT_RTOL = 1e-12
DIRECT_CHUNK = 1024
DIRECT_CELLS = 1 << 22

Direction = Literal["forward", "inverse"]


@dataclass(frozen=True)
class OracleValue:
    value: float
    estimate: float
    grid_points: int


def _signed_turns(residues: np.ndarray, modulus: int, direction: Direction) -> np.ndarray:
    sign = 1.0 if direction == "forward" else -1.0
    return np.exp(sign * 2j * np.pi * (residues.astype(np.float64) / float(modulus)))


def grid_dft(
    values: np.ndarray,
    grid: FiniteGrid,
    direction: Direction = "forward",
    method: Literal["direct", "factored"] = "direct",
    budget: int = POINT_BUDGET,
) -> np.ndarray:
    """Transform values on grid into values on grid.dual.

    forward:  f^(xi) = sum_x chi(xi . x) f(x) p^{-nN}
    inverse:  f(x)   = sum_xi chi(-x . xi) f^(xi) p^{-nN}, where N is the exponent of the grid passed in
    """
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} values, got shape {values.shape}")
    if grid.size > budget:
        raise BudgetExceeded(reason="grid_budget", detail=f"grid has {grid.size} points, budget is {budget}")
    weight = float(grid.weight)
    modulus = grid.modulus
    if method == "factored":
        n = grid.dims.n
        cube = values.reshape((modulus,) * n)
        axis = np.arange(modulus, dtype=np.int64)
        kernel = _signed_turns(np.outer(axis, axis) % modulus, modulus, direction)
        for k in range(n):
            cube = np.moveaxis(np.tensordot(kernel, cube, axes=([1], [k])), 0, k)
        return cube.reshape(-1) * weight
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    coords = grid.index_array()
    out = np.empty(grid.size, dtype=np.complex128)
    chunk = max(1, min(DIRECT_CHUNK, DIRECT_CELLS // grid.size))
    for start in range(0, grid.size, chunk):
        block = coords[start : start + chunk]
        residues = (block @ coords.T) % modulus
        out[start : start + chunk] = _signed_turns(residues, modulus, direction) @ values
    return out * weight


def brute_sphere_integral(j: int, dims: PrimeDim, budget: int = POINT_BUDGET) -> float:
    """Integral over ||z|| = 1 of chi(-p^{-j} z_1) by exhaustive sum on Z_p^n / p^{max(j,1)} Z_p^n."""
    grid = enumerate_grid(dims, 0, max(j, 1), budget)
    gammas, origin = grid.norm_exponent_array()
    phases = grid.pairing_phases(unit_vector(dims, j))
    sphere = (gammas == 0) & ~origin
    total = np.sum(np.exp(-2j * np.pi * phases[sphere]))
    return float(np.real(total) * float(grid.weight))


def _as_vector(x: Sequence[Rational] | GridPoint) -> tuple:
    return x.rationals() if isinstance(x, GridPoint) else tuple(x)


def _inner_estimate(multiplier: RadialFunctionHandle, grid: FiniteGrid, limit: float) -> float:
    """The origin cell takes m(0); bound what the shells ||xi|| <= p^-N would change."""
    dims = grid.dims
    deviation = 0.0
    for k in range(TAIL_SCAN_SHELLS):
        gamma = -grid.N - k
        if gamma < -EXPONENT_WINDOW:
            break
        try:
            value = multiplier(gamma)
        except WindowExceeded:
            break
        deviation = max(deviation, abs(value - limit))
    return pow_p(dims.p, -dims.n * grid.N, deviation)


def oracle_kernel_value(
    multiplier: RadialFunctionHandle,
    x: Sequence[Rational] | GridPoint,
    grid: FiniteGrid,
    tail_mode: Literal["shells", "bound"] = "shells",
    budget: int = POINT_BUDGET,
) -> OracleValue:
    """sum_xi chi(-x . xi) m(||xi||) p^{-nN} over the frequency grid, plus the shells beyond p^M."""
    dims = grid.dims
    p, n = dims.p, dims.n
    vector = _as_vector(x)
    gamma_x = norm_exponent(vector, p)
    if gamma_x.is_zero:
        raise ValueError("the oracle evaluates off the origin only")
    gx = gamma_x.gamma
    check_window(gx)
    if grid.size > budget:
        raise BudgetExceeded(reason="grid_budget", detail=f"grid has {grid.size} points, budget is {budget}")
    limit = multiplier(ZERO)
    if not math.isfinite(limit):
        raise TailNotControlled(reason="unbounded_at_origin", detail=f"{multiplier.description} is not finite at 0")

    gammas, origin = grid.norm_exponent_array()
    shell_values = np.empty(grid.size, dtype=np.float64)
    for gamma in np.unique(gammas[~origin]):
        shell_values[(gammas == gamma) & ~origin] = multiplier(int(gamma))
    shell_values[origin] = limit
    phases = grid.pairing_phases(vector)
    total = np.sum(np.exp(-2j * np.pi * phases) * shell_values) * float(grid.weight)
    estimate = _inner_estimate(multiplier, grid, limit)

    # shells above 1 - gx integrate chi to zero
    last = 1 - gx
    for k in range(grid.M + 1, last + 1):
        shell = pow_p(p, n * k, multiplier(k))
        if tail_mode == "shells" and k <= grid.M + OUTER_SHELLS:
            total += shell * unit_sphere_char_integral(k + gx, dims)
        else:
            estimate += abs(shell) * (1.0 - dims.inv_pn)
    return OracleValue(value=float(np.real(total)), estimate=estimate, grid_points=grid.size)


def dilation_cap(dims: PrimeDim, budget: int = POINT_BUDGET) -> int:
    """Largest N such that p^{-1}Z_p^n / p^N Z_p^n has at most budget points."""
    levels = 1
    while dims.p ** (dims.n * (levels + 1)) <= budget:
        levels += 1
    if levels < 2:
        raise BudgetExceeded(reason="grid_budget", detail=f"budget {budget} cannot hold a grid for p={dims.p}, n={dims.n}")
    return levels - 1


def flat_depth(multiplier: RadialFunctionHandle, dims: PrimeDim, budget: int = POINT_BUDGET) -> int:
    """Smallest N >= 1 with m within FLAT_RTOL of m(0) on every shell ||xi|| <= p^-N.

    Capped by dilation_cap; past the cap the inner estimate carries what is left.
    """
    cap = dilation_cap(dims, budget)
    limit = multiplier(ZERO)
    tol = FLAT_RTOL * max(1.0, abs(limit))
    steep = 0
    for k in range(1, cap + TAIL_SCAN_SHELLS + 1):
        if k > EXPONENT_WINDOW:
            break
        try:
            value = multiplier(-k)
        except WindowExceeded:
            break
        if not abs(value - limit) <= tol:
            steep = k
    return min(steep + 1, cap)


def dilated_grid(dims: PrimeDim, multiplier: RadialFunctionHandle, budget: int = POINT_BUDGET) -> FiniteGrid:
    """Frequency grid p^{-1}Z_p^n / p^N Z_p^n, just deep enough for m to be flat inside the origin cell."""
    return FiniteGrid(dims, 1, flat_depth(multiplier, dims, budget))


def oracle_dilated_value(
    multiplier: RadialFunctionHandle,
    gamma_x: int,
    dims: PrimeDim,
    budget: int = POINT_BUDGET,
) -> OracleValue:
    """Oracle at ||x|| = p^gamma_x, computed at a unit vector after the change of variables xi -> p^gamma_x xi.

    The dilated multiplier m'(k) = m(k - gamma_x) is summed on a grid whose
    outermost shell is exactly the last one the character sees and whose
    origin cell lies where m' no longer varies.
    """
    check_window(gamma_x)
    shifted = RadialFunctionHandle(
        lambda at: multiplier(at if at.is_zero else at.gamma - gamma_x),
        f"{multiplier.description} shifted by {gamma_x}",
    )
    grid = dilated_grid(dims, shifted, budget)
    logger.debug("dilated oracle at gamma=%d on p^-1 / p^%d (%d points)", gamma_x, grid.N, grid.size)
    raw = oracle_kernel_value(shifted, unit_vector(dims, 0), grid, budget=budget)
    scale = -dims.n * gamma_x
    return OracleValue(
        value=pow_p(dims.p, scale, raw.value),
        estimate=pow_p(dims.p, scale, raw.estimate),
        grid_points=raw.grid_points,
    )


def compare_suite(
    series_fn: Callable[[Any], SeriesValue],
    oracle_fn: Callable[[Any], OracleValue],
    inputs: Iterable[Any],
    slack: float = COMPARE_SLACK,
) -> ComparisonReport:
    report = ComparisonReport()
    for item in inputs:
        series = series_fn(item)
        oracle = oracle_fn(item)
        difference = abs(series.value - oracle.value)
        allowed = series.tail_bound + oracle.estimate + slack
        case = ComparisonCase(
            label=str(item),
            series_value=series.value,
            oracle_value=oracle.value,
            difference=difference,
            allowed=allowed,
            margin=allowed - difference,
            passed=difference <= allowed,
        )
        if not case.passed:
            logger.warning("series/oracle mismatch at %s: |%.17g - %.17g| > %.3g", case.label, series.value, oracle.value, allowed)
        report.cases.append(case)
    return report
