"""Negative definite radial functions and the composite Bessel symbol.

A radial function is evaluated on norm exponents: psi(p^gamma), or psi(0)
at the origin. Magnitudes are carried as LogMagnitude so exponential towers
never overflow; the symbol S = [max(|psi1|, |psi2|)]^-alpha underflows to an
exact 0 with a flag instead.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from padic_bessel.errors import HypothesisAViolation, Psi1Vanishes
from padic_bessel.padic_core import (
    ZERO,
    FiniteGrid,
    GridPoint,
    NormExponent,
    PrimeDim,
    check_window,
)
from padic_bessel.reports import HypothesisAReport, SpotCheckReport, SpotCheckWitness

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = (-64, 64)
DEFAULT_SPOT_TOL = 1e-9
MAX_SPOT_POINTS = 6

NormLike = Union[NormExponent, int]


def as_norm(at: NormLike) -> NormExponent:
    return at if isinstance(at, NormExponent) else NormExponent.finite(at)


@dataclass(frozen=True)
class ConstantSpec:
    c: float

    def __post_init__(self) -> None:
        if not self.c >= 0:
            raise ValueError("constant must be non-negative")


@dataclass(frozen=True)
class PowerSpec:
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0):
            raise ValueError("power coefficients must be positive")


@dataclass(frozen=True)
class ExpTowerSpec:
    """exp(exp(...exp(psi0)...)) with j exponentials, psi0(y) = sum c_k y^alpha_k."""

    j: int
    terms: tuple[tuple[float, int], ...]

    def __post_init__(self) -> None:
        if self.j < 1:
            raise ValueError("tower height must be >= 1")
        if not self.terms:
            raise ValueError("tower needs at least one term")
        for c, power in self.terms:
            if c < 0 or power < 1:
                raise ValueError("tower terms need c_k >= 0 and positive integer powers")
        if not any(c > 0 for c, _ in self.terms):
            raise ValueError("tower needs at least one positive coefficient")


TableDefault = Union[Literal["zero", "clamp"], float]


@dataclass(frozen=True)
class TableSpec:
    entries: tuple[tuple[int, float], ...]
    default: TableDefault = "zero"

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("table needs at least one entry")
        gammas = [gamma for gamma, _ in self.entries]
        if len(set(gammas)) != len(gammas):
            raise ValueError("table has duplicate norm exponents")
        object.__setattr__(self, "entries", tuple(sorted(self.entries)))

    def lookup(self, at: NormExponent) -> float:
        if not at.is_zero:
            for gamma, value in self.entries:
                if gamma == at.gamma:
                    return value
        if self.default == "zero":
            return 0.0
        if self.default == "clamp":
            if at.is_zero or at.gamma < self.entries[0][0]:
                return self.entries[0][1]
            below = [value for gamma, value in self.entries if gamma <= at.gamma]
            return below[-1]
        return float(self.default)


@dataclass(frozen=True)
class OneMinusJHatSpec:
    """1 - J^ for a radial probability density J, with J^ given as a clamped table."""

    inner: TableSpec

    def __post_init__(self) -> None:
        if self.inner.default != "clamp":
            object.__setattr__(self, "inner", TableSpec(self.inner.entries, "clamp"))
        for _, value in self.inner.entries:
            if not 0.0 <= 1.0 - value <= 2.0:
                raise ValueError("1 - J^ must lie in [0, 2]")


RadialSpec = Union[ConstantSpec, PowerSpec, ExpTowerSpec, TableSpec, OneMinusJHatSpec]


@dataclass(frozen=True, order=True)
class LogMagnitude:
    """log|psi| = exp^(tower_height)(log_value); tower_height > 0 only past float range."""

    tower_height: int
    log_value: float

    @classmethod
    def of(cls, log_value: float, tower_height: int = 0) -> LogMagnitude:
        while tower_height > 0:
            try:
                log_value = math.exp(log_value)
            except OverflowError:
                break
            tower_height -= 1
        return cls(tower_height, log_value)

    @property
    def is_neg_infinity(self) -> bool:
        return self.tower_height == 0 and self.log_value == -math.inf

    @property
    def overflowed(self) -> bool:
        return self.tower_height > 0

    def magnitude(self) -> float:
        if self.overflowed:
            return math.inf
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf


NEG_INFINITY = LogMagnitude(0, -math.inf)


def _log_or_neg_inf(value: float) -> float:
    return math.log(value) if value > 0 else -math.inf


def eval_abs_psi(spec: RadialSpec, at: NormLike, p: int) -> LogMagnitude:
    at = as_norm(at)
    if not at.is_zero:
        check_window(at.gamma)
    log_p = math.log(p)
    if isinstance(spec, ConstantSpec):
        return LogMagnitude.of(_log_or_neg_inf(spec.c))
    if isinstance(spec, PowerSpec):
        if at.is_zero:
            return NEG_INFINITY
        return LogMagnitude.of(math.log(spec.a) + at.gamma * spec.b * log_p)
    if isinstance(spec, ExpTowerSpec):
        if at.is_zero:
            inner = -math.inf
        else:
            logs = [math.log(c) + power * at.gamma * log_p for c, power in spec.terms if c > 0]
            top = max(logs)
            inner = top + math.log(sum(math.exp(item - top) for item in logs))
        # log|psi| = exp^(j-1)(psi0) = exp^(j)(log psi0)
        return LogMagnitude.of(inner, spec.j)
    if isinstance(spec, TableSpec):
        return LogMagnitude.of(_log_or_neg_inf(abs(spec.lookup(at))))
    if isinstance(spec, OneMinusJHatSpec):
        return LogMagnitude.of(_log_or_neg_inf(abs(1.0 - spec.inner.lookup(at))))
    raise TypeError(f"unsupported radial spec {type(spec).__name__}")


def eval_psi(spec: RadialSpec, at: NormLike, p: int) -> float:
    """Signed real value psi(p^gamma); inf when a tower leaves float range."""
    at = as_norm(at)
    if isinstance(spec, TableSpec):
        if not at.is_zero:
            check_window(at.gamma)
        return spec.lookup(at)
    if isinstance(spec, OneMinusJHatSpec):
        if not at.is_zero:
            check_window(at.gamma)
        return 1.0 - spec.inner.lookup(at)
    return eval_abs_psi(spec, at, p).magnitude()


def _window_range(window: tuple[int, int]) -> range:
    lo, hi = window
    if lo > hi:
        raise ValueError(f"empty window {window}")
    return range(lo, hi + 1)


def crossing_radius(
    psi1: RadialSpec,
    psi2: RadialSpec,
    dims: PrimeDim,
    window: tuple[int, int] = DEFAULT_WINDOW,
) -> int:
    """Largest gamma with |psi1| >= |psi2|, after checking the predicate is a ball."""
    p = dims.p
    predicate: list[tuple[int, bool]] = []
    for gamma in _window_range(window):
        mag1 = eval_abs_psi(psi1, gamma, p)
        if mag1.is_neg_infinity:
            raise Psi1Vanishes(reason="psi1_vanishes", detail=f"|psi1(p^{gamma})| = 0")
        predicate.append((gamma, mag1 >= eval_abs_psi(psi2, gamma, p)))
    # the origin is not part of the scan; psi1(0) = 0 is allowed there
    if not eval_abs_psi(psi1, ZERO, p) >= eval_abs_psi(psi2, ZERO, p):
        raise HypothesisAViolation(
            reason="origin_outside_ball",
            detail="|psi1(0)| < |psi2(0)|, so the set {|psi1| >= |psi2|} is not a ball",
        )

    flags = [flag for _, flag in predicate]
    if all(flags):
        raise HypothesisAViolation(
            reason="no_crossing",
            detail=f"|psi1| >= |psi2| on the whole window {window}; no finite crossing radius",
        )
    if not any(flags):
        raise HypothesisAViolation(
            reason="no_crossing",
            detail=f"|psi1| < |psi2| on the whole window {window}; no finite crossing radius",
        )
    first_false = flags.index(False)
    if any(flags[first_false:]):
        offender = next(gamma for gamma, flag in predicate[first_false:] if flag)
        raise HypothesisAViolation(
            reason="not_downward_closed",
            detail=f"|psi1| >= |psi2| fails at gamma={predicate[first_false][0]} but holds again at gamma={offender}",
        )
    return predicate[first_false - 1][0]


def hypothesis_a_report(
    psi1: RadialSpec,
    psi2: RadialSpec,
    dims: PrimeDim,
    window: tuple[int, int] = DEFAULT_WINDOW,
) -> HypothesisAReport:
    try:
        r = crossing_radius(psi1, psi2, dims, window)
    except (HypothesisAViolation, Psi1Vanishes) as exc:
        return HypothesisAReport(holds=False, window=window, reason=exc.detail)
    return HypothesisAReport(holds=True, crossing_radius=r, window=window)


@dataclass(frozen=True)
class BesselSymbol:
    psi1: RadialSpec
    psi2: RadialSpec
    alpha: float
    dims: PrimeDim
    crossing_radius: int
    window: tuple[int, int] = DEFAULT_WINDOW

    @classmethod
    def build(
        cls,
        psi1: RadialSpec,
        psi2: RadialSpec,
        alpha: float,
        dims: PrimeDim,
        window: tuple[int, int] = DEFAULT_WINDOW,
    ) -> BesselSymbol:
        if not alpha > 0:
            raise ValueError("alpha must be positive")
        r = crossing_radius(psi1, psi2, dims, window)
        logger.debug("crossing radius r=%d on window %s", r, window)
        return cls(psi1, psi2, float(alpha), dims, r, window)

    def with_alpha(self, alpha: float) -> BesselSymbol:
        if not alpha > 0:
            raise ValueError("alpha must be positive")
        return dataclasses.replace(self, alpha=float(alpha))


@dataclass(frozen=True)
class SymbolValue:
    value: float
    underflow: bool = False


def _power_of_magnitude(mag: LogMagnitude, alpha: float) -> SymbolValue:
    if mag.overflowed:
        return SymbolValue(0.0, True)
    value = math.exp(-alpha * mag.log_value)
    return SymbolValue(value, value == 0.0)


def symbol_value(symbol: BesselSymbol, at: NormLike) -> SymbolValue:
    p = symbol.dims.p
    dominant = max(eval_abs_psi(symbol.psi1, at, p), eval_abs_psi(symbol.psi2, at, p))
    result = _power_of_magnitude(dominant, symbol.alpha)
    if result.underflow:
        logger.debug("symbol underflows to 0 at %s", as_norm(at))
    return result


def symbol_S(symbol: BesselSymbol, at: NormLike) -> float:
    return symbol_value(symbol, at).value


def branch_S(symbol: BesselSymbol, at: NormLike) -> float:
    """|psi1|^-alpha inside the crossing ball, |psi2|^-alpha outside."""
    at = as_norm(at)
    inside = at.is_zero or at.gamma <= symbol.crossing_radius
    spec = symbol.psi1 if inside else symbol.psi2
    return _power_of_magnitude(eval_abs_psi(spec, at, symbol.dims.p), symbol.alpha).value


def _trial_points(grid: FiniteGrid, rng: np.random.Generator) -> list[GridPoint]:
    count = int(rng.integers(1, MAX_SPOT_POINTS + 1))
    return [grid.point(int(index)) for index in rng.integers(0, grid.size, size=count)]


def _trial_weights(count: int, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=count) + 1j * rng.normal(size=count)


def _witness(trial: int, points: list[GridPoint], value: float) -> SpotCheckWitness:
    return SpotCheckWitness(
        trial=trial,
        points=[[str(x) for x in point.rationals()] for point in points],
        form_value=value,
    )


def negdef_sample_check(
    spec: RadialSpec,
    grid: FiniteGrid,
    trials: int,
    tol: float = DEFAULT_SPOT_TOL,
    seed: int = 0,
) -> SpotCheckReport:
    """Sampled test of sum (psi(x_i) + conj psi(x_j) - psi(x_i - x_j)) l_i conj(l_j) >= 0."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = grid.dims.p
    lowest = math.inf
    witness: SpotCheckWitness | None = None
    skipped = 0
    for trial, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(child)
        points = _trial_points(grid, rng)
        lam = _trial_weights(len(points), rng)
        psi = np.array([eval_psi(spec, x.norm_exponent(), p) for x in points])
        diff = np.array([[eval_psi(spec, (xi - xj).norm_exponent(), p) for xj in points] for xi in points])
        if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(diff))):
            skipped += 1
            continue
        kernel = psi[:, None] + np.conj(psi)[None, :] - diff
        value = float(np.real(lam @ kernel @ np.conj(lam)))
        if value < lowest:
            lowest = value
            witness = _witness(trial, points, value)
    passed = lowest >= -tol
    return SpotCheckReport(
        kind="negative_definite",
        trials=trials,
        skipped=skipped,
        tol=tol,
        min_real_part=lowest if math.isfinite(lowest) else 0.0,
        passed=passed,
        witness=None if passed else witness,
    )


def posdef_sample_check(
    symbol: BesselSymbol,
    grid: FiniteGrid,
    trials: int,
    tol: float = DEFAULT_SPOT_TOL,
    seed: int = 0,
) -> SpotCheckReport:
    """Sampled test of sum S(x_i - x_j) l_i conj(l_j) >= 0."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    lowest = math.inf
    witness: SpotCheckWitness | None = None
    for trial, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(child)
        points = _trial_points(grid, rng)
        lam = _trial_weights(len(points), rng)
        gram = np.array([[symbol_S(symbol, (xi - xj).norm_exponent()) for xj in points] for xi in points])
        value = float(np.real(lam @ gram @ np.conj(lam)))
        if value < lowest:
            lowest = value
            witness = _witness(trial, points, value)
    passed = lowest >= -tol
    return SpotCheckReport(
        kind="positive_definite",
        trials=trials,
        tol=tol,
        min_real_part=lowest,
        passed=passed,
        witness=None if passed else witness,
    )
