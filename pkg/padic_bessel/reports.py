from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field


class _Report(BaseModel):
    model_config = ConfigDict(extra="forbid")


class HypothesisAReport(_Report):
    holds: bool
    crossing_radius: Optional[int] = None
    window: tuple[int, int]
    reason: Optional[str] = None


class SpotCheckWitness(_Report):
    trial: int
    points: list[list[str]]
    form_value: float


class SpotCheckReport(_Report):
    kind: str = Field(..., description="negative_definite or positive_definite")
    trials: int
    skipped: int = 0
    tol: float
    min_real_part: float
    passed: bool
    witness: Optional[SpotCheckWitness] = None


class PositivityReport(_Report):
    precondition_holds: bool
    precondition_window: tuple[int, int]
    first_increase: Optional[int] = None
    gamma_range: tuple[int, int]
    min_value: float
    argmin_gamma: Optional[int] = None
    tol: float
    passed: bool


class ProbabilityVerdict(_Report):
    mass: float
    is_sub_probability: bool
    is_probability: bool
    positivity: PositivityReport


class GreenBoundCase(_Report):
    gamma: int
    value: float
    lower: float
    upper: float
    lower_margin: float
    upper_margin: float
    passed: bool


class GreenBoundsReport(_Report):
    m: float
    K1: float
    K2: float
    cases: list[GreenBoundCase]
    passed: bool


class HeatCase(_Report):
    gamma: int
    t: float
    value: float
    tail_bound: float
    proof_case: str
    passed: bool


class NonPositivityReport(_Report):
    crossing_radius: int
    cases: list[HeatCase]
    groups: dict[str, int]
    max_value: float
    passed: bool


class ComparisonCase(_Report):
    label: str
    series_value: float
    oracle_value: float
    difference: float
    allowed: float
    margin: float
    passed: bool


class ComparisonReport(_Report):
    cases: list[ComparisonCase] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(case.passed for case in self.cases)

    @property
    def worst_margin(self) -> Optional[float]:
        if not self.cases:
            return None
        return min(case.margin for case in self.cases)


class SuiteCase(_Report):
    suite: str
    case: str
    passed: bool = Field(..., alias="pass")
    margin: Optional[float] = None
    detail: dict[str, Any] = Field(default_factory=dict)

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    def record(self) -> dict[str, Any]:
        return {"suite": self.suite, "case": self.case, "pass": self.passed, "margin": self.margin}


class SemigroupReport(_Report):
    alpha1: float
    alpha2: float
    fourier_residual: float
    physical_residual: float
    physical_allowed: float
    grid_points: int
    passed: bool


class DeltaLimitReport(_Report):
    alphas: list[float]
    deviations: list[float]
    noise: float
    non_increasing: bool
