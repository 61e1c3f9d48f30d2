from __future__ import annotations

from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from padic_bessel.padic_core import POINT_BUDGET, PrimeDim, is_prime
from padic_bessel.radial_transform import DEFAULT_TOL
from padic_bessel.symbol_algebra import DEFAULT_SPOT_TOL, DEFAULT_WINDOW, BesselSymbol
from padic_bessel.symbol_grammar import parse_symbol_spec


DEFAULT_GAMMA = (-6, 6)
DEFAULT_PSI1 = "const:1"
DEFAULT_PSI2 = "power:a=1,b=2"
DEFAULT_TRIALS = 200


def parse_gamma_range(text: str) -> tuple[int, int]:
    """Inclusive 'lo..hi' range; a bare integer means a single gamma."""
    text = text.strip()
    if ".." not in text:
        value = int(text)
        return value, value
    lo_text, hi_text = text.split("..", 1)
    lo, hi = int(lo_text), int(hi_text)
    if lo > hi:
        raise ValueError(f"empty gamma range {text!r}")
    return lo, hi


def parse_float_list(text: str) -> list[float]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError("expected a comma-separated list of numbers")
    return [float(item) for item in items]


class RunConfig(BaseModel):
    """Validated CLI settings for one invocation."""

    model_config = ConfigDict(extra="forbid")

    command: str
    p: int = 2
    n: int = 1
    psi1: str = DEFAULT_PSI1
    psi2: str = DEFAULT_PSI2
    alpha: float = 1.0
    alphas: Optional[list[float]] = None
    m: list[float] = Field(default_factory=lambda: [1.0])
    t: list[float] = Field(default_factory=lambda: [1.0])
    gamma: tuple[int, int] = DEFAULT_GAMMA
    window: tuple[int, int] = DEFAULT_WINDOW
    tol: float = DEFAULT_TOL
    spot_tol: float = DEFAULT_SPOT_TOL
    M: int = 4
    N: int = 4
    budget: int = POINT_BUDGET
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    output_format: Literal["csv", "json"] = "csv"
    out: Optional[Path] = None
    strict_monotone: bool = False

    @field_validator("p")
    @classmethod
    def _prime(cls, value: int) -> int:
        if not is_prime(value):
            raise ValueError(f"p must be prime, got {value}")
        return value

    @field_validator("n", "trials", "budget")
    @classmethod
    def _positive_int(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be >= 1")
        return value

    @field_validator("M", "N")
    @classmethod
    def _grid_exponent(cls, value: int) -> int:
        if value < 0:
            raise ValueError("grid exponents must be >= 0")
        return value

    @field_validator("alpha", "tol", "spot_tol")
    @classmethod
    def _positive_float(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("must be > 0")
        return value

    @field_validator("alphas", mode="before")
    @classmethod
    def _alpha_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = parse_float_list(value)
        if value is not None and any(not item > 0 for item in value):
            raise ValueError("every alpha must be > 0")
        return value

    @field_validator("m", mode="before")
    @classmethod
    def _m_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = parse_float_list(value)
        if isinstance(value, (int, float)):
            value = [value]
        if any(not item > 0 for item in value):
            raise ValueError("m must be > 0")
        return value

    @field_validator("t", mode="before")
    @classmethod
    def _t_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = parse_float_list(value)
        if isinstance(value, (int, float)):
            value = [value]
        if any(not item >= 0 for item in value):
            raise ValueError("t must be >= 0")
        return value

    @field_validator("gamma", "window", mode="before")
    @classmethod
    def _range(cls, value: Any) -> Any:
        if isinstance(value, str):
            return parse_gamma_range(value)
        return value

    @model_validator(mode="after")
    def _ordered(self) -> RunConfig:
        for name in ("gamma", "window"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} range {lo}..{hi} is empty")
        return self

    @property
    def dims(self) -> PrimeDim:
        return PrimeDim(self.p, self.n)

    def build_symbol(self, alpha: float | None = None) -> BesselSymbol:
        """Parse psi1/psi2 (ParseError) and validate Hypothesis A (NumericError)."""
        return BesselSymbol.build(
            parse_symbol_spec(self.psi1),
            parse_symbol_spec(self.psi2),
            self.alpha if alpha is None else alpha,
            self.dims,
            self.window,
        )
