from __future__ import annotations

import json
import math
from typing import Any

from padic_bessel.config import RunConfig
from padic_bessel.padic_core import ZERO, FiniteGrid
from padic_bessel.radial_transform import first_increase, kernel_mass, symbol_integrable
from padic_bessel.symbol_algebra import (
    BesselSymbol,
    hypothesis_a_report,
    negdef_sample_check,
    posdef_sample_check,
    symbol_S,
)
from padic_bessel.symbol_grammar import format_symbol_spec, parse_symbol_spec


def _symbol_facts(symbol: BesselSymbol, config: RunConfig) -> dict[str, Any]:
    grid = FiniteGrid(symbol.dims, config.M, config.N)
    limit = symbol_S(symbol, ZERO)
    return {
        "S_at_origin": limit,
        "kernel_mass": kernel_mass(symbol) if math.isfinite(limit) else None,
        "integrable": symbol_integrable(symbol),
        "first_increase": first_increase(symbol),
        "posdef": posdef_sample_check(symbol, grid, config.trials, config.spot_tol, config.seed).model_dump(),
    }


def inspect_payload(config: RunConfig) -> dict[str, Any]:
    psi1 = parse_symbol_spec(config.psi1)
    psi2 = parse_symbol_spec(config.psi2)
    dims = config.dims
    grid = FiniteGrid(dims, config.M, config.N)
    report = hypothesis_a_report(psi1, psi2, dims, config.window)
    payload: dict[str, Any] = {
        "p": dims.p,
        "n": dims.n,
        "alpha": config.alpha,
        "psi1": format_symbol_spec(psi1),
        "psi2": format_symbol_spec(psi2),
        "hypothesis_a": report.model_dump(),
        "negdef": {
            "psi1": negdef_sample_check(psi1, grid, config.trials, config.spot_tol, config.seed).model_dump(),
            "psi2": negdef_sample_check(psi2, grid, config.trials, config.spot_tol, config.seed).model_dump(),
        },
    }
    if report.holds:
        symbol = BesselSymbol(psi1, psi2, config.alpha, dims, report.crossing_radius, config.window)
        payload["symbol"] = _symbol_facts(symbol, config)
    return payload


def _print_human(payload: dict[str, Any]) -> None:
    hypothesis = payload["hypothesis_a"]
    print(f"psi1 = {payload['psi1']}, psi2 = {payload['psi2']}, alpha = {payload['alpha']}, p = {payload['p']}, n = {payload['n']}")
    if hypothesis["holds"]:
        print(f"Hypothesis A holds on window {tuple(hypothesis['window'])}: crossing radius r = {hypothesis['crossing_radius']}")
    else:
        print(f"Hypothesis A fails on window {tuple(hypothesis['window'])}: {hypothesis['reason']}")
    for label, check in payload["negdef"].items():
        verdict = "pass" if check["passed"] else "FAIL"
        print(f"{label} negative definite (sampled, {check['trials']} trials): {verdict}, min form {check['min_real_part']:.6g}")
    facts = payload.get("symbol")
    if facts is None:
        return
    print(f"S(0) = {facts['S_at_origin']:.17g}, kernel mass = {facts['kernel_mass']}")
    print(f"S integrable: {facts['integrable']}")
    increase = facts["first_increase"]
    print("S non-increasing on the window" if increase is None else f"S increases at gamma = {increase}")
    posdef = facts["posdef"]
    verdict = "pass" if posdef["passed"] else "FAIL"
    print(f"S positive definite (sampled, {posdef['trials']} trials): {verdict}, min form {posdef['min_real_part']:.6g}")


def run(args: Any) -> int:
    config: RunConfig = args.config
    payload = inspect_payload(config)
    if config.output_format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        _print_human(payload)
    return 0 if payload["hypothesis_a"]["holds"] else 1
