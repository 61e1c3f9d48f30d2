from __future__ import annotations

import logging
from collections.abc import Iterator
from typing import Any

from padic_bessel.config import RunConfig
from padic_bessel.green_function import GreenParams, green_G
from padic_bessel.heat_kernel import HeatQuery, heat_Z
from padic_bessel.padic_core import SeriesValue
from padic_bessel.radial_transform import kernel_K
from padic_bessel.runtime import BASE_COLUMNS, csv_row, json_line, open_output, write_csv
from padic_bessel.symbol_algebra import BesselSymbol

logger = logging.getLogger(__name__)

KINDS = ("kernel", "green", "heat")

Row = tuple[int, SeriesValue, dict[str, float]]


def extra_columns(kind: str) -> tuple[str, ...]:
    if kind == "heat":
        return ("t",)
    if kind == "green":
        return ("m",)
    return ()


def evaluate_rows(kind: str, symbol: BesselSymbol, config: RunConfig) -> Iterator[Row]:
    """(gamma, series, extras) in output order: outer loop over t or m, inner over gamma."""
    lo, hi = config.gamma
    gammas = range(lo, hi + 1)
    if kind == "kernel":
        for gamma in gammas:
            yield gamma, kernel_K(symbol, gamma, config.tol), {}
    elif kind == "green":
        for m in config.m:
            params = GreenParams(symbol, m)
            for gamma in gammas:
                yield gamma, green_G(params, gamma, config.tol), {"m": m}
    elif kind == "heat":
        for t in config.t:
            query = HeatQuery(symbol, t)
            for gamma in gammas:
                yield gamma, heat_Z(query, gamma, config.tol), {"t": t}
    else:
        raise ValueError(f"unknown kind {kind!r}")


def row_record(gamma: int, p: int, series: SeriesValue, extras: dict[str, Any]) -> dict[str, Any]:
    return {
        "gamma": gamma,
        "norm": float(p) ** gamma,
        "value": series.value,
        "tail_bound": series.tail_bound,
        "terms_used": series.terms_used,
        "underflow": series.underflow,
        **extras,
    }


def run(args: Any) -> int:
    config: RunConfig = args.config
    kind = args.kind
    symbol = config.build_symbol()
    columns = extra_columns(kind)
    p = symbol.dims.p
    rows = evaluate_rows(kind, symbol, config)

    with open_output(config.out) as stream:
        if config.output_format == "json":
            count = 0
            for gamma, series, extras in rows:
                stream.write(json_line(row_record(gamma, p, series, extras)) + "\n")
                count += 1
        else:
            count = write_csv(
                stream,
                BASE_COLUMNS + columns,
                (csv_row(gamma, p, series, [extras[name] for name in columns]) for gamma, series, extras in rows),
            )
    logger.info("%s: wrote %d rows", kind, count)
    return 0
