from __future__ import annotations

import logging
from collections.abc import Iterator
from typing import Any

from padic_bessel.commands.evaluate import KINDS, evaluate_rows, row_record
from padic_bessel.config import RunConfig
from padic_bessel.runtime import BASE_COLUMNS, csv_row, json_line, open_output, write_csv

logger = logging.getLogger(__name__)

TABLE_COLUMNS = BASE_COLUMNS + ("t", "m", "alpha", "kind")


def parse_kinds(text: str) -> list[str]:
    kinds = [item.strip() for item in text.split(",") if item.strip()]
    unknown = [kind for kind in kinds if kind not in KINDS]
    if not kinds or unknown:
        raise ValueError(f"kinds must be a comma-separated subset of {','.join(KINDS)}")
    return kinds


def table_rows(config: RunConfig, kinds: list[str]) -> Iterator[tuple[int, Any, dict[str, Any]]]:
    """Rows over alpha x kind x (t or m) x gamma, in that nesting order."""
    base = config.build_symbol()
    for alpha in config.alphas or [config.alpha]:
        symbol = base.with_alpha(alpha)
        for kind in kinds:
            for gamma, series, extras in evaluate_rows(kind, symbol, config):
                yield gamma, series, {**extras, "alpha": alpha, "kind": kind}


def run(args: Any) -> int:
    config: RunConfig = args.config
    kinds = args.kinds
    p = config.p
    rows = table_rows(config, kinds)

    with open_output(config.out) as stream:
        if config.output_format == "json":
            count = 0
            for gamma, series, extras in rows:
                stream.write(json_line(row_record(gamma, p, series, extras)) + "\n")
                count += 1
        else:
            count = write_csv(
                stream,
                TABLE_COLUMNS,
                (
                    csv_row(gamma, p, series, [extras.get("t", ""), extras.get("m", ""), extras["alpha"], extras["kind"]])
                    for gamma, series, extras in rows
                ),
            )
    logger.info("tabulate: wrote %d rows", count)
    return 0
