from __future__ import annotations

import contextlib
import csv
import json
import logging
import sys
from collections.abc import Iterable, Iterator, Sequence
from pathlib import Path
from typing import Any, TextIO

from padic_bessel.padic_core import SeriesValue

LOG_PREFIX = "[bessel]"
BASE_COLUMNS = ("gamma", "norm", "value", "tail_bound", "terms_used")


def configure_logging(verbose: bool = False) -> None:
    """Human log lines go to stderr so stdout stays machine readable."""
    root = logging.getLogger("padic_bessel")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(f"{LOG_PREFIX} %(levelname)s %(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)
    root.propagate = False


def say(message: str) -> None:
    print(f"{LOG_PREFIX} {message}", file=sys.stderr)


def json_line(data: Any) -> str:
    return json.dumps(data, sort_keys=True)


@contextlib.contextmanager
def open_output(path: Path | None) -> Iterator[TextIO]:
    """stdout, or a file under path with parents created."""
    if path is None:
        yield sys.stdout
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        yield handle


def format_float(value: float) -> str:
    return format(value, ".17g")


def csv_row(
    gamma: int,
    p: int,
    series: SeriesValue,
    extra: Sequence[Any] = (),
) -> list[str]:
    norm = float(p) ** gamma
    cells = [str(gamma), format_float(norm), format_float(series.value), format_float(series.tail_bound), str(series.terms_used)]
    for item in extra:
        cells.append(format_float(item) if isinstance(item, float) else str(item))
    return cells


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[str]]) -> int:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow(row)
        count += 1
    return count
