from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Callable
from typing import Any

from pydantic import ValidationError

from padic_bessel import __version__
from padic_bessel.commands import evaluate, inspect_symbol, tabulate, verify
from padic_bessel.config import DEFAULT_PSI1, DEFAULT_PSI2, RunConfig
from padic_bessel.errors import NumericError, ParseError
from padic_bessel.registry import RegistryData, load_registry, registry_as_json
from padic_bessel.runtime import configure_logging, say

CommandHandler = Callable[[argparse.Namespace], int]

EXIT_USAGE = 2
EXIT_NUMERIC = 3

RANGE_FLAGS = ("--gamma", "--window")

# argparse dest -> RunConfig field
CONFIG_FLAGS = {
    "p": "p",
    "n": "n",
    "psi1": "psi1",
    "psi2": "psi2",
    "alpha": "alpha",
    "alphas": "alphas",
    "m": "m",
    "t": "t",
    "gamma": "gamma",
    "window": "window",
    "tol": "tol",
    "spot_tol": "spot_tol",
    "grid_M": "M",
    "grid_N": "N",
    "budget": "budget",
    "trials": "trials",
    "seed": "seed",
    "out": "out",
    "strict_monotone": "strict_monotone",
}


def _add_symbol_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=int, default=None, help="Prime p (default: 2)")
    parser.add_argument("--n", type=int, default=None, help="Dimension n of Q_p^n (default: 1)")
    parser.add_argument("--psi1", default=None, help=f"Symbol spec for psi1 (default: {DEFAULT_PSI1})")
    parser.add_argument("--psi2", default=None, help=f"Symbol spec for psi2 (default: {DEFAULT_PSI2})")
    parser.add_argument("--alpha", type=float, default=None, help="Bessel exponent alpha > 0 (default: 1)")
    parser.add_argument(
        "--window",
        default=None,
        help="Inclusive 'lo..hi' norm-exponent window where Hypothesis A is checked (default: -64..64)",
    )


def _add_range_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--gamma", default=None, help="Inclusive 'lo..hi' range of norm exponents (default: -6..6)")
    parser.add_argument("--m", default=None, help="Comma-separated masses m > 0 (default: 1)")
    parser.add_argument("--t", default=None, help="Comma-separated times t >= 0 (default: 1)")
    parser.add_argument("--tol", type=float, default=None, help="Series truncation tolerance (default: 1e-12)")


def _add_grid_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--M", dest="grid_M", type=int, default=None, help="Grid covers p^-M Z_p^n (default: 4)")
    parser.add_argument("--N", dest="grid_N", type=int, default=None, help="Grid resolves p^N Z_p^n (default: 4)")
    parser.add_argument("--budget", type=int, default=None, help="Maximum grid points (default: 10^7)")
    parser.add_argument("--seed", type=int, default=None, help="Master seed for every random draw (default: 0)")


def _add_output_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json", action="store_true", help="Emit JSON instead of CSV or human text.")
    parser.add_argument("--out", default=None, help="Write output to this path instead of stdout.")
    parser.add_argument("--verbose", action="store_true", help="Log truncation decisions to stderr.")


def _build_parser(registry: RegistryData) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m bessel",
        description="p-adic generalized Bessel potentials: evaluate, tabulate and certify kernels",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    list_parser = subparsers.add_parser("list", help="List verify suites from suites.json")
    list_parser.add_argument("--json", action="store_true", help="Print the suite registry as JSON")
    list_parser.add_argument("--verbose", action="store_true", help=argparse.SUPPRESS)

    eval_parser = subparsers.add_parser("eval", help="CSV rows of K, G or Z over a gamma range")
    eval_parser.add_argument("kind", choices=evaluate.KINDS)
    _add_symbol_args(eval_parser)
    _add_range_args(eval_parser)
    _add_output_args(eval_parser)

    verify_parser = subparsers.add_parser(
        "verify",
        help="Run a certification suite",
        epilog="\n".join(f"{suite.id}: {suite.statement}" for suite in registry.suites),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    verify_parser.add_argument("suite", choices=[*registry.suite_ids, "all"])
    _add_symbol_args(verify_parser)
    _add_range_args(verify_parser)
    _add_grid_args(verify_parser)
    verify_parser.add_argument("--alphas", default=None, help="Comma-separated decreasing alphas for delta-limit")
    verify_parser.add_argument(
        "--strict-monotone",
        action="store_true",
        help="Require |psi1|, |psi2| strictly increasing for heat-nonpositive.",
    )
    _add_output_args(verify_parser)

    tabulate_parser = subparsers.add_parser("tabulate", help="Bulk CSV over alpha x kind x (t | m) x gamma")
    _add_symbol_args(tabulate_parser)
    _add_range_args(tabulate_parser)
    tabulate_parser.add_argument("--alphas", default=None, help="Comma-separated alphas (default: --alpha)")
    tabulate_parser.add_argument(
        "--kinds",
        default=",".join(evaluate.KINDS),
        help="Comma-separated subset of kernel,green,heat",
    )
    _add_output_args(tabulate_parser)

    inspect_parser = subparsers.add_parser("inspect", help="Report on a symbol")
    inspect_parser.add_argument("target", choices=["symbol"])
    _add_symbol_args(inspect_parser)
    _add_grid_args(inspect_parser)
    inspect_parser.add_argument("--trials", type=int, default=None, help="Spot-check trials (default: 200)")
    inspect_parser.add_argument("--spot-tol", type=float, default=None, help="Spot-check tolerance (default: 1e-9)")
    _add_output_args(inspect_parser)

    return parser


def _build_handlers() -> dict[str, CommandHandler]:
    return {
        "eval": evaluate.run,
        "verify": verify.run,
        "tabulate": tabulate.run,
        "inspect": inspect_symbol.run,
    }


def build_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = {"command": args.command}
    for dest, field in CONFIG_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None and value is not False:
            values[field] = value
    if getattr(args, "json", False):
        values["output_format"] = "json"
    return RunConfig(**values)


def join_range_values(argv: list[str]) -> list[str]:
    """Glue "--gamma -3..3" into "--gamma=-3..3"; argparse reads a leading "-3" as a flag."""
    joined: list[str] = []
    index = 0
    while index < len(argv):
        token = argv[index]
        if token in RANGE_FLAGS and index + 1 < len(argv):
            joined.append(f"{token}={argv[index + 1]}")
            index += 2
            continue
        joined.append(token)
        index += 1
    return joined


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        where = ".".join(str(item) for item in error.get("loc", ())) or "config"
        parts.append(f"{where}: {error.get('msg')}")
    return "; ".join(parts)


def main(argv: list[str] | None = None) -> int:
    registry = load_registry()
    parser = _build_parser(registry)
    args = parser.parse_args(join_range_values(sys.argv[1:] if argv is None else argv))
    configure_logging(getattr(args, "verbose", False))

    if args.command == "list":
        if args.json:
            print(json.dumps(registry_as_json(registry), indent=2, sort_keys=True))
        else:
            for suite in registry.suites:
                print(f"{suite.id}: {suite.statement}")
        return 0

    if args.command == "tabulate":
        try:
            args.kinds = tabulate.parse_kinds(args.kinds)
        except ValueError as exc:
            parser.error(str(exc))

    handler = _build_handlers().get(args.command)
    if handler is None:
        parser.error(f"No handler wired for command '{args.command}'")

    try:
        args.config = build_config(args)
    except ValidationError as exc:
        say(f"invalid arguments: {_validation_message(exc)}")
        return EXIT_USAGE
    args.registry = registry

    try:
        return handler(args)
    except ParseError as exc:
        say(f"ParseError at offset {exc.offset}: {exc.detail}")
        return EXIT_USAGE
    except NumericError as exc:
        say(f"{type(exc).__name__} ({exc.reason}): {exc.detail}")
        return EXIT_NUMERIC
    except ValueError as exc:
        say(f"invalid input: {exc}")
        return EXIT_USAGE
