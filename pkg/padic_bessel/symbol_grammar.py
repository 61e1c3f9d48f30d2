"""Text form of radial symbol specs.

    const:<c>
    power:a=<a>,b=<b>
    tower:j=<j>;terms=<c1>*y^<a1>+<c2>*y^<a2>...
    oneminusjhat:table=<g1>:<v1>,<g2>:<v2>...
    table:<g1>:<v1>,...;default=zero|clamp|<number>

Syntax errors and out-of-range values both surface as ParseError carrying the
byte offset of the offending token.
"""

from __future__ import annotations

import math
from functools import lru_cache
from pathlib import Path

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedToken, VisitError
from lark.lexer import PatternStr

from padic_bessel.errors import ParseError
from padic_bessel.symbol_algebra import (
    ConstantSpec,
    ExpTowerSpec,
    OneMinusJHatSpec,
    PowerSpec,
    RadialSpec,
    TableSpec,
)

GRAMMAR_PATH = Path(__file__).resolve().parent / "grammars" / "symbol_spec.lark"


def read_grammar() -> str:
    return GRAMMAR_PATH.read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def get_parser() -> Lark:
    return Lark(read_grammar(), parser="lalr", lexer="contextual")


def _reject(token: Token, detail: str) -> ParseError:
    return ParseError(offset=token.start_pos, detail=f"{detail} (offset {token.start_pos})")


def _finite(token: Token) -> float:
    value = float(token)
    if not math.isfinite(value):
        raise _reject(token, f"{token} does not fit a finite float")
    return value


class SpecTransformer(Transformer):
    def start(self, items):
        return items[0]

    def const(self, items):
        (c,) = items
        return ConstantSpec(_finite(c))

    def power(self, items):
        a, b = items
        for token in (a, b):
            if not _finite(token) > 0:
                raise _reject(token, f"power coefficient must be positive, got {token}")
        return PowerSpec(float(a), float(b))

    def term(self, items):
        c, power = items
        if int(power) < 1:
            raise _reject(power, f"tower powers must be positive integers, got {power}")
        return (_finite(c), int(power)), c

    def tower(self, items):
        j, *terms = items
        if int(j) < 1:
            raise _reject(j, f"tower height must be >= 1, got {j}")
        if not any(value[0] > 0 for value, _ in terms):
            raise _reject(terms[0][1], "tower needs at least one positive coefficient")
        return ExpTowerSpec(int(j), tuple(value for value, _ in terms))

    def entry(self, items):
        gamma, value = items
        _finite(value)
        return gamma, value

    def entries(self, items):
        seen: set[int] = set()
        for gamma, _ in items:
            if int(gamma) in seen:
                raise _reject(gamma, f"duplicate norm exponent {gamma}")
            seen.add(int(gamma))
        return items

    def rule(self, items):
        (token,) = items
        if token.type in ("ZERO_RULE", "CLAMP_RULE"):
            return str(token)
        return _finite(token)

    def table(self, items):
        entries, default = items
        return TableSpec(tuple((int(g), float(v)) for g, v in entries), default)

    def oneminusjhat(self, items):
        (entries,) = items
        for _, value in entries:
            if not -1.0 <= float(value) <= 1.0:
                raise _reject(value, f"J^ value {value} puts 1 - J^ outside [0, 2]")
        return OneMinusJHatSpec(TableSpec(tuple((int(g), float(v)) for g, v in entries), "clamp"))


def _describe(parser: Lark, names) -> frozenset[str]:
    out = set()
    for name in names:
        if name == "$END":
            out.add("end of input")
            continue
        try:
            pattern = parser.get_terminal(name).pattern
        except KeyError:
            out.add(name)
            continue
        out.add(repr(pattern.value) if isinstance(pattern, PatternStr) else name)
    return frozenset(out)


def parse_symbol_spec(text: str) -> RadialSpec:
    parser = get_parser()
    try:
        tree = parser.parse(text)
    except UnexpectedCharacters as exc:
        raise ParseError(offset=exc.pos_in_stream, expected=_describe(parser, exc.allowed or ())) from None
    except UnexpectedToken as exc:
        token = exc.token
        offset = len(text) if token.type == "$END" or token.start_pos is None else token.start_pos
        raise ParseError(offset=offset, expected=_describe(parser, exc.expected or ())) from None
    except UnexpectedEOF as exc:
        raise ParseError(offset=len(text), expected=_describe(parser, exc.expected or ())) from None
    try:
        return SpecTransformer().transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, ParseError):
            raise exc.orig_exc from None
        raise


def _number(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"cannot print non-finite value {value}")
    return repr(float(value))


def _entries(entries) -> str:
    return ",".join(f"{gamma}:{_number(value)}" for gamma, value in entries)


def format_symbol_spec(spec: RadialSpec) -> str:
    """Canonical text form; parse_symbol_spec(format_symbol_spec(s)) == s."""
    if isinstance(spec, ConstantSpec):
        return f"const:{_number(spec.c)}"
    if isinstance(spec, PowerSpec):
        return f"power:a={_number(spec.a)},b={_number(spec.b)}"
    if isinstance(spec, ExpTowerSpec):
        terms = "+".join(f"{_number(c)}*y^{power}" for c, power in spec.terms)
        return f"tower:j={spec.j};terms={terms}"
    if isinstance(spec, OneMinusJHatSpec):
        return f"oneminusjhat:table={_entries(spec.inner.entries)}"
    if isinstance(spec, TableSpec):
        rule = spec.default if isinstance(spec.default, str) else _number(spec.default)
        return f"table:{_entries(spec.entries)};default={rule}"
    raise TypeError(f"unsupported radial spec {type(spec).__name__}")
