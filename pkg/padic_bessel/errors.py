from __future__ import annotations


class BesselError(Exception):
    def __init__(self, *, reason: str, detail: str | None = None) -> None:
        self.reason = reason
        self.detail = detail or reason
        super().__init__(self.detail)


class NumericError(BesselError):
    """Failures of a numerical evaluation; the CLI maps these to exit code 3."""


class BudgetExceeded(NumericError):
    pass


class WindowExceeded(NumericError):
    pass


class HypothesisAViolation(NumericError):
    pass


class Psi1Vanishes(NumericError):
    pass


class TailNotControlled(NumericError):
    pass


class OriginNotDefined(NumericError):
    pass


class TZeroIsDelta(NumericError):
    pass


class PreconditionFailed(NumericError):
    pass


class ParseError(BesselError):
    def __init__(self, *, offset: int, expected: frozenset[str] | set[str] | None = None, detail: str | None = None) -> None:
        self.offset = offset
        self.expected = frozenset(expected or ())
        expected_text = ", ".join(sorted(self.expected)) if self.expected else "(nothing)"
        super().__init__(
            reason="parse_error",
            detail=detail or f"unexpected input at offset {offset}; expected one of: {expected_text}",
        )
