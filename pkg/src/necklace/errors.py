"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class NecklaceError(Exception):
    """Base class for every error raised by this package."""


class ZeroDenominator(NecklaceError, ZeroDivisionError):
    pass


class BothZero(NecklaceError, ValueError):
    pass


class NotExactDivision(NecklaceError, ArithmeticError):
    pass


class ParseError(NecklaceError, ValueError):
    pass


class ChartMismatch(NecklaceError, ValueError):
    pass


class WrongChart(ChartMismatch):
    pass


class NotInvertible(NecklaceError, ValueError):
    pass


class SamplePointOutsideDomain(NecklaceError, ValueError):
    pass


class DegenerateJacobian(NecklaceError, ValueError):
    pass


class NotPoisson(NecklaceError, ValueError):
    pass


class ZeroDensity(NecklaceError, ValueError):
    pass


class UnknownChart(NecklaceError, KeyError):
    pass


class DegenerateFamily(NecklaceError, ValueError):
    pass


class OutOfRange(NecklaceError, ValueError):
    pass


class CapTooSmall(NecklaceError, ValueError):
    pass


class SingularOnLoop(NecklaceError, ValueError):
    pass


class Underdetermined(NecklaceError, ValueError):
    def __init__(self, message: str, resolving: list[str] | None = None):
        super().__init__(message)
        self.resolving = resolving or []


class Inconsistent(NecklaceError, ValueError):
    pass
