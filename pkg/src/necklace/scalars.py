"""Exact Gaussian-rational scalars ``a + b*i`` with ``a, b`` in Q."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

from .errors import ParseError, ZeroDenominator

__all__ = ["ONE", "ZERO", "I", "Scalar", "as_scalar", "parse_scalar"]


class Scalar:
    """An element of Q(i), immutable.

    Both parts are stored as :class:`fractions.Fraction`, which keeps them in
    lowest terms with positive denominators.
    """

    __slots__ = ("im", "re")

    def __init__(self, re=0, im=0):
        if isinstance(re, float) or isinstance(im, float):
            raise TypeError("Scalar refuses floating point input")
        object.__setattr__(self, "re", re if type(re) is Fraction else Fraction(re))
        object.__setattr__(self, "im", im if type(im) is Fraction else Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- lowest-terms fields --------------------------------------------------
    @property
    def real_num(self) -> int:
        return self.re.numerator

    @property
    def real_den(self) -> int:
        return self.re.denominator

    @property
    def imag_num(self) -> int:
        return self.im.numerator

    @property
    def imag_den(self) -> int:
        return self.im.denominator

    # -- predicates ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    # -- arithmetic ------------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(other.re - self.re, other.im - self.im)

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return Scalar(a * c)
        return Scalar(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        a, b = self.re, self.im
        if not b:
            if not a:
                raise ZeroDenominator("division by zero scalar")
            return Scalar(1 / a)
        n = a * a + b * b
        return Scalar(a / n, -b / n)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> Scalar:
        return Scalar(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    # -- comparison / hashing --------------------------------------------
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    # -- conversion ------------------------------------------------------------
    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __float__(self):
        if self.im:
            raise TypeError(f"{self} is not real")
        return float(self.re)

    def to_number(self):
        """Float when real, complex otherwise (for numeric evaluation)."""
        if not self.im:
            return float(self.re)
        return complex(self)

    def __str__(self):
        re_s = f"{self.re.numerator}/{self.re.denominator}"
        if not self.im:
            return re_s
        sign = "-" if self.im < 0 else "+"
        im = abs(self.im)
        return f"{re_s}{sign}{im.numerator}/{im.denominator}*i"

    def __repr__(self):
        return f"Scalar('{self}')"

    def pretty(self) -> str:
        """Short human form, e.g. ``1/2``, ``3``, ``-1/2*i``, ``(1+2*i)``."""

        def q(x: Fraction) -> str:
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        if not self.im:
            return q(self.re)
        if not self.re:
            return "i" if self.im == 1 else ("-i" if self.im == -1 else f"{q(self.im)}*i")
        sign = "-" if self.im < 0 else "+"
        return f"({q(self.re)}{sign}{q(abs(self.im))}*i)"


def _coerce(x):
    if type(x) is Scalar:
        return x
    if isinstance(x, (int, Rational)) and not isinstance(x, bool):
        return Scalar(x)
    if isinstance(x, bool):
        return Scalar(int(x))
    return NotImplemented


def as_scalar(x) -> Scalar:
    """Coerce ints, Fractions, Scalars and exact strings to :class:`Scalar`."""
    if isinstance(x, str):
        return parse_scalar(x)
    s = _coerce(x)
    if s is NotImplemented:
        raise TypeError(f"cannot convert {x!r} to an exact Scalar")
    return s


_RAT = r"[+-]?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^\s*(?:(?P<re>{_RAT})\s*)?(?:(?P<im>[+-]?\s*(?:\d+(?:/\d+)?)?)\s*\*?\s*i)?\s*$"
)


def parse_scalar(text: str) -> Scalar:
    """Parse ``"p/q"``, ``"p/q+r/s*i"``, ``"-i"``, ``"3"`` ...; decimals are rejected."""
    if "." in text or "e" in text.lower():
        raise ParseError(f"decimal input {text!r} rejected; use an exact fraction like '1/2'")
    m = _SCALAR_RE.match(text)
    if not m or (m.group("re") is None and m.group("im") is None):
        raise ParseError(f"cannot parse scalar {text!r}")
    try:
        re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
        im_text = m.group("im")
        if im_text is None:
            im_part = Fraction(0)
        else:
            im_text = im_text.replace(" ", "")
            if im_text in ("", "+"):
                im_part = Fraction(1)
            elif im_text == "-":
                im_part = Fraction(-1)
            else:
                im_part = Fraction(im_text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot parse scalar {text!r}: {exc}") from None
    return Scalar(re_part, im_part)


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)
