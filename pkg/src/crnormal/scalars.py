"""Exact scalars: rationals (``gmpy2.mpq``) and Gaussian rationals ``a + b i``.

Coefficients are serialized with the grammar ``R``, ``R+Ri`` or ``R-Ri`` where
``R = [-]digits[/digits]``.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _AbstractRational

from gmpy2 import mpq

__all__ = [
    "Rational",
    "GaussianRational",
    "CoefficientSyntaxError",
    "as_rational",
    "parse_rational",
    "format_rational",
    "ZERO",
    "ONE",
    "I",
]

Rational = type(mpq(0))

_Q0 = mpq(0)
_Q1 = mpq(1)


class CoefficientSyntaxError(ValueError):
    """Malformed coefficient string; ``position`` is the 0-based offending column."""

    def __init__(self, text: str, position: int, reason: str):
        self.text = text
        self.position = position
        self.reason = reason
        super().__init__(f"bad coefficient {text!r} at column {position}: {reason}")


def as_rational(x) -> Rational:
    """Convert int, Fraction, mpq or a rational string into an ``mpq``."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, Fraction)):
        return mpq(x)
    if isinstance(x, _AbstractRational):
        return mpq(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _scan_digits(text: str, pos: int) -> int:
    end = pos
    while end < len(text) and text[end].isdigit():
        end += 1
    return end


def _scan_rational(text: str, pos: int, signed: bool) -> tuple[Rational, int]:
    neg = False
    if signed and pos < len(text) and text[pos] == "-":
        neg = True
        pos += 1
    end = _scan_digits(text, pos)
    if end == pos:
        raise CoefficientSyntaxError(text, pos, "expected digits")
    num = int(text[pos:end])
    pos = end
    den = 1
    if pos < len(text) and text[pos] == "/":
        pos += 1
        end = _scan_digits(text, pos)
        if end == pos:
            raise CoefficientSyntaxError(text, pos, "expected denominator digits")
        den = int(text[pos:end])
        if den == 0:
            raise CoefficientSyntaxError(text, pos, "zero denominator")
        pos = end
    value = mpq(num, den)
    return (-value if neg else value), pos


def parse_rational(text: str) -> Rational:
    value, pos = _scan_rational(text, 0, signed=True)
    if pos != len(text):
        raise CoefficientSyntaxError(text, pos, "unexpected character")
    return value


def format_rational(q: Rational) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts. Immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", as_rational(re))
        object.__setattr__(self, "im", as_rational(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def _raw(cls, re: Rational, im: Rational) -> "GaussianRational":
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, tuple):
            return cls(*x)
        if isinstance(x, str):
            return cls.parse(x)
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact; use GaussianRational")
        return cls._raw(as_rational(x), _Q0)

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse ``R``, ``R+Ri`` or ``R-Ri``; raise CoefficientSyntaxError with the column."""
        text = text.strip()
        re, pos = _scan_rational(text, 0, signed=True)
        if pos == len(text):
            return cls._raw(re, _Q0)
        if text[pos] not in "+-":
            raise CoefficientSyntaxError(text, pos, "expected '+', '-' or end of input")
        sign = -1 if text[pos] == "-" else 1
        im, pos = _scan_rational(text, pos + 1, signed=False)
        if pos >= len(text) or text[pos] != "i":
            raise CoefficientSyntaxError(text, pos, "expected 'i'")
        if pos + 1 != len(text):
            raise CoefficientSyntaxError(text, pos + 1, "trailing characters")
        return cls._raw(re, sign * im)

    def pair(self) -> tuple[Rational, Rational]:
        return (self.re, self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im)

    def norm(self) -> Rational:
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __mul__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        d = o.norm()
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational._raw(
            (self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d
        )

    def __rtruediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return (ONE / self) ** (-e)
        result, base = ONE, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        if self.im == 0:
            return format_rational(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"{format_rational(self.re)}{sign}{format_rational(abs(self.im))}i"


def _coerce_or_none(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction, Rational)) and not isinstance(x, bool):
        return GaussianRational._raw(mpq(x), _Q0)
    return None


ZERO = GaussianRational._raw(_Q0, _Q0)
ONE = GaussianRational._raw(_Q1, _Q0)
I = GaussianRational._raw(_Q0, _Q1)
