from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given

from crnormal.scalars import I, ONE, ZERO, CoefficientSyntaxError, GaussianRational, as_rational, parse_rational

from helpers import gaussians


def test_rationals_are_reduced():
    q = as_rational(Fraction(6, 4))
    assert (q.numerator, q.denominator) == (3, 2)
    assert as_rational("-4/6") == mpq(-2, 3)
    z = as_rational(0)
    assert (z.numerator, z.denominator) == (0, 1)


@pytest.mark.parametrize(
    "text, value",
    [
        ("0", ZERO),
        ("1", ONE),
        ("-3/4", GaussianRational(mpq(-3, 4))),
        ("0+1i", I),
        ("1/2-3/5i", GaussianRational(mpq(1, 2), mpq(-3, 5))),
        ("-2+0i", GaussianRational(-2)),
    ],
)
def test_parse(text, value):
    assert GaussianRational.parse(text) == value


@pytest.mark.parametrize("text, pos", [("1//2", 2), ("1/0", 2), ("", 0), ("1+i", 2), ("1+2", 3), ("x", 0), ("2i", 1)])
def test_parse_reports_position(text, pos):
    with pytest.raises(CoefficientSyntaxError) as err:
        GaussianRational.parse(text)
    assert err.value.position == pos


def test_parse_rational_rejects_imaginary():
    with pytest.raises(CoefficientSyntaxError):
        parse_rational("1+1i")


@given(gaussians)
def test_format_parse_round_trip(c):
    assert GaussianRational.parse(str(c)) == c


@given(gaussians, gaussians, gaussians)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    if b:
        assert (a / b) * b == a
    assert (a * a.conjugate()).is_real()


def test_i_squared():
    assert I * I == -ONE
    assert I**4 == ONE
    assert (1 / I) == -I
