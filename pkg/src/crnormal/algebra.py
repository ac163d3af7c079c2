"""Functional front end to the exact scalar and truncated-series layer.

Everything here is a thin, pure wrapper: the arithmetic lives in
:mod:`crnormal.scalars` and :mod:`crnormal.series`.
"""
from __future__ import annotations

from .scalars import GaussianRational, as_rational, parse_rational
from .series import (
    HoloMonomial,
    HoloSeries,
    Monomial,
    PuSeries,
    Signature,
    invert_parametrization,
    substitute,
)

__all__ = [
    "GaussianRational",
    "Signature",
    "Monomial",
    "HoloMonomial",
    "PuSeries",
    "HoloSeries",
    "as_rational",
    "parse_rational",
    "add",
    "mul",
    "conjugate",
    "bicomponent",
    "real_part",
    "imag_part",
    "substitute",
    "invert_parametrization",
]


def add(a: PuSeries, b: PuSeries) -> PuSeries:
    return a + b


def mul(a: PuSeries, b: PuSeries) -> PuSeries:
    """Product truncated at the common ``max_weight``."""
    return a * b


def conjugate(a: PuSeries) -> PuSeries:
    return a.conjugate()


def bicomponent(a: PuSeries, k: int, m: int, l: int) -> PuSeries:
    """Terms of bidegree ``(k, m)`` in ``(z, zbar)`` carrying ``u**l``."""
    return a.bicomponent(k, m, l)


def real_part(a: PuSeries) -> PuSeries:
    return a.real_part()


def imag_part(a: PuSeries) -> PuSeries:
    return a.imag_part()
