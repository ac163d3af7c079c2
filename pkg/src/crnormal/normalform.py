"""Normalization conditions ``tr^t phi_{kml} = 0``, organized by lines.

The line ``(k, l)`` is the set of multidegrees ``(k+mu, mu, l-mu)``, ``0 <= mu <= l``;
all of them have weight ``k + 2l`` and are coupled to the map unknowns
``g_{kl}``, ``f_{k+1,l-1}`` (plus ``f_{0l}`` when ``k = 1``, ``Re/Im g_{0l}`` and
``f_{1,l-1}`` when ``k = 0``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Mapping

from gmpy2 import mpq

from .errors import ValidationError
from .scalars import GaussianRational, ZERO
from .series import PuSeries
from .trace import trace_power

__all__ = [
    "Condition",
    "LineChoice",
    "NormalFormSpec",
    "Violation",
    "PRESETS",
    "line_kind",
    "validate_choice",
    "choice_determinant",
    "coefficient_determinant",
    "preset",
    "preset_choice",
    "custom_spec",
    "lines_of_weight",
    "conditions_up_to",
    "check",
]

PRESETS = ("chern_moser", "nf1", "nf2", "nf12", "min_l", "mixed")


@dataclass(frozen=True, order=True)
class Condition:
    """``tr^t phi_{kml} = 0``."""

    k: int
    m: int
    l: int
    t: int = 0

    @property
    def weight(self) -> int:
        return self.k + self.m + 2 * self.l

    def __str__(self):
        tr = "" if self.t == 0 else ("tr " if self.t == 1 else f"tr^{self.t} ")
        return f"{tr}phi_{{{self.k},{self.m},{self.l}}} = 0"


def line_kind(k: int) -> str:
    return "k>=2" if k >= 2 else ("k=1" if k == 1 else "k=0")


def _fixed_indices(k: int, l: int):
    """Index tuples of the lines whose conditions are not a matter of choice."""
    if k >= 2 and l == 0:
        return ()
    if k == 1 and l <= 1:
        return ()
    if k == 0 and l <= 2:
        return ()
    return None


@dataclass(frozen=True)
class LineChoice:
    """Chosen indices on line ``(k, l)``.

    ``indices`` is ``(m, m')`` for ``k >= 2``, ``(m, m', m'')`` for ``k = 1``
    and ``(m, m', mt, mt')`` for ``k = 0`` (even pair then odd pair).  Lines with
    fixed conditions carry ``indices = ()``.
    """

    k: int
    l: int
    indices: tuple = ()

    @property
    def kind(self) -> str:
        return line_kind(self.k)

    @property
    def weight(self) -> int:
        return self.k + 2 * self.l

    @property
    def is_fixed(self) -> bool:
        return _fixed_indices(self.k, self.l) is not None

    def conditions(self) -> list[Condition]:
        k, l = self.k, self.l
        if k >= 2:
            if l == 0:
                return [Condition(k, 0, 0, 0)]
            m, mp = self.indices
            return [Condition(k + m, m, l - m, m - 1), Condition(k + mp, mp, l - mp, mp)]
        if k == 1:
            if l == 0:
                return []
            if l == 1:
                return [Condition(1, 0, 1, 0), Condition(2, 1, 0, 0)]
            m, mp, mpp = self.indices
            return [
                Condition(m + 1, m, l - m, m - 1),
                Condition(mp + 1, mp, l - mp, mp),
                Condition(mpp + 1, mpp, l - mpp, mpp),
            ]
        if l <= 1:
            return []
        if l == 2:
            return [Condition(0, 0, 2, 0), Condition(1, 1, 1, 0), Condition(2, 2, 0, 1)]
        m, mp, mt, mtp = self.indices
        return [
            Condition(m, m, l - m, m - 1),
            Condition(mp, mp, l - mp, mp),
            Condition(mt, mt, l - mt, mt - 1),
            Condition(mtp, mtp, l - mtp, mtp),
        ]


def _shape_ok(c: LineChoice) -> bool:
    if not isinstance(c.k, int) or not isinstance(c.l, int) or c.k < 0 or c.l < 0:
        return False
    fixed = _fixed_indices(c.k, c.l)
    if fixed is not None:
        return tuple(c.indices) == fixed
    size = {"k>=2": 2, "k=1": 3, "k=0": 4}[c.kind]
    if len(c.indices) != size or not all(isinstance(i, int) for i in c.indices):
        return False
    return all(0 <= i <= c.l for i in c.indices) and c.indices[0] >= 1


def validate_choice(c: LineChoice) -> bool:
    """Combinatorial admissibility of the chosen indices."""
    if not _shape_ok(c):
        return False
    if c.is_fixed:
        return True
    idx = c.indices
    if c.kind == "k>=2":
        m, mp = idx
        return mp != m
    if c.kind == "k=1":
        if len(set(idx)) != 3:
            return False
        parities = {i % 2 for i in idx if i != 0}
        return len(parities) == 2
    m, mp, mt, mtp = idx
    return m != mp and mt != mtp and m % 2 == 0 and mp % 2 == 0 and mt % 2 == 1 and mtp % 2 == 1


def _b(a: int, b: int) -> int:
    return comb(a, b) if 0 <= b <= a else 0


def _det2(a, b, c, d):
    return a * d - b * c


def choice_determinant(c: LineChoice) -> mpq:
    """Determinant whose nonvanishing makes the line system uniquely solvable.

    ``k >= 2``: ``|C(l,m) -C(l-1,m-1); C(l,m') -C(l-1,m'-1)|``.
    ``k = 1``: ``|1 m (-1)^m m|`` over the three chosen indices.
    ``k = 0``: product of the even-pair and odd-pair determinants, with ``-2C(l-1,m-1)``
    in the second column; a row of the wrong parity is zero in its block.  Fixed lines report the determinant of their pinned system.
    """
    if not _shape_ok(c):
        raise ValidationError(f"choice {c} has invalid shape")
    k, l = c.k, c.l
    if c.is_fixed:
        if k >= 2:
            return mpq(1)
        if k == 1:
            return mpq(0) if l == 0 else mpq(_det2(_b(1, 1), -_b(0, 0), _b(1, 0), -_b(0, -1)))
        if l <= 1:
            return mpq(0)
        even = _det2(_b(2, 2), -2 * _b(1, 1), _b(2, 0), -2 * _b(1, -1))
        return mpq(even * (-2 * _b(1, 0)))
    if c.kind == "k>=2":
        m, mp = c.indices
        return mpq(_det2(_b(l, m), -_b(l - 1, m - 1), _b(l, mp), -_b(l - 1, mp - 1)))
    if c.kind == "k=1":
        rows = [(1, m, (-1) ** m * m) for m in c.indices]
        return mpq(_det3(rows))
    m, mp, mt, mtp = c.indices
    return mpq(_k0_block(l, m, mp, 0) * _k0_block(l, mt, mtp, 1))


def _k0_block(l: int, m: int, mp: int, parity: int) -> int:
    """2x2 determinant of rows ``m, m'`` on the unknowns of one parity class.

    A row whose index has the other parity does not involve these unknowns.
    """

    def row(mu):
        if mu % 2 != parity:
            return 0, 0
        return _b(l, mu), -2 * _b(l - 1, mu - 1)

    (a, b), (c, d) = row(m), row(mp)
    return _det2(a, b, c, d)


def _det3(r):
    (a, b, c), (d, e, f), (g, h, i) = r
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def coefficient_determinant(c: LineChoice) -> GaussianRational:
    """The unreduced 3x3 determinant of a ``k = 1`` line, built from the complex
    coefficients ``C(l,mu) i^mu / 2i``, ``-C(l-1,mu-1) i^(mu-1)``, ``-C(l-1,mu-1) (-i)^mu``."""
    if c.kind != "k=1" or c.is_fixed or not _shape_ok(c):
        raise ValidationError("coefficient_determinant applies to k=1 lines with l >= 2")
    l = c.l
    i = GaussianRational(0, 1)
    rows = []
    for mu in c.indices:
        rows.append(
            (
                (i**mu) * _b(l, mu) / GaussianRational(0, 2),
                -(i ** (mu - 1)) * _b(l - 1, mu - 1) if mu >= 1 else ZERO,
                -((-i) ** mu) * _b(l - 1, mu - 1),
            )
        )
    return _det3(rows)


# ---------------------------------------------------------------------------
# presets


def _canonical_preset(tag: str) -> str:
    name = str(tag).strip().lower().replace("-", "_")
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {tag!r}; expected one of {', '.join(PRESETS)}")
    return name


def preset_choice(tag: str, k: int, l: int) -> LineChoice:
    """The choice a preset makes on line ``(k, l)``."""
    tag = _canonical_preset(tag)
    if _fixed_indices(k, l) is not None:
        return LineChoice(k, l, ())
    if k >= 2:
        idx = {"min_l": (l, l - 1), "mixed": (l, 0)}.get(tag, (1, 0))
    elif k == 1:
        idx = {
            "chern_moser": (1, 0, 2),
            "nf1": (1, 0, 2),
            "nf2": (2, 0, 1),
            "nf12": (2, 0, 1),
            "min_l": (l, l - 1, l - 2),
            "mixed": (l, 0, l - 1),
        }[tag]
    else:
        if tag in ("chern_moser", "nf2"):
            idx = (2, 0, 1, 3)
        elif tag in ("nf1", "nf12"):
            idx = (2, 0, 3, 1)
        elif tag == "min_l":
            idx = (l, l - 2, l - 1, l - 3) if l % 2 == 0 else (l - 1, l - 3, l, l - 2)
        else:
            idx = (l, 0, l - 1, 1) if l % 2 == 0 else (l - 1, 0, l, 1)
    return LineChoice(k, l, idx)


def lines_of_weight(w: int) -> list[tuple[int, int]]:
    """Lines ``(k, l)`` with ``k + 2l = w``, in lexicographic order."""
    return sorted((w - 2 * l, l) for l in range(w // 2 + 1))


@dataclass(frozen=True)
class NormalFormSpec:
    """A table of line choices covering every line of weight ``<= max_weight``."""

    max_weight: int
    choices: Mapping[tuple[int, int], LineChoice] = field(hash=False, compare=True)
    preset: str | None = None

    def __post_init__(self):
        if not isinstance(self.max_weight, int) or self.max_weight < 2:
            raise ValidationError("spec max_weight must be an integer >= 2")
        choices = dict(self.choices)
        for w in range(self.max_weight + 1):
            for k, l in lines_of_weight(w):
                c = choices.get((k, l))
                if c is None:
                    raise ValidationError(f"spec has no choice for line (k={k}, l={l})")
                if (c.k, c.l) != (k, l):
                    raise ValidationError(f"choice {c} filed under line ({k}, {l})")
                if not validate_choice(c):
                    raise ValidationError(f"inadmissible choice on line (k={k}, l={l}): indices {c.indices}")
        object.__setattr__(self, "choices", choices)

    def choice(self, k: int, l: int) -> LineChoice:
        try:
            return self.choices[(k, l)]
        except KeyError:
            raise ValidationError(f"spec does not cover line (k={k}, l={l})") from None

    def lines(self, weight: int) -> list[LineChoice]:
        return [self.choice(k, l) for k, l in lines_of_weight(weight)]

    def extended(self, max_weight: int) -> "NormalFormSpec":
        if max_weight <= self.max_weight:
            return self
        if self.preset is None:
            raise ValidationError(
                f"custom spec covers weights <= {self.max_weight}, jet needs {max_weight}"
            )
        return preset(self.preset, max_weight)

    def __hash__(self):
        return hash((self.max_weight, tuple(sorted(self.choices.items()))))


def preset(tag: str, max_weight: int) -> NormalFormSpec:
    tag = _canonical_preset(tag)
    choices = {}
    for w in range(max_weight + 1):
        for k, l in lines_of_weight(w):
            choices[(k, l)] = preset_choice(tag, k, l)
    return NormalFormSpec(max_weight, choices, tag)


def custom_spec(choices: Iterable[LineChoice], max_weight: int, base: str | None = None) -> NormalFormSpec:
    """A table from explicit choices; missing lines come from ``base`` if given."""
    table = {}
    if base is not None:
        table.update(preset(base, max_weight).choices)
    for c in choices:
        table[(c.k, c.l)] = c
    return NormalFormSpec(max_weight, table, None)


def conditions_up_to(spec: NormalFormSpec, max_weight: int) -> list[Condition]:
    spec = spec.extended(max_weight)
    out = []
    for w in range(max_weight + 1):
        for c in spec.lines(w):
            out.extend(c.conditions())
    return out


@dataclass(frozen=True)
class Violation:
    condition: Condition
    residual: PuSeries

    def __str__(self):
        return f"{self.condition}: residual {self.residual}"


def check(jet, spec: NormalFormSpec) -> list[Violation]:
    """Every condition of ``spec`` up to the jet's weight that fails, with ``tr^t phi_{kml}``."""
    out = []
    sig = jet.sig
    if sig is None:
        raise ValidationError("normal-form checking needs a jet with diagonal Levi form")
    for cond in conditions_up_to(spec, jet.max_weight):
        poly = jet.coefficient(cond.k, cond.m, cond.l)
        if not poly:
            continue
        residual = trace_power(poly, sig, cond.t)
        if residual:
            out.append(Violation(cond, residual))
    return out
