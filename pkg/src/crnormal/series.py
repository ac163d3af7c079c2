"""Truncated series in ``(z, zbar, u)`` and ``(z, w)`` under the weight grading.

``wt(z_j) = wt(zbar_j) = 1`` and ``wt(u) = wt(w) = 2``.  A series is tagged with
``max_weight`` and never stores a monomial above it; every binary operation
requires matching dimension and truncation.

Monomials are packed into Python ints: one 8-bit exponent field per variable and
the weight above them, so a product of monomials is an integer sum and sorting keys
sorts by weight first.  Coefficients are stored as ``(re, im)`` pairs of ``mpq``.
"""
from __future__ import annotations

from bisect import bisect_left
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence

from gmpy2 import mpq

from .errors import ValidationError
from .scalars import GaussianRational

__all__ = [
    "Signature",
    "Monomial",
    "HoloMonomial",
    "PuSeries",
    "HoloSeries",
    "substitute",
    "invert_parametrization",
    "MAX_SUPPORTED_WEIGHT",
]

FIELD = 8
_MASK = (1 << FIELD) - 1
MAX_SUPPORTED_WEIGHT = _MASK

_Q0 = mpq(0)
_Q1 = mpq(1)
_HALF = mpq(1, 2)


class Signature(tuple):
    """Diagonal Levi form signs ``(eps_1, ..., eps_n)``, each ``+1`` or ``-1``."""

    def __new__(cls, eps: Iterable[int]):
        eps = tuple(int(e) for e in eps)
        if len(eps) < 1:
            raise ValidationError("signature needs n >= 1 entries")
        if any(e not in (1, -1) for e in eps):
            raise ValidationError(f"signature entries must be +1 or -1, got {eps}")
        return super().__new__(cls, eps)

    @property
    def n(self) -> int:
        return len(self)

    def __repr__(self):
        return f"Signature({tuple(self)})"


class Monomial(NamedTuple):
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    l: int

    @property
    def bidegree(self) -> tuple[int, int]:
        return sum(self.alpha), sum(self.beta)

    @property
    def weight(self) -> int:
        return sum(self.alpha) + sum(self.beta) + 2 * self.l


class HoloMonomial(NamedTuple):
    alpha: tuple[int, ...]
    l: int

    @property
    def weight(self) -> int:
        return sum(self.alpha) + 2 * self.l


class _Layout:
    """Packing of exponent vectors for one variable list."""

    __slots__ = ("weights", "nvars", "shift", "units", "_decoded")

    def __init__(self, weights: tuple[int, ...]):
        self.weights = weights
        self.nvars = len(weights)
        self.shift = FIELD * self.nvars
        self.units = tuple((w << self.shift) | (1 << (FIELD * i)) for i, w in enumerate(weights))
        self._decoded: dict[int, tuple[int, ...]] = {}

    def encode(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise ValidationError(f"expected {self.nvars} exponents, got {len(exps)}")
        key = 0
        for e, unit in zip(exps, self.units):
            if e < 0 or e > _MASK:
                raise ValidationError(f"exponent {e} out of range")
            key += e * unit
        return key

    def decode(self, key: int) -> tuple[int, ...]:
        d = self._decoded.get(key)
        if d is None:
            d = tuple((key >> (FIELD * i)) & _MASK for i in range(self.nvars))
            self._decoded[key] = d
        return d

    def limit(self, budget: int) -> int:
        """Exclusive key bound for monomials of weight <= budget."""
        return (budget + 1) << self.shift


@lru_cache(maxsize=None)
def _pu_layout(n: int) -> _Layout:
    return _Layout((1,) * (2 * n) + (2,))


@lru_cache(maxsize=None)
def _holo_layout(n: int) -> _Layout:
    return _Layout((1,) * n + (2,))


# ---------------------------------------------------------------------------
# raw term-dict kernels: dict[int, tuple[mpq, mpq]]


def _add_into(acc: dict, terms: dict, sign: int = 1) -> None:
    get = acc.get
    if sign == 1:
        for k, (r, i) in terms.items():
            c = get(k)
            if c is None:
                acc[k] = (r, i)
            else:
                acc[k] = (c[0] + r, c[1] + i)
    else:
        for k, (r, i) in terms.items():
            c = get(k)
            if c is None:
                acc[k] = (-r, -i)
            else:
                acc[k] = (c[0] - r, c[1] - i)


def _prune(terms: dict) -> dict:
    return {k: c for k, c in terms.items() if c[0] != 0 or c[1] != 0}


def _scale(terms: dict, cr, ci) -> dict:
    if ci == 0:
        if cr == 0:
            return {}
        if cr == 1:
            return dict(terms)
        return {k: (r * cr, i * cr) for k, (r, i) in terms.items()}
    if cr == 0:
        return {k: (-i * ci, r * ci) for k, (r, i) in terms.items()}
    return {k: (r * cr - i * ci, r * ci + i * cr) for k, (r, i) in terms.items()}


def _mul(a: dict, b: dict, limit: int) -> dict:
    """Product keeping only keys below ``limit`` (weight truncation)."""
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    if len(a) == 1:
        (ka, (ar, ai)), = a.items()
        bound = limit - ka
        out = {}
        if ai == 0:
            for kb, (br, bi) in b.items():
                if kb < bound:
                    out[ka + kb] = (ar * br, ar * bi)
        else:
            for kb, (br, bi) in b.items():
                if kb < bound:
                    out[ka + kb] = (ar * br - ai * bi, ar * bi + ai * br)
        return _prune(out) if ai != 0 or ar == 0 else out
    bkeys = sorted(b)
    bvals = [b[k] for k in bkeys]
    out: dict = {}
    get = out.get
    for ka, (ar, ai) in a.items():
        cut = bisect_left(bkeys, limit - ka)
        if not cut:
            continue
        if ai == 0:
            for j in range(cut):
                br, bi = bvals[j]
                k = ka + bkeys[j]
                c = get(k)
                if c is None:
                    out[k] = (ar * br, ar * bi)
                else:
                    out[k] = (c[0] + ar * br, c[1] + ar * bi)
        elif ar == 0:
            for j in range(cut):
                br, bi = bvals[j]
                k = ka + bkeys[j]
                c = get(k)
                if c is None:
                    out[k] = (-ai * bi, ai * br)
                else:
                    out[k] = (c[0] - ai * bi, c[1] + ai * br)
        else:
            for j in range(cut):
                br, bi = bvals[j]
                k = ka + bkeys[j]
                c = get(k)
                if c is None:
                    out[k] = (ar * br - ai * bi, ar * bi + ai * br)
                else:
                    out[k] = (c[0] + ar * br - ai * bi, c[1] + ar * bi + ai * br)
    return _prune(out)


def _truncate(terms: dict, limit: int) -> dict:
    return {k: c for k, c in terms.items() if k < limit}


def _min_key(terms: dict):
    return min(terms) if terms else None


def _coef_pair(value) -> tuple:
    g = GaussianRational.coerce(value)
    return (g.re, g.im)


# ---------------------------------------------------------------------------


class _Series:
    __slots__ = ("n", "max_weight", "_t", "_hash")

    _layout_of = None  # set by subclasses
    _mono_type = None

    def __init__(self, n: int, max_weight: int, coeffs: Mapping | None = None):
        if not isinstance(n, int) or n < 1:
            raise ValidationError(f"dimension n must be a positive integer, got {n!r}")
        if not isinstance(max_weight, int) or max_weight < 0 or max_weight > MAX_SUPPORTED_WEIGHT:
            raise ValidationError(f"max_weight must be an integer in [0, {MAX_SUPPORTED_WEIGHT}]")
        self.n = n
        self.max_weight = max_weight
        self._hash = None
        layout = self.layout
        limit = layout.limit(max_weight)
        terms: dict = {}
        for mono, value in (coeffs or {}).items():
            key = layout.encode(self._flatten(mono))
            if key >= limit:
                continue
            r, i = _coef_pair(value)
            c = terms.get(key)
            terms[key] = (r, i) if c is None else (c[0] + r, c[1] + i)
        self._t = _prune(terms)

    @classmethod
    def _make(cls, n: int, max_weight: int, terms: dict):
        obj = object.__new__(cls)
        obj.n = n
        obj.max_weight = max_weight
        obj._t = terms
        obj._hash = None
        return obj

    def _like(self, terms: dict):
        return self._make(self.n, self.max_weight, terms)

    @property
    def layout(self) -> _Layout:
        return type(self)._layout_of(self.n)

    # -- inspection --------------------------------------------------------

    @property
    def coeffs(self) -> dict:
        """Mapping monomial -> GaussianRational (built on demand)."""
        dec = self.layout.decode
        return {
            self._unflatten(dec(k)): GaussianRational._raw(r, i)
            for k, (r, i) in sorted(self._t.items())
        }

    def items(self):
        return self.coeffs.items()

    def __len__(self):
        return len(self._t)

    def __iter__(self):
        return iter(self.coeffs)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def coefficient(self, mono) -> GaussianRational:
        key = self.layout.encode(self._flatten(mono))
        r, i = self._t.get(key, (_Q0, _Q0))
        return GaussianRational._raw(r, i)

    def weights(self) -> set[int]:
        shift = self.layout.shift
        return {k >> shift for k in self._t}

    def min_weight(self):
        k = _min_key(self._t)
        return None if k is None else k >> self.layout.shift

    def weight_part(self, lo: int, hi: int | None = None):
        """Terms with ``lo <= weight <= hi`` (``hi`` defaults to ``lo``)."""
        hi = lo if hi is None else hi
        layout = self.layout
        lo_key = lo << layout.shift
        hi_key = layout.limit(hi)
        return self._like({k: c for k, c in self._t.items() if lo_key <= k < hi_key})

    def truncate(self, max_weight: int):
        """Same series viewed at a lower truncation."""
        if max_weight > self.max_weight:
            raise ValidationError("cannot raise truncation: higher terms are unknown")
        return self._make(self.n, max_weight, _truncate(self._t, self.layout.limit(max_weight)))

    def extend(self, max_weight: int):
        """Re-tag with a higher truncation bound, treating missing terms as zero."""
        if max_weight < self.max_weight:
            return self.truncate(max_weight)
        return self._make(self.n, max_weight, dict(self._t))

    # -- arithmetic --------------------------------------------------------

    def _check(self, other):
        if type(other) is not type(self):
            raise ValidationError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.n != self.n:
            raise ValidationError(f"dimension mismatch: n={self.n} vs n={other.n}")
        if other.max_weight != self.max_weight:
            raise ValidationError(
                f"truncation mismatch: max_weight={self.max_weight} vs {other.max_weight}"
            )

    def __add__(self, other):
        if not isinstance(other, _Series):
            return NotImplemented
        self._check(other)
        acc = dict(self._t)
        _add_into(acc, other._t)
        return self._like(_prune(acc))

    def __sub__(self, other):
        if not isinstance(other, _Series):
            return NotImplemented
        self._check(other)
        acc = dict(self._t)
        _add_into(acc, other._t, -1)
        return self._like(_prune(acc))

    def __neg__(self):
        return self._like({k: (-r, -i) for k, (r, i) in self._t.items()})

    def scale(self, c):
        cr, ci = _coef_pair(c)
        return self._like(_scale(self._t, cr, ci))

    def __mul__(self, other):
        if isinstance(other, _Series):
            self._check(other)
            return self._like(_mul(self._t, other._t, self.layout.limit(self.max_weight)))
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, _Series):
            return NotImplemented
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        result = self.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def one(self):
        return self._like({0: (_Q1, _Q0)})

    def zero(self):
        return self._like({})

    def __eq__(self, other):
        if not isinstance(other, _Series):
            return NotImplemented
        return (
            type(other) is type(self)
            and self.n == other.n
            and self.max_weight == other.max_weight
            and self._t == other._t
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.n, self.max_weight, frozenset(self._t.items())))
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, W={self.max_weight}, {self})"

    def __str__(self):
        if not self._t:
            return "0"
        dec = self.layout.decode
        parts = []
        for k in sorted(self._t):
            r, i = self._t[k]
            coef = str(GaussianRational._raw(r, i))
            mono = self._format_monomial(dec(k))
            if not mono:
                parts.append(coef)
            elif coef == "1":
                parts.append(mono)
            elif coef == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"({coef})*{mono}" if ("+" in coef or "-" in coef[1:] or "i" in coef) else f"{coef}*{mono}")
        return " + ".join(parts)

    def _format_monomial(self, exps) -> str:
        names = self._var_names()
        out = []
        for name, e in zip(names, exps):
            if e == 1:
                out.append(name)
            elif e > 1:
                out.append(f"{name}^{e}")
        return "*".join(out)


class PuSeries(_Series):
    """Truncated series in ``(z_1..z_n, zbar_1..zbar_n, u)``.

    ``coeffs`` keys may be :class:`Monomial` or ``(alpha, beta, l)`` tuples.
    Terms above ``max_weight`` are dropped on construction.
    """

    __slots__ = ()
    _layout_of = staticmethod(_pu_layout)

    @staticmethod
    def _flatten(mono) -> tuple[int, ...]:
        alpha, beta, l = mono
        return tuple(alpha) + tuple(beta) + (l,)

    def _unflatten(self, exps) -> Monomial:
        n = self.n
        return Monomial(exps[:n], exps[n : 2 * n], exps[2 * n])

    def _var_names(self):
        return [f"z{j + 1}" for j in range(self.n)] + [f"zb{j + 1}" for j in range(self.n)] + ["u"]

    # -- constructors --------------------------------------------------------

    @classmethod
    def z(cls, n: int, max_weight: int, j: int) -> "PuSeries":
        e = [0] * (2 * n + 1)
        e[j] = 1
        return cls._make(n, max_weight, _truncate({_pu_layout(n).encode(e): (_Q1, _Q0)}, _pu_layout(n).limit(max_weight)))

    @classmethod
    def zbar(cls, n: int, max_weight: int, j: int) -> "PuSeries":
        e = [0] * (2 * n + 1)
        e[n + j] = 1
        return cls._make(n, max_weight, _truncate({_pu_layout(n).encode(e): (_Q1, _Q0)}, _pu_layout(n).limit(max_weight)))

    @classmethod
    def u(cls, n: int, max_weight: int) -> "PuSeries":
        e = [0] * (2 * n + 1)
        e[2 * n] = 1
        return cls._make(n, max_weight, _truncate({_pu_layout(n).encode(e): (_Q1, _Q0)}, _pu_layout(n).limit(max_weight)))

    @classmethod
    def constant(cls, n: int, max_weight: int, c=1) -> "PuSeries":
        cr, ci = _coef_pair(c)
        return cls._make(n, max_weight, _prune({0: (cr, ci)}))

    @classmethod
    def levi_form(cls, sig: Sequence[int], max_weight: int) -> "PuSeries":
        """``<z,z> = sum_j eps_j z_j zbar_j``."""
        sig = Signature(sig)
        n = len(sig)
        coeffs = {}
        for j, e in enumerate(sig):
            a = [0] * n
            a[j] = 1
            coeffs[(tuple(a), tuple(a), 0)] = e
        return cls(n, max_weight, coeffs)

    # -- structure -----------------------------------------------------------

    def _bidegree_of_key(self, key: int) -> tuple[int, int, int]:
        n = self.n
        exps = self.layout.decode(key)
        return sum(exps[:n]), sum(exps[n : 2 * n]), exps[2 * n]

    def conjugate(self) -> "PuSeries":
        """Swap ``z <-> zbar`` in every monomial and conjugate every coefficient."""
        return self._like(_conjugate_terms(self.n, self._t))

    def is_real(self) -> bool:
        return self._t == _conjugate_terms(self.n, self._t)

    def real_part(self) -> "PuSeries":
        acc = dict(self._t)
        _add_into(acc, _conjugate_terms(self.n, self._t))
        return self._like(_prune(_scale(acc, _HALF, _Q0)))

    def imag_part(self) -> "PuSeries":
        acc = dict(self._t)
        _add_into(acc, _conjugate_terms(self.n, self._t), -1)
        # divide by 2i: (r + i s)/(2i) = s/2 - i r/2
        return self._like(_prune({k: (s * _HALF, -r * _HALF) for k, (r, s) in acc.items()}))

    def bicomponent(self, k: int, m: int, l: int) -> "PuSeries":
        """The part with ``|alpha| = k``, ``|beta| = m`` and ``u``-exponent ``l``."""
        if min(k, m, l) < 0:
            return self.zero()
        bid = self._bidegree_of_key
        return self._like({key: c for key, c in self._t.items() if bid(key) == (k, m, l)})

    def bicomponents(self) -> dict[tuple[int, int, int], "PuSeries"]:
        """Partition of the series by ``(k, m, l)``."""
        groups: dict = {}
        bid = self._bidegree_of_key
        for key, c in self._t.items():
            groups.setdefault(bid(key), {})[key] = c
        return {kml: self._like(t) for kml, t in sorted(groups.items())}

    def bidegrees(self) -> set[tuple[int, int]]:
        bid = self._bidegree_of_key
        return {bid(key)[:2] for key in self._t}

    def u_part(self, l: int) -> "PuSeries":
        """Coefficient of ``u^l`` as a polynomial in ``(z, zbar)``."""
        layout = self.layout
        ustep = layout.units[2 * self.n]
        out = {}
        for key, c in self._t.items():
            if layout.decode(key)[2 * self.n] == l:
                out[key - l * ustep] = c
        return self._like(out)

    def times_u(self, l: int) -> "PuSeries":
        layout = self.layout
        step = l * layout.units[2 * self.n]
        limit = layout.limit(self.max_weight)
        return self._like({k + step: c for k, c in self._t.items() if k + step < limit})

    def coefficient_polynomial(self, k: int, m: int, l: int) -> "PuSeries":
        """``phi_{kml}(z, zbar)`` with the factor ``u^l`` removed."""
        return self.bicomponent(k, m, l).u_part(l)

    def is_holomorphic(self) -> bool:
        n = self.n
        dec = self.layout.decode
        return all(not any(dec(k)[n:]) for k in self._t)

    def compose(self, z_args: Sequence["PuSeries"], zbar_args: Sequence["PuSeries"] | None, u_arg: "PuSeries") -> "PuSeries":
        """Substitute series for ``(z, zbar, u)``; ``zbar_args`` defaults to the conjugates of ``z_args``."""
        if zbar_args is None:
            zbar_args = [a.conjugate() for a in z_args]
        args = list(z_args) + list(zbar_args) + [u_arg]
        if len(args) != 2 * self.n + 1:
            raise ValidationError(f"expected {self.n} z-arguments")
        return _compose(self, args)


class HoloSeries(_Series):
    """Truncated series in ``(z_1..z_n, w)``; keys are :class:`HoloMonomial` or ``(alpha, l)``."""

    __slots__ = ()
    _layout_of = staticmethod(_holo_layout)

    @staticmethod
    def _flatten(mono) -> tuple[int, ...]:
        alpha, l = mono
        return tuple(alpha) + (l,)

    def _unflatten(self, exps) -> HoloMonomial:
        return HoloMonomial(exps[: self.n], exps[self.n])

    def _var_names(self):
        return [f"z{j + 1}" for j in range(self.n)] + ["w"]

    @classmethod
    def z(cls, n: int, max_weight: int, j: int) -> "HoloSeries":
        e = [0] * (n + 1)
        e[j] = 1
        return cls._make(n, max_weight, _truncate({_holo_layout(n).encode(e): (_Q1, _Q0)}, _holo_layout(n).limit(max_weight)))

    @classmethod
    def w(cls, n: int, max_weight: int) -> "HoloSeries":
        e = [0] * (n + 1)
        e[n] = 1
        return cls._make(n, max_weight, _truncate({_holo_layout(n).encode(e): (_Q1, _Q0)}, _holo_layout(n).limit(max_weight)))

    @classmethod
    def constant(cls, n: int, max_weight: int, c=1) -> "HoloSeries":
        cr, ci = _coef_pair(c)
        return cls._make(n, max_weight, _prune({0: (cr, ci)}))

    def component(self, k: int, l: int) -> "HoloSeries":
        """``f_{kl}(z) w^l``: the part of z-degree ``k`` and w-exponent ``l``."""
        n = self.n
        dec = self.layout.decode
        out = {}
        for key, c in self._t.items():
            e = dec(key)
            if e[n] == l and sum(e[:n]) == k:
                out[key] = c
        return self._like(out)

    def coefficient_polynomial(self, k: int, l: int) -> "PuSeries":
        """``f_{kl}(z)`` as a holomorphic :class:`PuSeries` (``w^l`` removed)."""
        n = self.n
        dec = self.layout.decode
        pl = _pu_layout(n)
        out = {}
        for key, c in self._t.items():
            e = dec(key)
            if e[n] == l and sum(e[:n]) == k:
                out[pl.encode(e[:n] + (0,) * n + (0,))] = c
        return PuSeries._make(n, self.max_weight, out)

    @classmethod
    def from_polynomial(cls, poly: "PuSeries", l: int = 0, max_weight: int | None = None) -> "HoloSeries":
        """Holomorphic ``poly(z)`` times ``w^l``; ``poly`` must not involve ``zbar`` or ``u``."""
        n = poly.n
        W = poly.max_weight if max_weight is None else max_weight
        dec = poly.layout.decode
        hl = _holo_layout(n)
        limit = hl.limit(W)
        out = {}
        for key, c in poly._t.items():
            e = dec(key)
            if any(e[n:]):
                raise ValidationError("polynomial is not holomorphic in z")
            hk = hl.encode(e[:n] + (l,))
            if hk < limit:
                out[hk] = c
        return cls._make(n, W, out)

    def substitute(self, z_args: Sequence[_Series], w_arg: _Series) -> _Series:
        return substitute(self, z_args, w_arg)


def _conjugate_terms(n: int, terms: dict) -> dict:
    layout = _pu_layout(n)
    dec = layout.decode
    out = {}
    zmask = 0
    for j in range(n):
        zmask |= _MASK << (FIELD * j)
    zbshift = FIELD * n
    for key, (r, i) in terms.items():
        z_part = key & zmask
        zb_part = (key >> zbshift) & zmask
        rest = key & ~(zmask | (zmask << zbshift))
        out[rest | (z_part << zbshift) | zb_part] = (r, -i)
    del dec
    return out


# ---------------------------------------------------------------------------
# composition


def _compose(src: _Series, args: Sequence[_Series]) -> _Series:
    """Substitute ``args`` for the variables of ``src``; result has the type of the args.

    Every argument must have no constant term and minimal weight at least the weight
    of the variable it replaces, so that truncation at ``max_weight`` stays exact.
    """
    if not args:
        raise ValidationError("no arguments")
    tgt_type = type(args[0])
    W = args[0].max_weight
    n_t = args[0].n
    for a in args:
        if type(a) is not tgt_type or a.n != n_t or a.max_weight != W:
            raise ValidationError("substitution arguments must share type, n and max_weight")
    if src.max_weight != W:
        raise ValidationError(
            f"truncation mismatch: target max_weight={src.max_weight}, arguments {W}"
        )
    slay = src.layout
    tlay = args[0].layout
    if len(args) != slay.nvars:
        raise ValidationError(f"expected {slay.nvars} arguments, got {len(args)}")
    minw = []
    for v, a in enumerate(args):
        if 0 in a._t:
            raise ValidationError("substitution argument has a nonzero constant term")
        mw = a.min_weight()
        if mw is not None and mw < slay.weights[v]:
            raise ValidationError(
                f"substitution argument {v} has terms of weight {mw} below the variable weight "
                f"{slay.weights[v]}"
            )
        minw.append(mw)

    tshift = tlay.shift
    nv = slay.nvars
    powers: list[list[dict]] = [[{0: (_Q1, _Q0)}, a._t] for a in args]
    full_limit = tlay.limit(W)

    def power(v: int, e: int) -> dict:
        cache = powers[v]
        while len(cache) <= e:
            cache.append(_mul(cache[-1], cache[1], full_limit))
        return cache[e]

    dec = slay.decode
    items = [(dec(k), c) for k, c in src._t.items()]

    def rec(items, v: int, budget: int) -> dict:
        if v == nv:
            r = _Q0
            i = _Q0
            for _, (cr, ci) in items:
                r += cr
                i += ci
            return {0: (r, i)} if (r != 0 or i != 0) else {}
        groups: dict[int, list] = {}
        for exps, c in items:
            groups.setdefault(exps[v], []).append((exps, c))
        if len(groups) == 1 and 0 in groups:
            return rec(items, v + 1, budget)
        out: dict = {}
        mw = minw[v]
        for e in sorted(groups):
            if e == 0:
                inner = rec(groups[0], v + 1, budget)
                _add_into(out, inner)
                continue
            if mw is None:
                continue
            b2 = budget - e * mw
            if b2 < 0:
                continue
            inner = rec(groups[e], v + 1, b2)
            if not inner:
                continue
            limit = (budget + 1) << tshift
            p = power(v, e)
            _add_into(out, _mul(p, inner, limit))
        return _prune(out)

    terms = rec(items, 0, W)
    return tgt_type._make(n_t, W, _truncate(terms, full_limit))


def substitute(target: HoloSeries, z_args: Sequence[_Series], w_arg: _Series) -> _Series:
    """Formal composition ``target(z_args, w_arg)`` truncated at ``max_weight``.

    Arguments are PuSeries (giving a PuSeries) or HoloSeries (giving a HoloSeries).
    They must have zero constant term; ``w_arg`` must have no weight-1 terms.
    """
    if not isinstance(target, HoloSeries):
        raise ValidationError("substitute() expects a HoloSeries target")
    if len(z_args) != target.n:
        raise ValidationError(f"expected {target.n} z-arguments, got {len(z_args)}")
    return _compose(target, list(z_args) + [w_arg])


# ---------------------------------------------------------------------------
# inversion of near-identity parametrizations


def _check_near_identity_pu(zp: Sequence[PuSeries], up: PuSeries) -> None:
    n = up.n
    W = up.max_weight
    for j, s in enumerate(zp):
        if s.n != n or s.max_weight != W:
            raise ValidationError("parametrization components must share n and max_weight")
        if 0 in s._t:
            raise ValidationError("parametrization has a constant term")
        if s.weight_part(1) != PuSeries.z(n, W, j).weight_part(1):
            raise ValidationError(f"linear part of z'_{j + 1} is not z_{j + 1}")
    if 0 in up._t or up.weight_part(1):
        raise ValidationError("u' has constant or weight-1 terms")
    if W >= 2 and up.coefficient(((0,) * n, (0,) * n, 1)) != 1:
        raise ValidationError("linear part of u' is not u")
    if not up.is_real():
        raise ValidationError("u' must be real")


def _fixed_point(variables: list, corrections, W: int, truncate, equal) -> list:
    """Solve ``x = x' - N(x)`` by iteration with rising truncation.

    ``corrections(x, t)`` returns ``N(x)`` computed at truncation ``t``.
    """
    current = [truncate(v, min(W, 2)) for v in variables]
    t = min(W, 2)
    for _ in range(4 * W + 8):
        t_next = min(W, t + 1)
        x = [truncate(v, t_next) for v in variables]
        lifted = [c.extend(t_next) for c in current]
        corr = corrections(lifted, t_next)
        new = [xi - ci for xi, ci in zip(x, corr)]
        if t_next == W and t == W and all(equal(a, b) for a, b in zip(new, current)):
            return new
        current = new
        t = t_next
    raise ValidationError("fixed-point inversion did not converge; linear part is not unipotent")


def invert_parametrization(zp: Sequence[PuSeries], up: PuSeries) -> tuple[list[PuSeries], PuSeries]:
    """Invert ``(z, zbar, u) -> (zp, conj(zp), up)``.

    Requires ``zp_j = z_j + (weight >= 2)`` and ``up = u + (weight >= 2)`` with ``up`` real.
    Returns ``(z(z', zbar', u'), u(z', zbar', u'))`` with the primed variables written as
    ``z, zbar, u``.
    """
    zp = list(zp)
    n = up.n
    if len(zp) != n:
        raise ValidationError(f"expected {n} z-components")
    _check_near_identity_pu(zp, up)
    W = up.max_weight
    nz = [s - PuSeries.z(n, W, j) for j, s in enumerate(zp)]
    nu = up - PuSeries.u(n, W)
    ident = [PuSeries.z(n, W, j) for j in range(n)] + [PuSeries.u(n, W)]

    def corrections(x, t):
        zs = x[:n]
        zb = [s.conjugate() for s in zs]
        u = x[n]
        out = [s.truncate(t).compose(zs, zb, u) for s in nz]
        out.append(nu.truncate(t).compose(zs, zb, u))
        return out

    sol = _fixed_point(ident, corrections, W, lambda s, t: s.truncate(t) if t <= s.max_weight else s.extend(t), lambda a, b: a == b)
    return sol[:n], sol[n]
