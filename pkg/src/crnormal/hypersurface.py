"""Hypersurface jets ``Im w = phi(z, zbar, u)``, formal maps ``(f, g)`` and the
transformation rule ``Im g(z, u + i phi) = phi'(f, conj f, Re g)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Sequence

from gmpy2 import mpq

from .errors import ValidationError
from .linalg import invert_matrix
from .scalars import ONE, ZERO, GaussianRational
from .series import (
    HoloSeries,
    PuSeries,
    Signature,
    _fixed_point,
    invert_parametrization,
    substitute,
)

__all__ = [
    "HypersurfaceJet",
    "MapJet",
    "NormalizedMapFlags",
    "validate_hypersurface",
    "quadric",
    "is_fg_normalized",
    "is_linear_normalized",
    "map_flags",
    "is_levi_isometry_linear_part",
    "compose",
    "invert",
    "apply_map",
    "apply_map_by_inversion",
    "check_transformation_identity",
    "r_automorphism",
    "a_automorphism",
    "levi_diagnostic",
    "LeviDiagnostic",
]


class HypersurfaceJet:
    """A validated jet of a real hypersurface through 0.

    ``sig=None`` marks a jet whose Levi form is not required to be the diagonal
    form; only reality and the absence of constant and linear terms are checked.
    Such jets are accepted by harmonic elimination only.
    """

    __slots__ = ("n", "sig", "max_weight", "phi")

    def __init__(self, phi: PuSeries, sig: Sequence[int] | None):
        n = phi.n
        if phi.max_weight < 2:
            raise ValidationError("max_weight must be at least 2 so the jet contains its Levi form")
        if sig is not None:
            sig = sig if isinstance(sig, Signature) else Signature(sig)
            if len(sig) != n:
                raise ValidationError(f"signature length {len(sig)} does not match n={n}")
        if not phi.is_real():
            bad = _first_reality_violation(phi)
            raise ValidationError(f"reality violated: phi != conj(phi) (first mismatch at {bad})")
        low = phi.weight_part(0, 1)
        if low:
            raise ValidationError(f"phi has constant or linear terms: {low}")
        if phi.coefficient(((0,) * n, (0,) * n, 1)):
            raise ValidationError("phi has a linear u term")
        if sig is not None:
            levi = phi.bicomponent(1, 1, 0)
            if levi != PuSeries.levi_form(sig, phi.max_weight):
                raise ValidationError(
                    f"Levi form {levi} is not the diagonal form for signature {tuple(sig)}; "
                    "pre-diagonalize the Levi form (see levi_diagnostic)"
                )
        self.n = n
        self.sig = sig
        self.max_weight = phi.max_weight
        self.phi = phi

    def __eq__(self, other):
        if not isinstance(other, HypersurfaceJet):
            return NotImplemented
        return self.sig == other.sig and self.phi == other.phi

    def __hash__(self):
        return hash((self.sig, self.phi))

    def __repr__(self):
        return f"HypersurfaceJet(n={self.n}, sig={None if self.sig is None else tuple(self.sig)}, W={self.max_weight}, phi={self.phi})"

    def coefficient(self, k: int, m: int, l: int) -> PuSeries:
        """``phi_{kml}(z, zbar)``."""
        return self.phi.coefficient_polynomial(k, m, l)

    def with_phi(self, phi: PuSeries) -> "HypersurfaceJet":
        return HypersurfaceJet(phi, self.sig)

    def truncate(self, max_weight: int) -> "HypersurfaceJet":
        return HypersurfaceJet(self.phi.truncate(max_weight), self.sig)


def _first_reality_violation(phi: PuSeries):
    conj = phi.conjugate()
    for mono, c in phi.coeffs.items():
        if conj.coefficient(mono) != c:
            return mono
    for mono in conj.coeffs:
        return mono
    return None


def validate_hypersurface(raw: PuSeries, sig: Sequence[int] | None) -> HypersurfaceJet:
    return HypersurfaceJet(raw, sig)


def quadric(sig: Sequence[int], max_weight: int) -> HypersurfaceJet:
    sig = Signature(sig)
    return HypersurfaceJet(PuSeries.levi_form(sig, max_weight), sig)


# ---------------------------------------------------------------------------


class MapJet:
    """Formal map ``(z, w) -> (f(z, w), g(z, w))`` truncated at ``max_weight``.

    Both components are stored as HoloSeries truncated at the same weight.
    """

    __slots__ = ("n", "max_weight", "f", "g")

    def __init__(self, f: Sequence[HoloSeries], g: HoloSeries, *, check: bool = True):
        f = tuple(f)
        n = g.n
        if len(f) != n:
            raise ValidationError(f"map has {len(f)} f-components for n={n}")
        for fj in f:
            if not isinstance(fj, HoloSeries) or fj.n != n or fj.max_weight != g.max_weight:
                raise ValidationError("map components must be HoloSeries with common n and max_weight")
        self.n = n
        self.max_weight = g.max_weight
        self.f = f
        self.g = g
        if check:
            self._validate()

    def _validate(self):
        n = self.n
        for fj in (*self.f, self.g):
            if fj.coefficient(((0,) * n, 0)):
                raise ValidationError("map has a constant term (must fix the origin)")
        if any(not c.is_zero() for c in self.g10()):
            raise ValidationError("g_10 must vanish (tangent plane must be preserved)")
        g01 = self.g01()
        if not g01.is_real():
            raise ValidationError("Im g_01 must vanish")
        if g01.is_zero():
            raise ValidationError("g_01 must be nonzero (invertible linear part)")
        try:
            invert_matrix(self.f10())
        except ZeroDivisionError:
            raise ValidationError("f_10 is not invertible") from None

    @classmethod
    def identity(cls, n: int, max_weight: int) -> "MapJet":
        return cls(
            [HoloSeries.z(n, max_weight, j) for j in range(n)], HoloSeries.w(n, max_weight), check=False
        )

    @classmethod
    def linear(cls, a: Sequence[Sequence], c, max_weight: int) -> "MapJet":
        """``(z, w) -> (A z, c w)``."""
        n = len(a)
        zs = [HoloSeries.z(n, max_weight, j) for j in range(n)]
        f = []
        for i in range(n):
            fi = HoloSeries.constant(n, max_weight, 0)
            for j in range(n):
                fi = fi + zs[j].scale(a[i][j])
            f.append(fi)
        return cls(f, HoloSeries.w(n, max_weight).scale(c))

    def __eq__(self, other):
        if not isinstance(other, MapJet):
            return NotImplemented
        return self.f == other.f and self.g == other.g

    def __hash__(self):
        return hash((self.f, self.g))

    def __repr__(self):
        return f"MapJet(n={self.n}, W={self.max_weight}, f={list(map(str, self.f))}, g={self.g})"

    def _unit(self, j: int) -> tuple:
        a = [0] * self.n
        a[j] = 1
        return tuple(a)

    def f10(self) -> list[list[GaussianRational]]:
        return [[fi.coefficient((self._unit(j), 0)) for j in range(self.n)] for fi in self.f]

    def f01(self) -> list[GaussianRational]:
        return [fi.coefficient(((0,) * self.n, 1)) for fi in self.f]

    def g10(self) -> list[GaussianRational]:
        return [self.g.coefficient((self._unit(j), 0)) for j in range(self.n)]

    def g01(self) -> GaussianRational:
        return self.g.coefficient(((0,) * self.n, 1))

    def g02(self) -> GaussianRational:
        return self.g.coefficient(((0,) * self.n, 2))

    def f_coefficient(self, k: int, l: int) -> list[PuSeries]:
        """``f_{kl}(z)`` componentwise, as holomorphic polynomials."""
        return [fi.coefficient_polynomial(k, l) for fi in self.f]

    def g_coefficient(self, k: int, l: int) -> PuSeries:
        return self.g.coefficient_polynomial(k, l)

    def is_identity(self) -> bool:
        return self == MapJet.identity(self.n, self.max_weight)

    def truncate(self, max_weight: int) -> "MapJet":
        return MapJet([fi.truncate(max_weight) for fi in self.f], self.g.truncate(max_weight), check=False)


@dataclass(frozen=True)
class NormalizedMapFlags:
    is_linear_normalized: bool
    is_fg_normalized: bool


def is_linear_normalized(h: MapJet) -> bool:
    n = h.n
    ident = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    return h.f10() == ident and h.g01() == ONE


def is_fg_normalized(h: MapJet) -> bool:
    """``f_z = id``, ``f_w = 0``, ``g_z = 0``, ``g_w = 1`` and ``Re g_02 = 0`` at the origin."""
    return (
        is_linear_normalized(h)
        and all(c.is_zero() for c in h.f01())
        and all(c.is_zero() for c in h.g10())
        and h.g02().re == 0
    )


def map_flags(h: MapJet) -> NormalizedMapFlags:
    return NormalizedMapFlags(is_linear_normalized(h), is_fg_normalized(h))


def is_levi_isometry_linear_part(h: MapJet, sig: Sequence[int]) -> bool:
    """``Re(g_01) <z,z> == <f_10 z, f_10 z>`` and ``Im g_01 == 0``."""
    sig = Signature(sig)
    g01 = h.g01()
    if not g01.is_real():
        return False
    a = h.f10()
    n = h.n
    # <Az, Az> = sum_i eps_i (A z)_i conj((A z)_i); compare the hermitian matrices
    for j in range(n):
        for k in range(n):
            entry = sum((a[i][j] * a[i][k].conjugate() * sig[i] for i in range(n)), ZERO)
            expected = g01 * sig[j] if j == k else ZERO
            if entry != expected:
                return False
    return True


def _check_pair(h2: MapJet, h1: MapJet):
    if h1.n != h2.n or h1.max_weight != h2.max_weight:
        raise ValidationError("maps must share n and max_weight")


def compose(h2: MapJet, h1: MapJet) -> MapJet:
    """``h2 o h1`` truncated at the common max_weight."""
    _check_pair(h2, h1)
    f = [substitute(fj, h1.f, h1.g) for fj in h2.f]
    g = substitute(h2.g, h1.f, h1.g)
    return MapJet(f, g, check=False)


def _linear_factor(h: MapJet):
    """Split ``h = L o h0`` with ``L = (A z, c w)`` and ``h0`` tangent to the identity."""
    n, W = h.n, h.max_weight
    a = h.f10()
    c = h.g01()
    ainv = invert_matrix(a)
    f0 = []
    for i in range(n):
        fi = HoloSeries.constant(n, W, 0)
        for j in range(n):
            if not ainv[i][j].is_zero():
                fi = fi + h.f[j].scale(ainv[i][j])
        f0.append(fi)
    g0 = h.g.scale(ONE / c)
    return a, ainv, c, MapJet(f0, g0, check=False)


def invert(h: MapJet) -> MapJet:
    """Compositional inverse: invert the linear part, then a fixed point on the rest."""
    n, W = h.n, h.max_weight
    a, ainv, c, h0 = _linear_factor(h)
    ident = [HoloSeries.z(n, W, j) for j in range(n)] + [HoloSeries.w(n, W)]
    nonlinear = [fj - ident[j] for j, fj in enumerate(h0.f)] + [h0.g - ident[n]]

    def corrections(x, t):
        return [s.truncate(t).substitute(x[:n], x[n]) for s in nonlinear]

    sol = _fixed_point(
        ident, corrections, W, lambda s, t: s.truncate(t) if t <= s.max_weight else s.extend(t), lambda p, q: p == q
    )
    h0_inv = MapJet(sol[:n], sol[n], check=False)
    lin_inv = MapJet.linear(ainv, ONE / c, W)
    return compose(h0_inv, lin_inv)


def _pullback_parametrization(m: HypersurfaceJet, h: MapJet):
    """``(f(z, u+i phi), g(z, u+i phi))`` as PuSeries."""
    n, W = m.n, m.max_weight
    zs = [PuSeries.z(n, W, j) for j in range(n)]
    w = PuSeries.u(n, W) + m.phi.scale(GaussianRational(0, 1))
    fz = [substitute(fj, zs, w) for fj in h.f]
    gz = substitute(h.g, zs, w)
    return fz, gz


def _require_compatible(m: HypersurfaceJet, h: MapJet):
    if m.n != h.n:
        raise ValidationError(f"jet has n={m.n} but map has n={h.n}")
    if m.max_weight != h.max_weight:
        raise ValidationError(f"jet max_weight={m.max_weight} but map max_weight={h.max_weight}")


def _shear_part(h0: MapJet) -> PuSeries:
    """``g_20(z)``: the weight-2 holomorphic part of ``g`` without ``w``."""
    return h0.g_coefficient(2, 0)


def _apply_shear(phi: PuSeries, g20: PuSeries) -> PuSeries:
    """Image under ``(z, w) -> (z, w + g20(z))``: ``phi(z, u - Re g20) + Im g20``."""
    n, W = phi.n, phi.max_weight
    zs = [PuSeries.z(n, W, j) for j in range(n)]
    return phi.compose(zs, None, PuSeries.u(n, W) - g20.real_part()) + g20.imag_part()


def _apply_unipotent(phi: PuSeries, h: MapJet) -> PuSeries:
    """Image under ``h`` with identity linear part and ``g_20 = 0``.

    Then ``phi'(f, conj f, Re g) = phi' + (higher weight)``, so ``phi'`` is found
    one weight at a time; each weight slice is composed exactly once.
    """
    m = HypersurfaceJet(phi, None)
    fz, gz = _pullback_parametrization(m, h)
    target = gz.imag_part()
    up = gz.real_part()
    W = phi.max_weight
    acc = target.zero()
    out = target.zero()
    for t in range(2, W + 1):
        slice_t = (target - acc).weight_part(t)
        if not slice_t:
            continue
        out = out + slice_t
        acc = acc + slice_t.compose(fz, None, up)
    return out


def _apply_linear(phi: PuSeries, ainv, c: GaussianRational) -> PuSeries:
    """Image under ``(z, w) -> (A z, c w)``: ``c phi(A^-1 z, conj(A^-1 z), u / c)``."""
    n, W = phi.n, phi.max_weight
    zs = [PuSeries.z(n, W, j) for j in range(n)]
    args = []
    for i in range(n):
        s = PuSeries.constant(n, W, 0)
        for j in range(n):
            if not ainv[i][j].is_zero():
                s = s + zs[j].scale(ainv[i][j])
        args.append(s)
    cr = c.re
    return phi.compose(args, None, PuSeries.u(n, W).scale(1 / cr)).scale(cr)


def _is_identity_matrix(a) -> bool:
    n = len(a)
    return all(a[i][j] == (ONE if i == j else ZERO) for i in range(n) for j in range(n))


def apply_map(m: HypersurfaceJet, h: MapJet) -> HypersurfaceJet:
    """Image of ``m`` under ``h``.

    ``h`` is factored as ``L o h1 o s`` with ``s = (z, w + g20(z))`` a shear,
    ``h1`` tangent to the identity with no ``g20`` term, and ``L = (A z, c w)``.
    The result is validated against the jet's signature, so a linear part
    that is not a Levi isometry is rejected.
    """
    _require_compatible(m, h)
    n, W = m.n, m.max_weight
    a, ainv, c, h0 = _linear_factor(h)
    phi = m.phi
    if not h0.is_identity():
        g20 = _shear_part(h0)
        if g20:
            phi = _apply_shear(phi, g20)
            shear_inv = MapJet(
                [HoloSeries.z(n, W, j) for j in range(n)],
                HoloSeries.w(n, W) - HoloSeries.from_polynomial(g20, 0, W),
                check=False,
            )
            h0 = compose(h0, shear_inv)
        if not h0.is_identity():
            phi = _apply_unipotent(phi, h0)
    if not (_is_identity_matrix(a) and c == ONE):
        phi = _apply_linear(phi, ainv, c)
    try:
        return HypersurfaceJet(phi, m.sig)
    except ValidationError as exc:
        raise ValidationError(f"image hypersurface is invalid: {exc}") from None


def apply_map_by_inversion(m: HypersurfaceJet, h: MapJet) -> HypersurfaceJet:
    """Independent route to :func:`apply_map`: invert the parametrization
    ``(z, zbar, u) -> (f, conj f, Re g)`` and substitute into ``Im g``."""
    _require_compatible(m, h)
    a, ainv, c, h0 = _linear_factor(h)
    fz, gz = _pullback_parametrization(m, h0)
    zinv, uinv = invert_parametrization(fz, gz.real_part())
    phi = gz.imag_part().compose(zinv, None, uinv)
    if not (_is_identity_matrix(a) and c == ONE):
        phi = _apply_linear(phi, ainv, c)
    return HypersurfaceJet(phi, m.sig)


def check_transformation_identity(m: HypersurfaceJet, h: MapJet, image: HypersurfaceJet) -> PuSeries:
    """``Im g(z, u+i phi) - phi'(f, conj f, Re g)`` on the parametrization of ``m``."""
    _require_compatible(m, h)
    _require_compatible(image, h)
    fz, gz = _pullback_parametrization(m, h)
    return gz.imag_part() - image.phi.compose(fz, None, gz.real_part())


# ---------------------------------------------------------------------------
# automorphisms of the quadric


def r_automorphism(n: int, r, max_weight: int) -> MapJet:
    """``(z, w) -> (z, w) / (1 - r w)`` with real ``r``."""
    r = GaussianRational.coerce(r)
    if not r.is_real():
        raise ValidationError("r must be real")
    W = max_weight
    w = HoloSeries.w(n, W)
    geo = _geometric(w.scale(r))
    return MapJet([HoloSeries.z(n, W, j) * geo for j in range(n)], w * geo)


def a_automorphism(sig: Sequence[int], a: Sequence, max_weight: int) -> MapJet:
    """``(z + a w, w) / (1 - 2i<z,a> - i<a,a> w)`` with ``<x,y> = sum eps_j x_j conj(y_j)``."""
    sig = Signature(sig)
    n, W = len(sig), max_weight
    a = [GaussianRational.coerce(x) for x in a]
    if len(a) != n:
        raise ValidationError(f"a must have {n} entries")
    i2 = GaussianRational(0, 2)
    zs = [HoloSeries.z(n, W, j) for j in range(n)]
    w = HoloSeries.w(n, W)
    z_dot_a = HoloSeries.constant(n, W, 0)
    aa = ZERO
    for j in range(n):
        z_dot_a = z_dot_a + zs[j].scale(a[j].conjugate() * sig[j])
        aa = aa + a[j] * a[j].conjugate() * sig[j]
    denom_minus_one = z_dot_a.scale(i2) + w.scale(GaussianRational(0, 1) * aa)
    geo = _geometric(denom_minus_one)
    f = [(zs[j] + w.scale(a[j])) * geo for j in range(n)]
    return MapJet(f, w * geo)


def _geometric(x: HoloSeries) -> HoloSeries:
    """``1 / (1 - x)`` for ``x`` without constant term."""
    total = x.one()
    power = x.one()
    for _ in range(x.max_weight):
        power = power * x
        if not power:
            break
        total = total + power
    return total


# ---------------------------------------------------------------------------
# Levi form diagnostic


@dataclass(frozen=True)
class LeviDiagnostic:
    diagonal: tuple  # rational entries after congruence diagonalization
    rescalable: bool  # every entry is +-(a norm from Q(i)) so +-1 is reachable exactly
    nondegenerate: bool


def _is_sum_of_two_squares(k: int) -> bool:
    for x in range(isqrt(k) + 1):
        r = k - x * x
        if isqrt(r) ** 2 == r:
            return True
    return False


def _is_gaussian_norm(q) -> bool:
    q = mpq(q)
    if q <= 0:
        return False
    return _is_sum_of_two_squares(int(q.numerator) * int(q.denominator))


def levi_diagnostic(phi: PuSeries) -> LeviDiagnostic:
    """Congruence-diagonalize the hermitian Levi matrix of ``phi`` exactly.

    Reports the diagonal rational entries and whether each can be scaled to
    ``+-1`` by a Gaussian-rational change of the coordinates.
    """
    n = phi.n
    levi = phi.bicomponent(1, 1, 0)
    h = [[ZERO] * n for _ in range(n)]
    for j in range(n):
        for k in range(n):
            aj = tuple(int(i == j) for i in range(n))
            ak = tuple(int(i == k) for i in range(n))
            h[j][k] = levi.coefficient((aj, ak, 0))
    h = [row[:] for row in h]
    diag = []
    size = n
    idx = list(range(n))
    while idx:
        p = next((i for i in idx if not h[i][i].is_zero()), None)
        if p is None:
            pair = next(((i, j) for i in idx for j in idx if i != j and not h[i][j].is_zero()), None)
            if pair is None:
                diag.extend([mpq(0)] * len(idx))
                break
            i, j = pair
            # replace e_i by e_i + t e_j to create a nonzero diagonal entry
            t = ONE if not (h[i][j] + h[j][i]).is_zero() else GaussianRational(0, 1)
            for r in range(size):
                h[i][r] = h[i][r] + t * h[j][r]
            for r in range(size):
                h[r][i] = h[r][i] + t.conjugate() * h[r][j]
            p = i
        piv = h[p][p]
        for i in idx:
            if i == p or h[i][p].is_zero():
                continue
            f = h[i][p] / piv
            for r in range(size):
                h[i][r] = h[i][r] - f * h[p][r]
            for r in range(size):
                h[r][i] = h[r][i] - f.conjugate() * h[r][p]
        diag.append(piv.re)
        idx.remove(p)
    nondeg = all(d != 0 for d in diag)
    rescalable = nondeg and all(_is_gaussian_norm(abs(d)) for d in diag)
    return LeviDiagnostic(tuple(diag), rescalable, nondeg)
