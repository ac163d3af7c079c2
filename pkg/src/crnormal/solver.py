"""Weight-graded normalization of hypersurface jets.

For each weight ``W = 2, 3, ...`` the map unknowns of weight ``W`` enter the
weight-``W`` part of the transformed jet linearly:

    phi'_W = phi_W + Im G(z, u + i<z,z>) - <F(z, u + i<z,z>), z> - <z, F(z, u + i<z,z>)>

for ``g = w + G``, ``f = z + F``.  Restricted to one line ``(k, l)`` the multidegree
``(k+mu, mu, l-mu)`` component reads

    phi'_mu = P_mu + a_mu X <z,z>^mu - b_mu Y <z,z>^(mu-1) - c_mu Z <z,z>^mu

with ``X, Y, Z`` the line's unknowns.  The chosen conditions are solved with the
trace decomposition; the weight-``W`` increment is applied and the loop moves on.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Sequence

from gmpy2 import mpq

from .errors import InternalInvariantError, ValidationError
from .hypersurface import HypersurfaceJet, MapJet, apply_map, compose, is_fg_normalized
from .normalform import LineChoice, NormalFormSpec, Violation, check, lines_of_weight, validate_choice
from .scalars import ONE, ZERO, GaussianRational
from .series import HoloSeries, PuSeries, Signature
from .trace import trace_decompose

__all__ = [
    "LineSystem",
    "NormalizationResult",
    "HarmonicResult",
    "build_line_system",
    "line_coefficients",
    "line_system_determinant",
    "solve_line_k_ge2",
    "solve_line_k1",
    "solve_line_k0",
    "eliminate_harmonics",
    "normalize",
    "weight_increment",
]

_I = GaussianRational(0, 1)
_TWO_I = GaussianRational(0, 2)


@dataclass(frozen=True)
class LineSystem:
    """Right-hand sides of one line: ``rhs[mu] = phi_{k+mu, mu, l-mu}`` of the current jet.

    ``applied_weights`` lists the weights of the increments already folded into the
    jet the right-hand sides were read from.
    """

    k: int
    l: int
    sig: Signature
    rhs: dict
    applied_weights: tuple = ()

    @property
    def weight(self) -> int:
        return self.k + 2 * self.l

    @property
    def unknowns(self) -> tuple[str, ...]:
        k, l = self.k, self.l
        if k >= 2:
            return ("g_kl",) if l == 0 else ("g_kl", "f_k+1,l-1")
        if k == 1:
            if l == 0:
                return ()
            return ("g_1l", "f_2,l-1") if l == 1 else ("g_1l", "f_2,l-1", "f_0l")
        if l <= 1:
            return ()
        return ("Im g_0l", "f_1,l-1") if l == 2 else ("Im g_0l", "Re g_0l", "f_1,l-1")


def build_line_system(jet: HypersurfaceJet, k: int, l: int, applied_weights: Sequence[int] = ()) -> LineSystem:
    rhs = {mu: jet.coefficient(k + mu, mu, l - mu) for mu in range(l + 1)}
    return LineSystem(k, l, jet.sig, rhs, tuple(applied_weights))


def line_coefficients(k: int, l: int, mu: int):
    """``(a_mu, b_mu, c_mu)`` of the line equation for ``k >= 1``.

    ``a = C(l,mu) i^mu / 2i`` multiplies ``g_kl``, ``b = C(l-1,mu-1) i^(mu-1)`` multiplies
    ``<f_{k+1,l-1}, z>`` and ``c = C(l,mu) (-i)^mu`` multiplies ``<z, f_0l>`` (``k = 1`` only).
    """
    a = (_I**mu) * comb(l, mu) / _TWO_I
    b = (_I ** (mu - 1)) * comb(l - 1, mu - 1) if mu >= 1 else ZERO
    c = ((-_I) ** mu) * comb(l, mu) if k == 1 else ZERO
    return a, b, c


def _k0_coefficients(l: int, mu: int):
    """Coefficients on the line ``k = 0`` for the real unknowns of matching parity."""
    sigma = (-1) ** (mu // 2)
    a = GaussianRational(sigma * comb(l, mu))
    b = GaussianRational(2 * sigma * comb(l - 1, mu - 1)) if mu >= 1 else ZERO
    return a, b, ZERO


def line_system_determinant(choice: LineChoice) -> GaussianRational:
    """Determinant of the ``(X, Y, Z)`` system a ``k = 1`` choice actually imposes.

    Rows are ``(a_mu, -b_mu, -c_mu)`` of :func:`line_coefficients`; it vanishes iff
    the three indices all have the same parity.
    """
    if choice.kind != "k=1" or choice.is_fixed:
        raise ValidationError("line_system_determinant applies to k=1 lines with l >= 2")
    rows = []
    for mu in choice.indices:
        a, b, c = line_coefficients(1, choice.l, mu)
        rows.append((a, -b, -c))
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


class _Levi:
    def __init__(self, sig: Signature, max_weight: int):
        self.base = PuSeries.levi_form(sig, max_weight)
        self.powers = [self.base.one(), self.base]

    def __call__(self, p: int) -> PuSeries:
        while len(self.powers) <= p:
            self.powers.append(self.powers[-1] * self.base)
        return self.powers[p]


def _q_part(p: PuSeries, s: int, sig: Signature) -> PuSeries:
    """``Q`` in ``p = Q <z,z>^s + R`` with ``tr^s R = 0``; ``s = 0`` returns ``p``."""
    if s == 0 or not p:
        return p
    return trace_decompose(p, s, sig).q


def _solve_line(sys: LineSystem, first: int, others: Sequence[int], coeffs, pinned_z: bool = True):
    """Solve ``Q_{m-1}(phi'_m) = 0`` and ``Q_mu(phi'_mu) = 0`` for ``mu`` in ``others``.

    Returns ``(X, Y, Z)`` as polynomials; ``Z`` is zero unless two further
    conditions are given.
    """
    sig = sys.sig
    P = sys.rhs
    W = P[0].max_weight
    levi = _Levi(sig, W)
    m = first
    am, bm, cm = coeffs(m)
    if bm.is_zero():
        raise InternalInvariantError(f"line ({sys.k},{sys.l}): first index {m} carries no f-term")
    q_first = _q_part(P[m], m - 1, sig)
    # phi'_mu after eliminating Y with the first condition:
    #   Q_mu(P_mu - (b_mu/b_m) q_first <>^(mu-1)) + (a_mu - b_mu a_m / b_m) X - (c_mu - b_mu c_m / b_m) Z
    rows = []
    for mu in others:
        a, b, c = coeffs(mu)
        ratio = b / bm
        rhs = P[mu]
        if not ratio.is_zero():
            rhs = rhs - (q_first * levi(mu - 1)).scale(ratio)
        rows.append((_q_part(rhs, mu, sig), a - ratio * am, c - ratio * cm))
    zero = P[0].zero()
    if len(rows) == 1:
        r, ax, _ = rows[0]
        if ax.is_zero():
            raise InternalInvariantError(f"line ({sys.k},{sys.l}): singular system for indices {first}, {others}")
        X = r.scale(-ONE / ax)
        Z = zero
    elif len(rows) == 2:
        (r1, ax1, az1), (r2, ax2, az2) = rows
        # ax X - az Z = -r
        det = ax1 * (-az2) - (-az1) * ax2
        if det.is_zero():
            raise InternalInvariantError(f"line ({sys.k},{sys.l}): singular 2x2 system for indices {first}, {others}")
        X = (r1.scale(az2) - r2.scale(az1)).scale(ONE / det)
        Z = (r1.scale(ax2) - r2.scale(ax1)).scale(ONE / det)
    else:
        raise ValidationError("a line takes one or two further conditions")
    Y = (q_first + (X.scale(am) - Z.scale(cm)) * levi(1)).scale(ONE / bm)
    return X, Y, Z


def _recover_f(F: PuSeries, sig: Signature) -> list[PuSeries]:
    """``f`` with ``<f(z), z> = F``: ``f_j = eps_j dF/dzbar_j``."""
    n = F.n
    layout = F.layout
    dec = layout.decode
    out = []
    for j in range(n):
        terms = {}
        for key, (r, i) in F._t.items():
            e = dec(key)
            b = e[n + j]
            if b == 0:
                continue
            if any(e[n + q] for q in range(n) if q != j) or b != 1:
                raise InternalInvariantError("<f, z> is not linear in zbar")
            s = sig[j]
            terms[key - layout.units[n + j]] = (r * s, i * s)
        out.append(F._like(terms))
    return out


def _recover_f0(H: PuSeries, sig: Signature) -> list[GaussianRational]:
    """``f0`` with ``<z, f0> = H = sum_j eps_j z_j conj(f0_j)``."""
    n = H.n
    out = []
    for j in range(n):
        a = tuple(int(q == j) for q in range(n))
        c = H.coefficient((a, (0,) * n, 0))
        out.append(c.conjugate() * sig[j])
    if any(H.bidegrees() - {(1, 0)}):
        raise InternalInvariantError("<z, f_0l> is not linear in z")
    return out


def _as_constant(X: PuSeries, real: bool = True) -> GaussianRational:
    n = X.n
    if X.bidegrees() - {(0, 0)}:
        raise InternalInvariantError(f"expected a constant, got {X}")
    c = X.coefficient(((0,) * n, (0,) * n, 0))
    if real and not c.is_real():
        raise InternalInvariantError(f"expected a real constant, got {c}")
    return c


def _indices(choice) -> tuple:
    return tuple(choice.indices) if isinstance(choice, LineChoice) else tuple(choice)


def solve_line_k_ge2(sys: LineSystem, choice, sig=None):
    """Unknowns ``(g_kl(z), f_{k+1,l-1}(z))`` of a line with ``k >= 2``."""
    k, l = sys.k, sys.l
    if k < 2:
        raise ValidationError("solve_line_k_ge2 needs k >= 2")
    zero = sys.rhs[0].zero()
    n = zero.n
    if l == 0:
        # phi'_{k00} = P_0 + g_k0 / 2i
        return sys.rhs[0].scale(-_TWO_I), [zero] * n
    m, mp = _indices(choice)
    if not validate_choice(LineChoice(k, l, (m, mp))):
        raise ValidationError(f"inadmissible choice {(m, mp)} on line ({k},{l})")
    G, F, _ = _solve_line(sys, m, [mp], lambda mu: line_coefficients(k, l, mu))
    return G, _recover_f(F, sys.sig)


def solve_line_k1(sys: LineSystem, choice=None, sig=None):
    """Unknowns ``(g_1l(z), f_{2,l-1}(z), f_0l)`` of the line ``k = 1``.

    For ``l = 1`` the conditions are fixed and ``f_01`` is pinned to zero.
    """
    k, l = sys.k, sys.l
    if k != 1 or l < 1:
        raise ValidationError("solve_line_k1 needs k = 1 and l >= 1")
    if l == 1:
        G, F, _ = _solve_line(sys, 1, [0], lambda mu: line_coefficients(1, 1, mu))
        return G, _recover_f(F, sys.sig), [ZERO] * sys.sig.n
    m, mp, mpp = _indices(choice)
    if not validate_choice(LineChoice(1, l, (m, mp, mpp))):
        raise ValidationError(f"inadmissible choice {(m, mp, mpp)} on line (1,{l})")
    G, F, H = _solve_line(sys, m, [mp, mpp], lambda mu: line_coefficients(1, l, mu))
    return G, _recover_f(F, sys.sig), _recover_f0(H, sys.sig)


def solve_line_k0(sys: LineSystem, choice=None, sig=None):
    """Unknowns ``(g_0l, f_{1,l-1}(z))`` of the line ``k = 0``.

    The even pair fixes ``Im g_0l`` and ``Im <f_{1,l-1}, z>``; the odd pair fixes
    ``Re g_0l`` and ``Re <f_{1,l-1}, z>``.  For ``l = 2`` only one odd condition
    exists and ``Re g_02`` is pinned to zero.
    """
    k, l = sys.k, sys.l
    if k != 0 or l < 2:
        raise ValidationError("solve_line_k0 needs k = 0 and l >= 2")
    coeffs = lambda mu: _k0_coefficients(l, mu)  # noqa: E731
    if l == 2:
        x, A, _ = _solve_line(sys, 2, [0], coeffs)
        # odd condition phi'_{111} = P_1 - 2 B with Re g_02 = 0
        B = sys.rhs[1].scale(mpq(1, 2))
        y = ZERO
    else:
        m, mp, mt, mtp = _indices(choice)
        if not validate_choice(LineChoice(0, l, (m, mp, mt, mtp))):
            raise ValidationError(f"inadmissible choice {(m, mp, mt, mtp)} on line (0,{l})")
        x, A, _ = _solve_line(sys, m, [mp], coeffs)
        y, B, _ = _solve_line(sys, mt, [mtp], coeffs)
        y = _as_constant(y)
    x = _as_constant(x)
    if not (A.is_real() and B.is_real()):
        raise InternalInvariantError("real parts of <f, z> came out non-real")
    g0l = GaussianRational._raw(y.re, x.re)
    F = B + A.scale(_I)
    return g0l, _recover_f(F, sys.sig)


# ---------------------------------------------------------------------------


def weight_increment(n: int, max_weight: int, g_terms, f_terms) -> MapJet:
    """``id + sum g_kl(z) w^l`` and ``+ sum f_kl(z) w^l`` from polynomial pieces.

    ``g_terms`` holds ``(l, poly)`` pairs, ``f_terms`` holds ``(l, [poly_j])`` pairs;
    each ``poly`` is a holomorphic PuSeries (constants allowed).
    """
    g = HoloSeries.w(n, max_weight)
    f = [HoloSeries.z(n, max_weight, j) for j in range(n)]
    for l, poly in g_terms:
        if poly:
            g = g + HoloSeries.from_polynomial(poly, l, max_weight)
    for l, polys in f_terms:
        for j, poly in enumerate(polys):
            if poly:
                f[j] = f[j] + HoloSeries.from_polynomial(poly, l, max_weight)
    return MapJet(f, g, check=False)


def _constant_poly(n: int, W: int, c) -> PuSeries:
    return PuSeries.constant(n, W, c)


@dataclass
class NormalizationResult:
    normal_form: HypersurfaceJet
    map: MapJet
    certificate: list[Violation]
    free_parameters_used: dict = field(default_factory=dict)
    line_systems: list[LineSystem] = field(default_factory=list, repr=False)


def _solve_weight(current: HypersurfaceJet, spec: NormalFormSpec, W: int, applied: Sequence[int], hook):
    n, mw = current.n, current.max_weight
    g_terms: list = []
    f_terms: list = []
    for k, l in lines_of_weight(W):
        choice = spec.choice(k, l)
        if k == 1 and l == 0 or k == 0 and l <= 1:
            continue
        sys = build_line_system(current, k, l, applied)
        if hook is not None:
            hook(sys)
        if k >= 2:
            G, f = solve_line_k_ge2(sys, choice)
            g_terms.append((l, G))
            if l >= 1:
                f_terms.append((l - 1, f))
        elif k == 1:
            G, f, f0 = solve_line_k1(sys, choice)
            g_terms.append((l, G))
            f_terms.append((l - 1, f))
            f_terms.append((l, [_constant_poly(n, mw, c) for c in f0]))
        else:
            g0l, f = solve_line_k0(sys, choice)
            g_terms.append((l, _constant_poly(n, mw, g0l)))
            f_terms.append((l - 1, f))
    return weight_increment(n, mw, g_terms, f_terms)


def normalize(
    jet: HypersurfaceJet,
    spec: NormalFormSpec,
    *,
    on_line_system: Callable[[LineSystem], None] | None = None,
    keep_line_systems: bool = False,
) -> NormalizationResult:
    """The unique fg-normalized map taking ``jet`` into the normal form ``spec``.

    Successive substitution over weights ``2..max_weight``: the lines of weight
    ``W`` are solved against the current jet, the weight-``W`` increment is
    applied, and the next weight is read off the transformed jet.
    """
    if jet.sig is None:
        raise ValidationError("normalize needs a jet with diagonal nondegenerate Levi form")
    W = jet.max_weight
    spec = spec.extended(W)
    n = jet.n
    current = jet
    total = MapJet.identity(n, W)
    applied: list[int] = []
    systems: list[LineSystem] = []
    hook = on_line_system
    if keep_line_systems:
        def keep(sys, _user=on_line_system):
            systems.append(sys)
            if _user is not None:
                _user(sys)

        hook = keep
    for w in range(2, W + 1):
        inc = _solve_weight(current, spec, w, applied, hook)
        if not inc.is_identity():
            current = apply_map(current, inc)
            total = compose(inc, total)
        applied.append(w)
    certificate = check(current, spec)
    if certificate:
        raise InternalInvariantError(
            "normal-form certificate failed: " + "; ".join(str(v) for v in certificate[:3])
        )
    if not is_fg_normalized(total):
        raise InternalInvariantError("normalizing map is not fg-normalized")
    return NormalizationResult(
        current,
        total,
        certificate,
        {"a": (ZERO,) * n, "r": ZERO},
        systems,
    )


# ---------------------------------------------------------------------------


@dataclass
class HarmonicResult:
    jet: HypersurfaceJet
    map: MapJet


def eliminate_harmonics(jet: HypersurfaceJet) -> HarmonicResult:
    """Remove every ``phi_{k0l}`` (and its conjugate) with maps ``(z, w + G)``.

    Works by induction on the ordinary degree ``k + l``: at degree ``d`` take
    ``g_kl = -2i phi_k0l`` for ``k > 0`` and ``Im g_0l = -phi_00l``; changes
    caused by this step have degree above ``d``.  No Levi-form assumption.
    """
    n, W = jet.n, jet.max_weight
    current = jet
    total = MapJet.identity(n, W)
    zero = PuSeries.constant(n, W, 0)
    for d in range(2, W + 1):
        g_terms = []
        for l in range(d + 1):
            k = d - l
            if k + 2 * l > W:
                continue
            P = current.coefficient(k, 0, l)
            if not P:
                continue
            if k > 0:
                g_terms.append((l, P.scale(-_TWO_I)))
            else:
                c = _as_constant(P)
                g_terms.append((l, zero + PuSeries.constant(n, W, GaussianRational(0, -c.re))))
        if not g_terms:
            continue
        inc = weight_increment(n, W, g_terms, [])
        current = apply_map(current, inc)
        total = compose(inc, total)
    for (k, m, l), part in current.phi.bicomponents().items():
        if m == 0 and part:
            raise InternalInvariantError(f"harmonic term phi_{{{k},0,{l}}} survived")
    return HarmonicResult(current, total)
