"""Generic route to the normal form: one exact linear system per weight.

The unknowns are the real and imaginary parts of every weight-``W`` map
coefficient that is not pinned by the fg-normalization.  Their effect on the
weight-``W`` part of the jet is probed through :func:`apply_map` itself, so
nothing here shares code with the line solvers or the trace recursion.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement

from gmpy2 import mpq

from .errors import InternalInvariantError, ValidationError
from .hypersurface import HypersurfaceJet, MapJet, apply_map, compose, is_fg_normalized, quadric
from .linalg import solve_sparse
from .normalform import NormalFormSpec, check
from .scalars import ZERO, GaussianRational
from .series import HoloSeries, PuSeries
from .solver import NormalizationResult

__all__ = ["normalize_oracle", "weight_unknowns"]


def _multi_indices(n: int, d: int):
    out = []
    for combo in combinations_with_replacement(range(n), d):
        a = [0] * n
        for j in combo:
            a[j] += 1
        out.append(tuple(a))
    return sorted(out)


def weight_unknowns(n: int, W: int) -> list[tuple]:
    """Real unknowns ``(component, alpha, l, part)`` of weight ``W``.

    ``component`` is ``"g"`` or the index of an f-component.  Pinned: ``g_10``,
    ``g_01``, ``f_10``, ``f_01`` and ``Re g_02``.
    """
    out = []
    for l in range(W // 2 + 1):
        a = W - 2 * l
        if (a, l) in ((1, 0), (0, 1)):
            continue
        for alpha in _multi_indices(n, a):
            for part in ("re", "im"):
                if (a, l) == (0, 2) and part == "re":
                    continue
                out.append(("g", alpha, l, part))
    for l in range((W - 1) // 2 + 1):
        a = W - 1 - 2 * l
        if (a, l) in ((1, 0), (0, 1)):
            continue
        for j in range(n):
            for alpha in _multi_indices(n, a):
                for part in ("re", "im"):
                    out.append((j, alpha, l, part))
    return out


def _increment(n: int, W: int, unknowns, values) -> MapJet:
    g_coeffs: dict = {}
    f_coeffs: list[dict] = [{} for _ in range(n)]
    for (comp, alpha, l, part), v in zip(unknowns, values):
        if v == 0:
            continue
        target = g_coeffs if comp == "g" else f_coeffs[comp]
        c = target.get((alpha, l), GaussianRational(0))
        target[(alpha, l)] = c + (GaussianRational(v) if part == "re" else GaussianRational(0, v))
    g = HoloSeries.w(n, W) + HoloSeries(n, W, g_coeffs)
    f = [HoloSeries.z(n, W, j) + HoloSeries(n, W, f_coeffs[j]) for j in range(n)]
    return MapJet(f, g, check=False)


@lru_cache(maxsize=64)
def _quadric_probes(sig: tuple, W: int):
    return _probes(quadric(sig, W), W)


def _probes(base: HypersurfaceJet, W: int):
    n = base.n
    unknowns = weight_unknowns(n, W)
    phi_w = base.phi.weight_part(W)
    effects = []
    for i, slot in enumerate(unknowns):
        h = _increment(n, W, [slot], [mpq(1)])
        effects.append(apply_map(base, h).phi.weight_part(W) - phi_w)
    return unknowns, effects


def _conditions_of_weight(spec: NormalFormSpec, W: int):
    out = []
    for c in spec.lines(W):
        out.extend(c.conditions())
    return out


def _trace_power(p: PuSeries, sig, t: int) -> PuSeries:
    """Direct term-by-term ``tr^t`` (kept separate from the trace module)."""
    n = p.n
    layout = p.layout
    for _ in range(t):
        terms: dict = {}
        for key, (r, i) in p._t.items():
            e = layout.decode(key)
            for j in range(n):
                a, b = e[j], e[n + j]
                if a and b:
                    f = a * b * sig[j]
                    k2 = key - layout.units[j] - layout.units[n + j]
                    c = terms.get(k2, (mpq(0), mpq(0)))
                    terms[k2] = (c[0] + r * f, c[1] + i * f)
        p = p._like({k: c for k, c in terms.items() if c[0] or c[1]})
    return p


def _solve_weight(current: HypersurfaceJet, spec: NormalFormSpec, W: int) -> MapJet:
    n, sig = current.n, current.sig
    base_w = current.truncate(W)
    if W >= 3 and base_w.phi.weight_part(2) == PuSeries.levi_form(sig, W):
        unknowns, effects = _quadric_probes(tuple(sig), W)
    else:
        unknowns, effects = _probes(base_w, W)
    phi_w = base_w.phi.weight_part(W)
    rows: list[dict] = []
    rhs: list[tuple] = []
    for cond in _conditions_of_weight(spec, W):
        target = _trace_power(phi_w.coefficient_polynomial(cond.k, cond.m, cond.l), sig, cond.t)
        cols: dict = {}
        for i, eff in enumerate(effects):
            tr = _trace_power(eff.coefficient_polynomial(cond.k, cond.m, cond.l), sig, cond.t)
            for key, (r, im) in tr._t.items():
                cols.setdefault(key, {})[i] = (r, im)
        keys = set(cols) | set(target._t)
        for key in sorted(keys):
            entries = cols.get(key, {})
            tr_, ti_ = target._t.get(key, (mpq(0), mpq(0)))
            rows.append({i: v[0] for i, v in entries.items() if v[0]})
            rhs.append((-tr_,))
            rows.append({i: v[1] for i, v in entries.items() if v[1]})
            rhs.append((-ti_,))
    if not unknowns:
        return MapJet.identity(n, current.max_weight)
    x = solve_sparse(rows, rhs, len(unknowns))
    return _increment(n, current.max_weight, unknowns, [v[0] for v in x])


def normalize_oracle(jet: HypersurfaceJet, spec: NormalFormSpec) -> NormalizationResult:
    """Same contract as :func:`crnormal.solver.normalize`, solved generically per weight."""
    if jet.sig is None:
        raise ValidationError("normalize_oracle needs a jet with diagonal nondegenerate Levi form")
    W = jet.max_weight
    spec = spec.extended(W)
    n = jet.n
    current = jet
    total = MapJet.identity(n, W)
    for w in range(2, W + 1):
        inc = _solve_weight(current, spec, w)
        if not inc.is_identity():
            current = apply_map(current, inc)
            total = compose(inc, total)
    certificate = check(current, spec)
    if certificate:
        raise InternalInvariantError("oracle normal form fails its own certificate")
    if not is_fg_normalized(total):
        raise InternalInvariantError("oracle map is not fg-normalized")
    return NormalizationResult(current, total, certificate, {"a": (ZERO,) * n, "r": ZERO})
