"""The trace operator ``tr = sum_j eps_j d^2/dz_j dzbar_j`` and the decomposition
``P = Q <z,z>^s + R`` with ``tr^s R = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Sequence

from gmpy2 import mpq

from .errors import InternalInvariantError, ValidationError
from .linalg import solve_sparse
from .series import PuSeries, Signature, _add_into, _prune, _pu_layout

__all__ = [
    "trace",
    "trace_power",
    "euler_weights",
    "levi_form",
    "TraceDecomposition",
    "trace_decompose",
    "trace_decompose_oracle",
    "decomposition_constant",
]


def _sig(sig, n: int) -> Signature:
    sig = sig if isinstance(sig, Signature) else Signature(sig)
    if len(sig) != n:
        raise ValidationError(f"signature has {len(sig)} entries but the series has n={n}")
    return sig


def levi_form(sig: Sequence[int], max_weight: int) -> PuSeries:
    return PuSeries.levi_form(sig, max_weight)


def trace(p: PuSeries, sig: Sequence[int]) -> PuSeries:
    """``sum_j eps_j d^2 p / dz_j dzbar_j``, term by term."""
    n = p.n
    sig = _sig(sig, n)
    layout = p.layout
    units = layout.units
    dec = layout.decode
    out: dict = {}
    get = out.get
    for key, (r, i) in p._t.items():
        e = dec(key)
        for j in range(n):
            a, b = e[j], e[n + j]
            if a and b:
                f = a * b * sig[j]
                k2 = key - units[j] - units[n + j]
                c = get(k2)
                if c is None:
                    out[k2] = (r * f, i * f)
                else:
                    out[k2] = (c[0] + r * f, c[1] + i * f)
    return p._like(_prune(out))


def trace_power(p: PuSeries, sig: Sequence[int], t: int) -> PuSeries:
    for _ in range(t):
        if not p:
            break
        p = trace(p, sig)
    return p


def euler_weights(p: PuSeries) -> tuple[PuSeries, PuSeries]:
    """``(sum_j z_j dp/dz_j, sum_j zbar_j dp/dzbar_j)``."""
    n = p.n
    dec = p.layout.decode
    hz: dict = {}
    hzb: dict = {}
    for key, (r, i) in p._t.items():
        e = dec(key)
        a = sum(e[:n])
        b = sum(e[n : 2 * n])
        if a:
            hz[key] = (r * a, i * a)
        if b:
            hzb[key] = (r * b, i * b)
    return p._like(hz), p._like(hzb)


def decomposition_constant(n: int, p: int, q: int, k: int) -> int:
    """``c_k`` in ``tr^k(Q <z,z>) = c_k tr^(k-1) Q + (tr^k Q) <z,z>`` for Q of bidegree (p-1, q-1).

    Built by the recursion ``c_1 = n+p+q-2``, ``c_(k+1) = c_k + n+p+q-2k-2``.
    """
    c = n + p + q - 2
    for j in range(1, k):
        c += n + p + q - 2 * j - 2
    return c


@dataclass(frozen=True)
class TraceDecomposition:
    q: PuSeries
    r: PuSeries
    s: int

    def reconstruct(self, sig) -> PuSeries:
        lf = PuSeries.levi_form(sig, self.q.max_weight)
        return self.q * lf**self.s + self.r


def _bihomogeneous_parts(p: PuSeries):
    """Group terms by (|alpha|, |beta|); u stays a passive parameter."""
    n = p.n
    dec = p.layout.decode
    groups: dict = {}
    for key, c in p._t.items():
        e = dec(key)
        groups.setdefault((sum(e[:n]), sum(e[n : 2 * n])), {})[key] = c
    return [(bd, p._like(t)) for bd, t in sorted(groups.items())]


def _decompose_s1(P: PuSeries, bideg: tuple[int, int], sig: Signature):
    p, q = bideg
    n = P.n
    k0 = min(p, q)
    if k0 == 0:
        return P.zero(), P
    lf = PuSeries.levi_form(sig, P.max_weight)
    traces = [P]
    for _ in range(k0):
        traces.append(trace(traces[-1], sig))
    Qk = P.zero()  # tr^k0 Q = 0
    for k in range(k0, 0, -1):
        c = decomposition_constant(n, p, q, k)
        if c == 0:
            return None
        Qk = (traces[k] - Qk * lf).scale(mpq(1, c))
    Q = Qk
    return Q, P - Q * lf


def trace_decompose(p: PuSeries, s: int, sig: Sequence[int]) -> TraceDecomposition:
    """Split ``p = Q <z,z>^s + R`` with ``tr^s R = 0`` by the backward trace recursion.

    Non-bihomogeneous input is handled one bidegree at a time.  If a recursion
    constant vanishes the exact linear-algebra route is used instead.
    """
    if not isinstance(s, int) or s < 1:
        raise ValidationError(f"power s must be a positive integer, got {s!r}")
    sig = _sig(sig, p.n)
    qs: dict = {}
    rs: dict = {}
    for bideg, part in _bihomogeneous_parts(p):
        res = _decompose_bihomogeneous(part, bideg, s, sig)
        if res is None:
            res = [_oracle_bihomogeneous(sub, bideg, s, sig) for _, sub in _split_u(part)]
        else:
            res = [res]
        for Q, R in res:
            _add_into(qs, Q._t)
            _add_into(rs, R._t)
    return TraceDecomposition(p._like(_prune(qs)), p._like(_prune(rs)), s)


def _decompose_bihomogeneous(P, bideg, s, sig):
    if s == 1:
        return _decompose_s1(P, bideg, sig)
    inner = _decompose_bihomogeneous(P, bideg, s - 1, sig)
    if inner is None:
        return None
    Q, R = inner
    p, q = bideg
    outer = _decompose_s1(Q, (p - s + 1, q - s + 1), sig) if Q else (Q, Q)
    if outer is None:
        return None
    Q2, R2 = outer
    lf = PuSeries.levi_form(sig, P.max_weight)
    return Q2, R2 * lf ** (s - 1) + R


# ---------------------------------------------------------------------------
# independent route: exact linear system over the monomial basis


def _multi_indices(n: int, d: int) -> list[tuple[int, ...]]:
    out = []
    for combo in combinations_with_replacement(range(n), d):
        a = [0] * n
        for j in combo:
            a[j] += 1
        out.append(tuple(a))
    return sorted(out)


def _oracle_bihomogeneous(P: PuSeries, bideg, s, sig):
    p, q = bideg
    n = P.n
    W = P.max_weight
    if p < s or q < s:
        return P.zero(), P
    ls = {P.layout.decode(k)[2 * n] for k in P._t}
    (l,) = ls
    layout = _pu_layout(n)
    ustep = layout.units[2 * n]

    def basis(a, b):
        return [layout.encode(al + be + (0,)) for al in _multi_indices(n, a) for be in _multi_indices(n, b)]

    qbasis = basis(p - s, q - s)
    rbasis = basis(p, q)
    nq = len(qbasis)
    ncols = nq + len(rbasis)
    lfs = PuSeries.levi_form(sig, W + 2 * s) ** s

    def as_series(key):
        return PuSeries._make(n, W + 2 * s, {key: (mpq(1), mpq(0))})

    eq_index: dict = {}
    rows: list[dict] = []
    rhs: list[list] = []

    def row_for(tag):
        idx = eq_index.get(tag)
        if idx is None:
            idx = eq_index[tag] = len(rows)
            rows.append({})
            rhs.append([mpq(0), mpq(0)])
        return rows[idx]

    for ci, key in enumerate(qbasis):
        prod = as_series(key) * lfs
        for k2, (r, _) in prod._t.items():
            row_for(("P", k2))[ci] = r
    for ci, key in enumerate(rbasis):
        row_for(("P", key))[nq + ci] = mpq(1)
        tr = trace_power(as_series(key), sig, s)
        for k2, (r, _) in tr._t.items():
            row_for(("T", k2))[nq + ci] = r
    for key, (r, i) in P._t.items():
        idx = eq_index.get(("P", key - l * ustep))
        if idx is None:
            raise InternalInvariantError("input monomial outside the bidegree basis")
        rhs[idx] = [r, i]
    x = solve_sparse(rows, rhs, ncols)
    shift = l * ustep
    limit = layout.limit(W)
    qt = {k + shift: (x[c][0], x[c][1]) for c, k in enumerate(qbasis) if k + shift < limit}
    rt = {k + shift: (x[nq + c][0], x[nq + c][1]) for c, k in enumerate(rbasis) if k + shift < limit}
    return P._like(_prune(qt)), P._like(_prune(rt))


def trace_decompose_oracle(p: PuSeries, s: int, sig: Sequence[int]) -> TraceDecomposition:
    """Same contract as :func:`trace_decompose`, solved as one exact linear system per bidegree."""
    if not isinstance(s, int) or s < 1:
        raise ValidationError(f"power s must be a positive integer, got {s!r}")
    sig = _sig(sig, p.n)
    qs: dict = {}
    rs: dict = {}
    for bideg, part in _bihomogeneous_parts(p):
        for l, sub in _split_u(part):
            Q, R = _oracle_bihomogeneous(sub, bideg, s, sig)
            _add_into(qs, Q._t)
            _add_into(rs, R._t)
    return TraceDecomposition(p._like(_prune(qs)), p._like(_prune(rs)), s)


def _split_u(part: PuSeries):
    n = part.n
    dec = part.layout.decode
    groups: dict = {}
    for key, c in part._t.items():
        groups.setdefault(dec(key)[2 * n], {})[key] = c
    return [(l, part._like(t)) for l, t in sorted(groups.items())]
