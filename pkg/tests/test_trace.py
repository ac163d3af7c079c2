import importlib
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crnormal.scalars import GaussianRational
from crnormal.series import PuSeries
from crnormal.trace import (
    decomposition_constant,
    euler_weights,
    trace,
    trace_decompose,
    trace_decompose_oracle,
    trace_power,
)

from helpers import random_bihomogeneous, random_phi

trace_mod = importlib.import_module("crnormal.trace")


def levi(sig, W):
    return PuSeries.levi_form(sig, W)


def test_trace_examples():
    c = GaussianRational(2, -1)
    p = PuSeries(1, 8, {((2,), (3,), 0): c})
    assert trace(p, [1]) == PuSeries(1, 8, {((1,), (2,), 0): 6 * c})
    assert not trace(PuSeries.z(1, 4, 0) ** 2, [1])
    assert not trace(levi([1, 1], 4), [1, -1])


def test_euler_weights_examples():
    n, W = 2, 8
    p = PuSeries.z(n, W, 0) * PuSeries.zbar(n, W, 1)
    assert euler_weights(p) == (p, p)
    q = PuSeries.z(n, W, 0) ** 2
    assert euler_weights(q) == (q.scale(2), q.zero())
    r = random_bihomogeneous(random.Random(1), n, 3, 2, 10)
    assert euler_weights(r) == (r.scale(3), r.scale(2))


@pytest.mark.parametrize("k", range(1, 6))
def test_decomposition_constants_positive(k):
    for n in range(1, 5):
        for p in range(k, 7):
            for q in range(k, 7):
                assert decomposition_constant(n, p, q, k) > 0


def test_decompose_examples():
    W = 6
    for sig in ([1], [1, -1], [1, 1, -1]):
        d = trace_decompose(levi(sig, W), 1, sig)
        assert d.q == PuSeries.constant(len(sig), W, 1) and not d.r
    z2 = PuSeries.z(1, W, 0) ** 2
    d = trace_decompose(z2, 1, [1])
    assert not d.q and d.r == z2


def test_decompose_frozen_n2():
    # brute-force linear solve over the monomial basis gave Q = 1/2, R = (z1 zb1 - z2 zb2)/2
    W, sig = 4, [1, 1]
    p = PuSeries.z(2, W, 0) * PuSeries.zbar(2, W, 0)
    half = GaussianRational(1) / 2
    r = (p - PuSeries.z(2, W, 1) * PuSeries.zbar(2, W, 1)).scale(half)
    for d in (trace_decompose(p, 1, sig), trace_decompose_oracle(p, 1, sig)):
        assert d.q == PuSeries.constant(2, W, half)
        assert d.r == r
        assert not trace(d.r, sig)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(0, 4), st.integers(0, 4), st.integers(1, 3))
def test_recursion_matches_oracle(seed, n, p, q, s):
    rng = random.Random(seed)
    sig = [rng.choice([1, -1]) for _ in range(n)]
    P = random_bihomogeneous(rng, n, p, q, p + q, density=0.6)
    a, b = trace_decompose(P, s, sig), trace_decompose_oracle(P, s, sig)
    assert (a.q, a.r) == (b.q, b.r)
    assert a.reconstruct(sig) == P
    assert not trace_power(a.r, sig, s)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_mixed_series_decompose_per_bicomponent(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 2)
    sig = [rng.choice([1, -1]) for _ in range(n)]
    P = random_phi(rng, n, 7, 0.3, min_weight=0)
    d = trace_decompose(P, 2, sig)
    assert d.reconstruct(sig) == P
    assert not trace_power(d.r, sig, 2)
    o = trace_decompose_oracle(P, 2, sig)
    assert (d.q, d.r) == (o.q, o.r)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_real_input_gives_real_parts(seed):
    rng = random.Random(seed)
    sig = [1, -1]
    P = random_phi(rng, 2, 8, 0.4, min_weight=2)
    d = trace_decompose(P, 1, sig)
    assert d.q.is_real() and d.r.is_real()


def test_trace_degree_bookkeeping():
    rng = random.Random(4)
    for p, q in [(2, 3), (3, 3), (4, 1)]:
        P = random_bihomogeneous(rng, 2, p, q, 10, density=1.0)
        assert trace_power(P, [1, -1], min(p, q))
        assert not trace_power(P, [1, -1], min(p, q) + 1)


def test_zero_constant_falls_back_to_oracle(monkeypatch):
    rng = random.Random(9)
    P = random_bihomogeneous(rng, 2, 3, 2, 5, density=1.0)
    expected = trace_decompose(P, 1, [1, -1])
    monkeypatch.setattr(trace_mod, "decomposition_constant", lambda *a: 0)
    got = trace_decompose(P, 1, [1, -1])
    assert (got.q, got.r) == (expected.q, expected.r)
