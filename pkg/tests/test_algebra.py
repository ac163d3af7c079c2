import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crnormal.algebra import (
    GaussianRational,
    HoloSeries,
    PuSeries,
    add,
    bicomponent,
    conjugate,
    imag_part,
    invert_parametrization,
    mul,
    real_part,
    substitute,
)
from crnormal.errors import ValidationError

from helpers import holo_series, pu_series

I = GaussianRational(0, 1)


def z(j, n=2, W=6):
    return PuSeries.z(n, W, j)


def zb(j, n=2, W=6):
    return PuSeries.zbar(n, W, j)


def levi(n=2, W=6, sig=None):
    return PuSeries.levi_form(sig or [1] * n, W)


# add -------------------------------------------------------------------------


def test_add_examples():
    p = z(0) * zb(0)
    assert add(p, -p) == PuSeries(2, 6, {})
    assert not add(p, -p).coeffs
    assert add(z(0) ** 2, zb(0) ** 2).coefficient(((0, 0), (2, 0), 0)) == 1


def test_add_refuses_mismatch():
    with pytest.raises(ValidationError):
        add(z(0, n=2), z(0, n=3))
    with pytest.raises(ValidationError):
        add(z(0, W=4), z(0, W=6))
    with pytest.raises(ValidationError):
        mul(z(0, W=4), z(0, W=6))


@given(pu_series(), pu_series())
def test_add_commutes(a, b):
    assert add(a, b) == add(b, a)


# mul -------------------------------------------------------------------------


def test_mul_examples():
    p = z(0) * zb(0)
    assert mul(p, p) == z(0) ** 2 * zb(0) ** 2
    u = PuSeries.u(1, 3)
    assert mul(u, u) == PuSeries(1, 3, {})


def test_levi_squared_frozen():
    # expanded by hand: (z1 zb1 + z2 zb2)^2
    expected = PuSeries(
        2,
        6,
        {
            ((2, 0), (2, 0), 0): 1,
            ((1, 1), (1, 1), 0): 2,
            ((0, 2), (0, 2), 0): 1,
        },
    )
    assert mul(levi(), levi()) == expected


@given(pu_series(W=8), pu_series(W=8), pu_series(W=8))
def test_mul_ring_laws(a, b, c):
    assert mul(a, b) == mul(b, a)
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
    assert mul(mul(a, b), c) == mul(a, mul(b, c))


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 99))
def test_mul_grading(p, q, seed):
    import random

    from helpers import random_phi

    rng = random.Random(seed)
    a = random_phi(rng, 2, 10, 0.4, min_weight=0).weight_part(p, p)
    b = random_phi(rng, 2, 10, 0.4, min_weight=0).weight_part(q, q)
    prod = mul(a, b)
    assert prod.weights() <= {p + q}


# conjugate / bicomponent / real and imaginary parts -----------------------------


def test_conjugate_examples():
    p = (z(0) ** 2 * zb(1)).scale(I)
    assert conjugate(p) == (z(1) * zb(0) ** 2).scale(-I)
    assert conjugate(levi(sig=[1, -1])) == levi(sig=[1, -1])


@given(pu_series())
def test_conjugate_is_involution(a):
    assert conjugate(conjugate(a)) == a


def test_bicomponent_examples():
    p = levi() + PuSeries.u(2, 6) ** 2
    assert bicomponent(p, 1, 1, 0) == levi()
    assert bicomponent(p, 0, 0, 2) == PuSeries.u(2, 6) ** 2
    assert bicomponent(p, 2, 2, 0) == PuSeries(2, 6, {})


@given(pu_series())
def test_bicomponents_partition(a):
    total = PuSeries(a.n, a.max_weight, {})
    for part in a.bicomponents().values():
        total = total + part
    assert total == a


def test_real_imag_examples():
    p = (z(0) * zb(0)).scale(I)
    assert imag_part(p) == z(0) * zb(0)
    assert real_part(z(0) ** 2) == (z(0) ** 2 + zb(0) ** 2).scale(GaussianRational(1) / 2)


@given(pu_series())
def test_real_imag_decomposition(a):
    re, im = real_part(a), imag_part(a)
    assert re.is_real() and im.is_real()
    assert a == re + im.scale(I)


@given(pu_series())
def test_reality_is_coefficient_symmetry(a):
    symmetric = all(
        c.conjugate() == a.coefficient((m.beta, m.alpha, m.l)) for m, c in a.coeffs.items()
    )
    assert a.is_real() == symmetric


# substitution ----------------------------------------------------------------


def test_substitute_identity():
    n, W = 2, 6
    w = HoloSeries.w(n, W)
    arg = PuSeries.u(n, W) + levi().scale(I)
    assert substitute(w, [z(0), z(1)], arg) == arg


def test_substitute_w_squared_frozen():
    n, W = 2, 4
    u, L = PuSeries.u(n, W), levi(W=W)
    w2 = HoloSeries.w(n, W) ** 2
    got = substitute(w2, [z(0, W=W), z(1, W=W)], u + L.scale(I))
    # hand expansion of (u + i<z,z>)^2
    assert got == u * u + (u * L).scale(2 * I) - L * L


def test_substitute_rejects_constant_term():
    n, W = 1, 4
    with pytest.raises(ValidationError):
        substitute(HoloSeries.w(n, W), [PuSeries.z(n, W, 0)], PuSeries.u(n, W) + PuSeries.constant(n, W, 1))


@settings(max_examples=40, deadline=None)
@given(holo_series(), holo_series(), pu_series(min_weight=2), pu_series(min_weight=2), pu_series(min_weight=2))
def test_substitute_is_homomorphism(f, g, pert0, pert1, pertw):
    zs = [z(0) + pert0.weight_part(2, 6), z(1) + pert1.weight_part(2, 6)]
    w = PuSeries.u(2, 6) + levi().scale(I) + pertw.weight_part(3, 6)
    sub = lambda h: substitute(h, zs, w)  # noqa: E731
    assert sub(f * g) == sub(f) * sub(g)
    assert sub(f + g) == sub(f) + sub(g)


# inversion -------------------------------------------------------------------


def test_invert_identity():
    zs, u = invert_parametrization([z(0), z(1)], PuSeries.u(2, 6))
    assert zs == [z(0), z(1)] and u == PuSeries.u(2, 6)


def test_invert_levi_shift_frozen():
    W = 3
    zs, u = invert_parametrization([z(0, W=W), z(1, W=W)], PuSeries.u(2, W) + levi(W=W))
    assert zs == [z(0, W=W), z(1, W=W)]
    assert u == PuSeries.u(2, W) - levi(W=W)


def test_invert_rejects_nonidentity_linear_part():
    with pytest.raises(ValidationError):
        invert_parametrization([z(0).scale(2), z(1)], PuSeries.u(2, 6))


@settings(max_examples=25, deadline=None)
@given(pu_series(min_weight=2), pu_series(min_weight=2), pu_series(min_weight=3))
def test_invert_recomposes_to_identity(p0, p1, pu):
    zp = [z(0) + p0, z(1) + p1]
    up = PuSeries.u(2, 6) + real_part(pu)
    zi, ui = invert_parametrization(zp, up)
    back = [c.compose(zi, None, ui) for c in zp]
    assert back == [z(0), z(1)]
    assert up.compose(zi, None, ui) == PuSeries.u(2, 6)
