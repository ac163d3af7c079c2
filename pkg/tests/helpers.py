"""Random jets, maps and polynomials shared by the test modules."""
from __future__ import annotations

import random
from itertools import combinations_with_replacement

from hypothesis import strategies as st

from crnormal.hypersurface import HypersurfaceJet, MapJet
from crnormal.scalars import GaussianRational
from crnormal.series import HoloSeries, PuSeries


def multi_indices(n: int, d: int) -> list[tuple[int, ...]]:
    out = []
    for combo in combinations_with_replacement(range(n), d):
        a = [0] * n
        for j in combo:
            a[j] += 1
        out.append(tuple(a))
    return sorted(out)


def rand_coeff(rng: random.Random, real: bool = False, size: int = 2) -> GaussianRational:
    re = rng.randint(-size, size)
    im = 0 if real else rng.randint(-size, size)
    if rng.random() < 0.2:
        return GaussianRational(re, im) / rng.randint(2, 3)
    return GaussianRational(re, im)


def random_phi(rng: random.Random, n: int, W: int, density: float = 0.3, min_weight: int = 3) -> PuSeries:
    """A real series with terms of weight ``min_weight..W`` and no ``u`` term."""
    c: dict = {}
    for w in range(min_weight, W + 1):
        for l in range(w // 2 + 1):
            d = w - 2 * l
            for k in range(d + 1):
                for a in multi_indices(n, k):
                    for b in multi_indices(n, d - k):
                        if (a, b) > (b, a) or rng.random() >= density:
                            continue
                        v = rand_coeff(rng, real=(a == b))
                        c[(a, b, l)] = v
                        if a != b:
                            c[(b, a, l)] = v.conjugate()
    return PuSeries(n, W, c)


def random_jet(rng: random.Random, n: int, W: int, sig, density: float = 0.3) -> HypersurfaceJet:
    phi = PuSeries.levi_form(sig, W) + random_phi(rng, n, W, density)
    return HypersurfaceJet(phi, sig)


def random_degenerate_jet(rng: random.Random, n: int, W: int, density: float = 0.4) -> HypersurfaceJet:
    """Zero Levi form: weight-2 part only ``z_i z_j`` plus conjugates, then random higher terms."""
    phi = random_phi(rng, n, W, density, min_weight=3)
    for a in multi_indices(n, 2):
        if rng.random() < density:
            c = rand_coeff(rng)
            phi = phi + PuSeries(n, W, {(a, (0,) * n, 0): c, ((0,) * n, a, 0): c.conjugate()})
    return HypersurfaceJet(phi, None)


def random_fg_map(rng: random.Random, n: int, W: int, terms: int = 4) -> MapJet:
    """Identity plus a few higher terms, keeping the fg-normalization."""
    g: dict = {}
    f = [dict() for _ in range(n)]
    for _ in range(terms):
        comp = rng.choice(["g"] + list(range(n)))
        while True:
            a, b = rng.randint(0, 4), rng.randint(0, 3)
            if (a, b) not in ((1, 0), (0, 1), (0, 0)) and a + 2 * b <= W:
                break
        alpha = rng.choice(multi_indices(n, a))
        c = rand_coeff(rng)
        if comp == "g":
            if (a, b) == (0, 2):
                c = GaussianRational(0, c.im)
            g[(alpha, b)] = c
        else:
            f[comp][(alpha, b)] = c
    return MapJet(
        [HoloSeries.z(n, W, j) + HoloSeries(n, W, f[j]) for j in range(n)],
        HoloSeries.w(n, W) + HoloSeries(n, W, g),
    )


def random_bihomogeneous(rng: random.Random, n: int, p: int, q: int, W: int, density: float = 0.5) -> PuSeries:
    c = {}
    for a in multi_indices(n, p):
        for b in multi_indices(n, q):
            if rng.random() < density:
                c[(a, b, 0)] = rand_coeff(rng, size=3)
    return PuSeries(n, W, c)


# hypothesis strategies ---------------------------------------------------------

small_ints = st.integers(min_value=-3, max_value=3)
gaussians = st.builds(
    lambda a, b, d: GaussianRational(a, b) / d, small_ints, small_ints, st.integers(min_value=1, max_value=4)
)


@st.composite
def pu_series(draw, n: int = 2, W: int = 6, max_terms: int = 6, min_weight: int = 0):
    terms = {}
    for _ in range(draw(st.integers(min_value=0, max_value=max_terms))):
        alpha = tuple(draw(st.integers(0, 2)) for _ in range(n))
        beta = tuple(draw(st.integers(0, 2)) for _ in range(n))
        l = draw(st.integers(0, 2))
        wt = sum(alpha) + sum(beta) + 2 * l
        if min_weight <= wt <= W:
            terms[(alpha, beta, l)] = draw(gaussians)
    return PuSeries(n, W, terms)


@st.composite
def holo_series(draw, n: int = 2, W: int = 6, max_terms: int = 5):
    terms = {}
    for _ in range(draw(st.integers(min_value=0, max_value=max_terms))):
        alpha = tuple(draw(st.integers(0, 3)) for _ in range(n))
        l = draw(st.integers(0, 2))
        if sum(alpha) + 2 * l <= W:
            terms[(alpha, l)] = draw(gaussians)
    return HoloSeries(n, W, terms)


@st.composite
def jets(draw, n: int = 1, W: int = 6):
    seed = draw(st.integers(0, 2**32 - 1))
    sig = draw(st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n))
    return random_jet(random.Random(seed), n, W, sig, density=0.3)
