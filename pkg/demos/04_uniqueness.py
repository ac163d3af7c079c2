"""The normal form does not depend on fg-normalized coordinate changes.

Composing with the r-automorphism (z, w)/(1 - w) breaks the fg-normalization
(Re g_02 becomes 1) and moves the jet to a different normal form.
"""
from crnormal import (
    GaussianRational,
    HoloSeries,
    HypersurfaceJet,
    MapJet,
    PuSeries,
    apply_map,
    compose,
    is_fg_normalized,
    normalize,
    preset,
    r_automorphism,
)

W, sig = 10, [1]
z, zb, u = PuSeries.z(1, W, 0), PuSeries.zbar(1, W, 0), PuSeries.u(1, W)
p = z**4 * zb**2 + (z**3 * zb**3 * u).scale(GaussianRational(1, 0) / 2) + z**2 * zb * u
M = HypersurfaceJet(PuSeries.levi_form(sig, W) + p + p.conjugate(), sig)
spec = preset("min_l", W)
base = normalize(M, spec).normal_form

zh, wh = HoloSeries.z(1, W, 0), HoloSeries.w(1, W)
h = MapJet([zh + zh**2 + (zh * wh).scale(GaussianRational(0, 2))], wh + zh**3 + (wh**2).scale(GaussianRational(0, 1)))
print("h fg-normalized:", is_fg_normalized(h))
print("normal form of h(M) equals that of M:", normalize(apply_map(M, h), spec).normal_form == base)

r = compose(r_automorphism(1, 1, W), h)
print("r o h fg-normalized:", is_fg_normalized(r))
print("normal form of (r o h)(M) equals that of M:", normalize(apply_map(M, r), spec).normal_form == base)
