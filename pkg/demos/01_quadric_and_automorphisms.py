"""The quadric Im w = <z,z> and the maps that preserve it.

Both residual automorphism families send the quadric to itself exactly, but
neither is fg-normalized, which is why the normalizing map can be unique.
"""
from crnormal import (
    GaussianRational,
    a_automorphism,
    apply_map,
    is_fg_normalized,
    normalize,
    preset,
    quadric,
    r_automorphism,
)

W = 8
sig = [1, -1]
Q = quadric(sig, W)
print("quadric:", Q.phi)

half_i = GaussianRational(0, 1) / 2
for name, h in [
    ("(z, w)/(1 - r w), r = 3/2", r_automorphism(2, GaussianRational(3) / 2, W)),
    ("a-automorphism, a = (1, i/2)", a_automorphism(sig, [1, half_i], W)),
]:
    image = apply_map(Q, h)
    print(f"{name}: image == quadric: {image == Q}; fg-normalized: {is_fg_normalized(h)}")

res = normalize(Q, preset("chern-moser", W))
print("normalize(quadric): same jet:", res.normal_form == Q, "identity map:", res.map.is_identity())
