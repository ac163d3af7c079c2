"""Normalize one hypersurface jet under every preset and compare with the oracle."""
from crnormal import PRESETS, HypersurfaceJet, PuSeries, check, normalize, normalize_oracle, preset

W, sig = 6, [1, 1]
z1, z2 = PuSeries.z(2, W, 0), PuSeries.z(2, W, 1)
zb1, zb2 = PuSeries.zbar(2, W, 0), PuSeries.zbar(2, W, 1)
u = PuSeries.u(2, W)

# a real perturbation of the quadric: each term is added together with its conjugate
p = z1**2 * zb2 + z1 * z2 * zb1 * zb1 * u.scale(3) + z1**3 * zb1 * zb2
phi = PuSeries.levi_form(sig, W) + p + p.conjugate() + (z1 * zb1 * z2 * zb2).scale(2)
M = HypersurfaceJet(phi, sig)

for tag in PRESETS:
    spec = preset(tag, W)
    res = normalize(M, spec)
    same = normalize_oracle(M, spec).normal_form == res.normal_form
    print(f"{tag:12s} terms={len(res.normal_form.phi.coeffs):3d} violations={len(check(res.normal_form, spec))} oracle agrees={same}")

res = normalize(M, preset("chern_moser", W))
print("\nChern-Moser normal form, bidegree components:")
for (k, m, l), part in sorted(res.normal_form.phi.bicomponents().items()):
    print(f"  phi_{k}{m}{l} = {part}")
print("\nnormalizing map g =", res.map.g)
