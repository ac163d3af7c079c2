"""Harmonic terms phi_{k0l} can be removed even when the Levi form vanishes."""
from crnormal import HypersurfaceJet, PuSeries, eliminate_harmonics

W = 6
z1, z2 = PuSeries.z(2, W, 0), PuSeries.z(2, W, 1)
zb1, zb2 = PuSeries.zbar(2, W, 0), PuSeries.zbar(2, W, 1)
u = PuSeries.u(2, W)
p = z1 * z2 + z1**3 + z2**2 * u + z1**2 * zb2 + z1 * z1 * zb1 * zb2
phi = p + p.conjugate() + (u * u).scale(5)
jet = HypersurfaceJet(phi, None)  # no Levi-form requirement
res = eliminate_harmonics(jet)
print("before:", sorted(k for k, part in jet.phi.bicomponents().items() if part))
print("after: ", sorted(k for k, part in res.jet.phi.bicomponents().items() if part))
print("map g =", res.map.g)
