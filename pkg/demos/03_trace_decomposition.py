"""Split P = Q <z,z>^s + R with tr^s R = 0, by recursion and by a linear solve."""
from crnormal import PuSeries, trace_decompose, trace_decompose_oracle, trace_power

W, sig = 6, [1, -1]
z1, z2 = PuSeries.z(2, W, 0), PuSeries.z(2, W, 1)
zb1, zb2 = PuSeries.zbar(2, W, 0), PuSeries.zbar(2, W, 1)
P = z1 * z1 * zb1 * zb2 + (z2 * zb2) ** 2 - (z1 * z2 * zb1 * zb1).scale(3)

for s in (1, 2):
    d = trace_decompose(P, s, sig)
    o = trace_decompose_oracle(P, s, sig)
    print(f"s={s}: Q = {d.q}")
    print(f"     R = {d.r}")
    print(f"     tr^s R == 0: {not trace_power(d.r, sig, s)}; rebuilds P: {d.reconstruct(sig) == P}; oracle agrees: {(d.q, d.r) == (o.q, o.r)}")
