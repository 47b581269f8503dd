"""
rho-variation of sampled curves
===============================

The rho-variation of a sequence is the largest l^rho sum of increments over
an increasing choice of indices.  Small rho rewards many small oscillations;
large rho approaches the largest single jump.
"""
import math

import numpy as np

import varrestrict as vr

# a zig-zag: every sample is a turning point
zigzag = vr.SampledCurve.from_values([0, 1, 0, 1, 0, 1])
for rho in (1, 2, 3, math.inf):
    res = vr.var_seminorm(zigzag, rho)
    print(f"rho={rho}: value {res.value:.6f}, witness {res.witness}")

# the norm adds |a(first chosen sample)|^rho to the seminorm
print("norm at rho=2:", vr.var_norm(zigzag, 2).value)

# the dynamic programme agrees with brute force over all index subsets
rng = np.random.default_rng(0)
values = rng.normal(size=12) + 1j * rng.normal(size=12)
curve = vr.SampledCurve.from_values(values)
print("DP     :", vr.var_seminorm(curve, 2.5).value)
print("oracle :", vr.var_oracle_exhaustive(curve, 2.5, with_first_term=False))

# a smooth curve sampled ever more finely: the 2-variation settles down,
# while the 1-variation converges to the arc length
for n in (8, 32, 128, 512):
    t = np.linspace(0, 2 * math.pi, n)
    c = vr.SampledCurve(1.0 + t, np.exp(1j * t))
    print(f"n={n:4d}: V^1 = {vr.var_seminorm(c, 1).value:.5f}, V^2 = {vr.var_seminorm(c, 2).value:.5f}")

# biparameter variation of a tensor surface factorises
u = np.array([0.0, 1.0, -0.5, 2.0])
v = np.array([1.0, 0.0, 1.0])
surface = vr.SampledSurface.from_values(np.outer(u, v))
print("surface:", vr.bivar_seminorm(surface, 2).value,
      "product:", vr.var_seminorm(vr.SampledCurve.from_values(u), 2).value
      * vr.var_seminorm(vr.SampledCurve.from_values(v), 2).value)
