"""
Empirical restriction ratios on the sphere
==========================================

theorem1_ratio compares the L^2(sphere) norm of the eps-variation of the
averaged transform with ||f||_{4/3}; maximal_ratio replaces the variation by
the maximum over the ladder and is never larger.
"""
import numpy as np

import varrestrict as vr

grid = vr.build_sphere_grid(8)
ladder = vr.EpsLadder(1e-2, 1e2, 32)

f = vr.TestFunction.gaussian()
for spec in (vr.MeasureSpec.gaussian(1.0), vr.MeasureSpec.ball(), vr.MeasureSpec.sphere()):
    t1 = vr.theorem1_ratio(f, spec, 3.0, grid, ladder)
    mx = vr.maximal_ratio(f, spec, grid, ladder)
    print(f"{spec.kind:8s} theorem-1 ratio {t1.ratio:.6f}   maximal ratio {mx.ratio:.6f}")

# modulating the Gaussian moves its transform towards the sphere
spec = vr.MeasureSpec.gaussian(1.0)
fast = vr.Grid3D(method="closed_form")
for m in (0.0, 0.5, 1.0, 1.5):
    g = vr.TestFunction.gaussian(modulation=(0.0, 0.0, m))
    print(f"|modulation|={m}: ratio {vr.theorem1_ratio(g, spec, 3.0, grid, ladder, fast).ratio:.4f}")

# refining the ladder changes the ratio only slightly for smooth curves
for count in (16, 32, 64, 128):
    r = vr.theorem1_ratio(f, spec, 3.0, grid, vr.EpsLadder(1e-2, 1e2, count), fast)
    print(f"ladder {count:3d}: {r.ratio:.6f}")

# the bilinear form: constant g against a Gaussian kernel
ts = vr.tomas_stein_ratio(grid, np.ones(len(grid)), f)
# for g = 1 the form reduces to 8 pi^2 int_{-1}^{1} exp(-pi (2 - 2t)) dt
print("bilinear form:", ts.lhs, " exact:", 4 * np.pi * (1 - np.exp(-4 * np.pi)), " ratio:", ts.ratio)
