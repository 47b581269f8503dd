"""
Averaging measures and Gaussian domination
==========================================

Three catalogued probability measures on R^3: a Gaussian, the normalised
ball and the normalised sphere.  vartheta = -x . grad mu_hat(x) is
nonnegative for the Gaussian but changes sign for the sphere, and only the
measures whose vartheta decays fast enough are dominated by a superposition
of Gaussian profiles.
"""
import numpy as np

import varrestrict as vr

specs = [vr.MeasureSpec.gaussian(1.0), vr.MeasureSpec.ball(), vr.MeasureSpec.sphere()]
x = np.array([[0.0, 0.0, r] for r in (0.0, 0.25, 0.5, 1.0, 2.0)])
for spec in specs:
    print(f"{spec.kind:8s} mu_hat   ", np.round(vr.mu_hat(spec, x), 5))
    print(f"{spec.kind:8s} vartheta ", np.round(vr.vartheta(spec, x), 5))

# decay exponents of |mu_hat| and |grad mu_hat| (the Gaussian is reported at the cap)
radii = np.geomspace(10, 1e4, 24)
for spec in specs:
    est = vr.decay_exponents(spec, radii)
    print(f"{spec.kind:8s} alpha_hat {est.alpha_hat:.3f}  beta_hat {est.beta_hat:.3f}")

# sign of vartheta on random samples
rng = np.random.default_rng(1)
samples = rng.normal(size=(10_000, 3)) * 4
for spec in specs:
    chk = vr.condition_a_sign_check(spec, samples)
    print(f"{spec.kind:8s} vartheta >= 0: {chk.ok}  (min {chk.worst_value:.4f})")

# Gaussian domination |vartheta| <= C Psi
v = rng.normal(size=(4000, 3))
pts = np.geomspace(1e-3, 1e3, 4000)[:, None] * v / np.linalg.norm(v, axis=1, keepdims=True)
for spec in specs:
    for delta in (0.5, 2.0):
        rep = vr.domination_ratio(spec, delta, pts)
        print(f"{spec.kind:8s} delta={delta}: sup ratio {rep.sup_ratio:10.4g}, "
              f"tail slope {rep.tail_slope:+.3f}, diverging {rep.diverging_tail}")
