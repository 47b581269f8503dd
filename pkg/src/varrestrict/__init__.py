"""Numerical laboratory for variational Fourier restriction to the sphere.

Modules
-------
variation   rho-variation of sampled curves and surfaces
measures    averaging measures with closed-form Fourier transforms
sphere      quadrature on the unit sphere and the bilinear restriction form
fourier     Gaussian test functions and averaged Fourier transforms
estimates   empirical ratio testers
gaussdom    Gaussian domination of the radial derivative kernel
search      seeded search for near-extremal test functions
cli         command-line interface
"""
__version__ = "0.1.0"

from .errors import CapError, DomainError, QuadratureAccuracyWarning
from .estimates import (RatioReport, condition_a_l2_probe, condition_c_probe, maximal_ratio,
                        theorem1_ratio, tomas_stein_ratio, variation_curve)
from .fourier import (EpsLadder, Grid3D, TestFunction, averaged_fhat, averaged_values, fhat,
                      lp_norm)
from .gaussdom import DominationReport, capital_psi, domination_ratio, psi
from .measures import (MeasureSpec, check_ring_identity, condition_a_sign_check,
                       decay_exponents, grad_mu_hat, mu_hat, vartheta)
from .search import FamilyBounds, SearchConfig, SearchTrace, optimize_ratio
from .sphere import SphereGrid, build_sphere_grid, restriction_bilinear_form, sphere_integrate
from .variation import (SampledCurve, SampledSurface, VariationResult, bivar_seminorm,
                        var_norm, var_oracle_exhaustive, var_seminorm)
