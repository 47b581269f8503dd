"""Normalised, even, radial averaging measures and their Fourier transforms.

Three measures are catalogued, each with total mass one:

* ``gaussian(alpha)`` - density ``alpha^3 exp(-pi alpha^2 |x|^2)``,
* ``ball`` - normalised indicator of the unit ball,
* ``sphere`` - normalised surface measure of the unit sphere.

With ``u = 2 pi |x|`` their transforms are ``exp(-pi |x|^2 / alpha^2)``,
``3 (sin u - u cos u) / u^3`` and ``sin u / u``.  The radial derivative kernel
``vartheta(x) = -x . grad mu_hat(x)`` is computed analytically; near the origin
both the transform and ``vartheta`` use power series in ``u^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from ._quadrature import gauss_legendre, nodes_for_resolution
from .errors import DomainError

__all__ = [
    "MeasureSpec",
    "DecayEstimate",
    "SignCheck",
    "mu_hat",
    "grad_mu_hat",
    "vartheta",
    "mu_hat_quadrature",
    "check_ring_identity",
    "decay_exponents",
    "condition_a_sign_check",
]

KINDS = ("gaussian", "ball", "sphere")
#: Fitted decay exponents are clamped here; super-polynomial decay reports this value.
DECAY_CAP = 32.0
# below this value of u = 2 pi r the series branch is used
_SERIES_SWITCH = 0.5
_SERIES_TERMS = 14


def _series(q: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    out = np.zeros_like(q)
    for c in coeffs[::-1]:
        out = out * q + c
    return out


def _coefficients():
    # series in q = u^2, alternating signs folded into the coefficients
    n = np.arange(_SERIES_TERMS)
    sign = (-1.0) ** n
    fact = np.array([math.factorial(2 * k + 1) for k in n], dtype=float)
    fact3 = np.array([math.factorial(2 * k + 3) for k in n], dtype=float)
    sinc = sign / fact
    ball = sign * 6.0 * (n + 1) / fact3
    # vartheta = -2 q d/dq of the transform
    theta_sinc = -2.0 * n * sinc
    theta_ball = -2.0 * n * ball
    return sinc, ball, theta_sinc, theta_ball


_SINC, _BALL, _THETA_SINC, _THETA_BALL = _coefficients()


@dataclass(frozen=True)
class MeasureSpec:
    """Description of a catalogued averaging measure.

    Use the constructors :meth:`gaussian`, :meth:`ball` and :meth:`sphere`.
    """

    kind: str
    alpha: float | None = field(default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown measure kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "gaussian":
            if self.alpha is None or not (float(self.alpha) > 0 and math.isfinite(self.alpha)):
                raise DomainError(f"gaussian measure needs alpha > 0, got {self.alpha!r}")
            object.__setattr__(self, "alpha", float(self.alpha))
        elif self.alpha is not None:
            raise DomainError(f"{self.kind} measure takes no alpha")

    @classmethod
    def gaussian(cls, alpha: float = 1.0) -> "MeasureSpec":
        return cls("gaussian", alpha)

    @classmethod
    def ball(cls) -> "MeasureSpec":
        return cls("ball")

    @classmethod
    def sphere(cls) -> "MeasureSpec":
        return cls("sphere")

    @property
    def is_gaussian(self) -> bool:
        return self.kind == "gaussian"

    def to_dict(self) -> dict:
        if self.is_gaussian:
            return {"kind": "gaussian", "alpha": self.alpha}
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, data) -> "MeasureSpec":
        if isinstance(data, str):
            return cls(data) if data != "gaussian" else cls.gaussian()
        unknown = set(data) - {"kind", "alpha"}
        if unknown:
            raise DomainError(f"unknown measure keys: {sorted(unknown)}")
        if "kind" not in data:
            raise DomainError("measure needs a 'kind'")
        return cls(data["kind"], data.get("alpha"))

    # radial profiles -------------------------------------------------------

    def profile(self, r) -> np.ndarray:
        """``mu_hat`` as a function of the radius ``r = |x|``."""
        r = np.abs(np.asarray(r, dtype=float))
        if self.is_gaussian:
            return np.exp(-math.pi * (r / self.alpha) ** 2)
        return self._bessel_like(r, theta=False)

    def vartheta_profile(self, r) -> np.ndarray:
        """``vartheta = -r d/dr mu_hat`` as a function of the radius."""
        r = np.abs(np.asarray(r, dtype=float))
        if self.is_gaussian:
            t = math.pi * (r / self.alpha) ** 2
            return 2.0 * t * np.exp(-t)
        return self._bessel_like(r, theta=True)

    def vartheta_over_r2(self, r) -> np.ndarray:
        """``vartheta(r) / r^2``, finite at the origin."""
        r = np.abs(np.asarray(r, dtype=float))
        if self.is_gaussian:
            return 2.0 * math.pi / self.alpha ** 2 * np.exp(-math.pi * (r / self.alpha) ** 2)
        u = 2.0 * math.pi * r
        small = u < _SERIES_SWITCH
        coeffs = _THETA_BALL if self.kind == "ball" else _THETA_SINC
        out = np.empty_like(r)
        q = u[small] ** 2
        # drop the vanishing constant term and divide by q, then rescale to r^2
        out[small] = _series(q, coeffs[1:]) * (2.0 * math.pi) ** 2
        rb = r[~small]
        out[~small] = self._bessel_like(rb, theta=True) / rb ** 2
        return out

    def _bessel_like(self, r: np.ndarray, theta: bool) -> np.ndarray:
        u = 2.0 * math.pi * r
        small = u < _SERIES_SWITCH
        out = np.empty_like(u)
        q = u[small] ** 2
        if self.kind == "sphere":
            out[small] = _series(q, _THETA_SINC if theta else _SINC)
        else:
            out[small] = _series(q, _THETA_BALL if theta else _BALL)
        ub = u[~small]
        sinc = np.sin(ub) / ub
        if self.kind == "sphere":
            out[~small] = sinc - np.cos(ub) if theta else sinc
        else:
            ball = 3.0 * (np.sin(ub) - ub * np.cos(ub)) / ub ** 3
            out[~small] = 3.0 * (ball - sinc) if theta else ball
        return out

    def multiplier_support(self, eps: float, radius_factor: float) -> float:
        """Radius beyond which ``mu_hat(eps x)`` is negligible, or ``inf``.

        Only the Gaussian multiplier localises; the others decay polynomially.
        """
        if self.is_gaussian:
            return radius_factor * self.alpha / eps
        return math.inf

    def multiplier_frequency(self, eps: float) -> float:
        """Oscillation frequency (cycles per unit length) of ``mu_hat(eps x)``."""
        return 0.0 if self.is_gaussian else float(eps)

    def multiplier_width(self, eps: float) -> float:
        """Gaussian width of ``mu_hat(eps x)`` (``inf`` when it does not localise)."""
        return self.alpha / eps if self.is_gaussian else math.inf


def _radius(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (3,):
        raise DomainError(f"points must have a trailing axis of length 3, got shape {x.shape}")
    return np.sqrt(np.sum(x * x, axis=-1))


def _scalar_or_array(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def mu_hat(spec: MeasureSpec, x) -> float | np.ndarray:
    """Fourier transform of the measure at points ``x`` of shape ``(..., 3)``; real and even."""
    return _scalar_or_array(spec.profile(_radius(x)))


def vartheta(spec: MeasureSpec, x) -> float | np.ndarray:
    """``-x . grad mu_hat(x)`` by analytic radial differentiation."""
    return _scalar_or_array(spec.vartheta_profile(_radius(x)))


def grad_mu_hat(spec: MeasureSpec, x) -> np.ndarray:
    """Gradient of ``mu_hat``, equal to ``-(vartheta(x) / |x|^2) x`` for a radial transform."""
    x = np.asarray(x, dtype=float)
    return -spec.vartheta_over_r2(_radius(x))[..., None] * x


def mu_hat_quadrature(spec: MeasureSpec, x) -> complex | np.ndarray:
    """Defining integral ``int exp(-2 pi i x.y) dmu(y)`` by quadrature.

    Independent of the closed forms: a tensor-product Gauss-Legendre rule on
    ``[-6/alpha, 6/alpha]^3`` for the Gaussian (evaluated as a product of 1-d rules,
    which is exact for the separable integrand), and the radial reductions

        sphere: 1/2 int_{-1}^{1} exp(-2 pi i r t) dt
        ball:   3/2 int_0^1 rho^2 int_{-1}^{1} exp(-2 pi i r rho t) dt drho

    otherwise.  The imaginary part is returned as computed, for realness checks.
    """
    x = np.asarray(x, dtype=float)
    r = _radius(x)
    if spec.is_gaussian:
        half = 6.0 / spec.alpha
        freq = float(np.abs(x).max()) if x.size else 0.0
        n = nodes_for_resolution(half, 1.0 / spec.alpha, freq, floor=32)
        t, w = gauss_legendre(n, -half, half)
        dens = spec.alpha * np.exp(-math.pi * (spec.alpha * t) ** 2) * w
        out = np.ones(x.shape[:-1], dtype=complex)
        for k in range(3):
            out = out * (np.exp(-2j * math.pi * x[..., k, None] * t) @ dens)
    else:
        rmax = float(r.max()) if r.size else 0.0
        # undamped oscillation over the whole interval: double the damped-case frequency
        n = nodes_for_resolution(1.0, math.inf, 2.0 * rmax, floor=32)
        t, w = gauss_legendre(n, -1.0, 1.0)
        if spec.kind == "sphere":
            out = 0.5 * (np.exp(-2j * math.pi * r[..., None] * t) @ w)
        else:
            rho, wr = gauss_legendre(n, 0.0, 1.0)
            inner = np.exp(-2j * math.pi * r[..., None, None] * rho[:, None] * t) @ w
            out = 1.5 * (inner @ (rho ** 2 * wr))
    return complex(out) if np.ndim(out) == 0 else out


def check_ring_identity(spec: MeasureSpec, x, a: float, b: float, quad_points: int = 200) -> float:
    """Residual of ``mu_hat(ax) - mu_hat(bx) = int_a^b vartheta(tx) dt/t``.

    The integral is computed by adaptive Gauss-Kronrod quadrature in ``log t``
    with at most ``quad_points`` subintervals.
    """
    if not (a > 0) or b < a:
        raise DomainError(f"need 0 < a <= b, got a={a}, b={b}")
    if a == b:
        return 0.0
    r = float(_radius(x))
    lhs = float(spec.profile(a * r) - spec.profile(b * r))

    def integrand(s):
        return float(spec.vartheta_profile(math.exp(s) * r))

    val, _ = integrate.quad(integrand, math.log(a), math.log(b), limit=int(quad_points),
                            epsabs=1e-13, epsrel=1e-11)
    return abs(lhs - val)


@dataclass(frozen=True)
class DecayEstimate:
    """Fitted polynomial decay rates of ``|mu_hat|`` and ``|grad mu_hat|``."""

    alpha_hat: float
    beta_hat: float
    radii_used: tuple
    passes_ramos: bool
    alpha_residual: float
    beta_residual: float
    alpha_clamped: bool
    beta_clamped: bool

    def to_dict(self) -> dict:
        return {
            "alpha_hat": self.alpha_hat,
            "beta_hat": self.beta_hat,
            "radii_used": list(self.radii_used),
            "passes_ramos": self.passes_ramos,
            "alpha_residual": self.alpha_residual,
            "beta_residual": self.beta_residual,
            "alpha_clamped": self.alpha_clamped,
            "beta_clamped": self.beta_clamped,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecayEstimate":
        return cls(**{**data, "radii_used": tuple(data["radii_used"])})


def _fit_exponent(radii: np.ndarray, env: np.ndarray, cap: float) -> tuple[float, float, bool]:
    if np.any(env < 1e-290):
        return cap, math.nan, True
    X = np.log1p(radii)
    Y = np.log(env)
    slope, intercept = np.polyfit(X, Y, 1)
    resid = float(np.sqrt(np.mean((Y - (slope * X + intercept)) ** 2)))
    e = -float(slope)
    if e > cap:
        return cap, resid, True
    return e, resid, False


def decay_exponents(spec: MeasureSpec, radii, directions: int = 16, offsets: int = 64,
                    seed: int = 0, cap: float = DECAY_CAP) -> DecayEstimate:
    """Fit ``c (1 + r)^(-e)`` to the envelopes of ``|mu_hat|`` and ``|grad mu_hat|``.

    At each radius the envelope is the largest value over random directions and
    over radial offsets spanning one unit, the oscillation period of the
    catalogued transforms, so that zeros of an oscillating profile do not
    enter the log-log least-squares fit.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size < 4:
        raise DomainError("decay fit needs at least 4 radii")
    if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise DomainError("radii must be positive and increasing")
    if radii[-1] / radii[0] < 100:
        raise DomainError("radii must span at least two decades")
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(directions, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    shift = np.linspace(0.0, 1.0, offsets, endpoint=False)
    pts = (radii[:, None, None] + shift[None, :, None])[..., None] * dirs[None, None, :, :]
    env_mu = np.abs(mu_hat(spec, pts)).reshape(radii.size, -1).max(axis=1)
    env_grad = np.linalg.norm(grad_mu_hat(spec, pts), axis=-1).reshape(radii.size, -1).max(axis=1)
    a, ares, aclamp = _fit_exponent(radii, env_mu, cap)
    b, bres, bclamp = _fit_exponent(radii, env_grad, cap)
    return DecayEstimate(a, b, tuple(float(r) for r in radii), bool(a + b > 1), ares, bres,
                         aclamp, bclamp)


@dataclass(frozen=True)
class SignCheck:
    """Outcome of the pointwise test ``vartheta >= 0``."""

    ok: bool
    worst_witness: tuple
    worst_value: float

    def to_dict(self) -> dict:
        return {"ok": self.ok, "worst_witness": list(self.worst_witness),
                "worst_value": self.worst_value}


def condition_a_sign_check(spec: MeasureSpec, samples, tol: float = 1e-12) -> SignCheck:
    """Check ``-x . grad mu_hat(x) >= -tol`` on samples; report the minimising sample."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] == 0:
        raise DomainError("need at least one sample point")
    vals = np.atleast_1d(vartheta(spec, samples))
    k = int(np.argmin(vals))
    worst = float(vals[k])
    return SignCheck(bool(worst >= -tol), tuple(float(v) for v in samples[k]), worst)
