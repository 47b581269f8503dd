"""Pointwise domination of the radial derivative kernel by a superposition of Gaussians.

With ``psi(x) = 2 pi |x|^2 exp(-pi |x|^2)``, the Gaussian measure of parameter
``alpha`` has ``vartheta = psi(x / alpha)``.  The superposition

    Psi(x) = int_1^inf psi(x / alpha) alpha^(-1-delta) dalpha
           = (pi |x|^2)^(-delta/2) gamma(delta/2 + 1, pi |x|^2)

behaves like ``2 pi |x|^2 / (2 + delta)`` at the origin and like
``pi^(-delta/2) Gamma(delta/2 + 1) |x|^(-delta)`` at infinity.  A measure whose
kernel satisfies ``|vartheta| <= C Psi`` is reduced to the Gaussian case.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._special import scaled_lower_gamma
from .errors import DomainError
from .measures import MeasureSpec

__all__ = [
    "DominationReport",
    "psi",
    "capital_psi",
    "capital_psi_radial",
    "capital_psi_alpha_integral",
    "capital_psi_r_integral",
    "tail_limit",
    "origin_limit",
    "domination_ratio",
    "radius_profile",
    "write_profile_csv",
]

#: Radii used for the tail and origin fits.
TAIL_RANGE = (1e2, 1e4)
ORIGIN_RANGE = (1e-4, 1e-2)
#: A tail slope of ``log(|vartheta| / Psi)`` above this is reported as diverging.
DIVERGENCE_SLOPE = 0.1


def _radius(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (3,):
        raise DomainError(f"points must have a trailing axis of length 3, got shape {x.shape}")
    return np.sqrt(np.sum(x * x, axis=-1))


def _delta(delta: float) -> float:
    delta = float(delta)
    if not delta > 0 or not math.isfinite(delta):
        raise DomainError(f"delta must be positive and finite, got {delta}")
    return delta


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def psi(x) -> float | np.ndarray:
    """``2 pi |x|^2 exp(-pi |x|^2)``."""
    t = math.pi * _radius(x) ** 2
    return _out(2.0 * t * np.exp(-t))


def capital_psi_radial(r, delta: float) -> np.ndarray:
    """``Psi`` as a function of the radius."""
    delta = _delta(delta)
    X = math.pi * np.asarray(r, dtype=float) ** 2
    # X^(-delta/2) gamma(delta/2 + 1, X) = scaled_lower_gamma(delta/2 + 1, X)
    return scaled_lower_gamma(delta / 2.0 + 1.0, X)


def capital_psi(x, delta: float) -> float | np.ndarray:
    """Closed form of ``Psi(x)`` through the lower incomplete gamma function; ``Psi(0) = 0``."""
    return _out(capital_psi_radial(_radius(x), delta))


def capital_psi_alpha_integral(x, delta: float) -> float:
    """``int_1^inf psi(x/alpha) alpha^(-1-delta) dalpha`` by adaptive quadrature.

    Integrated in ``s = log(alpha)``, split at the peak of ``psi``.
    """
    delta = _delta(delta)
    r = float(_radius(x))
    if r == 0:
        return 0.0

    def integrand(s):
        t = math.pi * (r * math.exp(-s)) ** 2
        return 2.0 * t * math.exp(-t - delta * s)

    peak = max(0.0, math.log(r * math.sqrt(math.pi)))
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=500)
    head = integrate.quad(integrand, 0.0, peak, **opts)[0] if peak > 0 else 0.0
    tail = integrate.quad(integrand, peak, peak + 5.0, **opts)[0]
    tail += integrate.quad(integrand, peak + 5.0, np.inf, **opts)[0]
    return head + tail


def capital_psi_r_integral(x, delta: float) -> float:
    """``int_0^X exp(-r) (r / X)^(delta/2) dr`` with ``X = pi |x|^2``, by weighted quadrature."""
    delta = _delta(delta)
    X = math.pi * float(_radius(x)) ** 2
    if X == 0:
        return 0.0
    # the integrand is below e^-80 (r/X)^(delta/2) beyond r = 80 + 2 delta
    upper = min(X, 80.0 + 2.0 * delta)
    scale = X ** (-delta / 2.0)
    val = integrate.quad(lambda r: math.exp(-r), 0.0, upper, weight="alg",
                         wvar=(delta / 2.0, 0.0), epsabs=0.0, epsrel=1e-13, limit=200)[0]
    return scale * val


def tail_limit(delta: float) -> float:
    """``lim Psi(x) |x|^delta = pi^(-delta/2) Gamma(delta/2 + 1)``."""
    delta = _delta(delta)
    return math.pi ** (-delta / 2.0) * math.gamma(delta / 2.0 + 1.0)


def origin_limit(delta: float) -> float:
    """``lim Psi(x) / |x|^2 = 2 pi / (2 + delta)``."""
    return 2.0 * math.pi / (2.0 + _delta(delta))


@dataclass(frozen=True)
class DominationReport:
    """Empirical constant in ``|vartheta(x)| <= C Psi(x)``.

    ``sup_ratio`` is the largest ``|vartheta| / Psi`` over the supplied samples
    and ``witness`` the sample attaining it.  ``tail_constant`` is ``Psi |x|^delta``
    at the outer end of the tail range and ``tail_stability`` its largest
    relative spread over the last decade; ``origin_constant`` is ``Psi / |x|^2``
    at the inner end of the origin range.  ``diverging_tail`` is set when
    ``|vartheta| / Psi`` grows over the tail range, i.e. domination fails.
    """

    sup_ratio: float
    witness: tuple
    delta: float
    tail_constant: float
    tail_stability: float
    origin_constant: float
    vartheta_origin_constant: float
    tail_slope: float
    diverging_tail: bool

    def to_dict(self) -> dict:
        return {
            "sup_ratio": self.sup_ratio,
            "witness": list(self.witness),
            "delta": self.delta,
            "tail_constant": self.tail_constant,
            "tail_stability": self.tail_stability,
            "origin_constant": self.origin_constant,
            "vartheta_origin_constant": self.vartheta_origin_constant,
            "tail_slope": self.tail_slope,
            "diverging_tail": self.diverging_tail,
        }


def _tail_slope(spec: MeasureSpec, delta: float) -> float:
    """Log-log slope of the envelope of ``|vartheta| / Psi`` over the tail range."""
    radii = np.geomspace(*TAIL_RANGE, 25)
    shift = np.linspace(0.0, 1.0, 64, endpoint=False)
    r = radii[:, None] + shift[None, :]
    env = np.max(np.abs(spec.vartheta_profile(r)) / capital_psi_radial(r, delta), axis=1)
    if np.any(env < 1e-290):
        return -math.inf
    return float(np.polyfit(np.log(radii), np.log(env), 1)[0])


def domination_ratio(spec: MeasureSpec, delta: float, samples) -> DominationReport:
    """Largest ``|vartheta(x)| / Psi(x)`` over samples, with tail and origin fits."""
    delta = _delta(delta)
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    if pts.size == 0:
        raise DomainError("need at least one sample point")
    r = _radius(pts)
    if np.any(r == 0):
        raise DomainError("samples must exclude the origin")
    ratio = np.abs(spec.vartheta_profile(r)) / capital_psi_radial(r, delta)
    k = int(np.argmax(ratio))

    last_decade = np.geomspace(TAIL_RANGE[1] / 10.0, TAIL_RANGE[1], 33)
    scaled = capital_psi_radial(last_decade, delta) * last_decade ** delta
    tail_constant = float(scaled[-1])
    stability = float((scaled.max() - scaled.min()) / tail_constant)

    near = np.geomspace(*ORIGIN_RANGE, 33)
    origin_constant = float(capital_psi_radial(near[:1], delta)[0] / near[0] ** 2)
    theta_origin = float(np.max(np.abs(spec.vartheta_over_r2(near))))

    slope = _tail_slope(spec, delta)
    return DominationReport(float(ratio[k]), tuple(float(v) for v in pts[k]), delta,
                            tail_constant, stability, origin_constant, theta_origin, slope,
                            bool(slope > DIVERGENCE_SLOPE))


def radius_profile(spec: MeasureSpec, delta: float, radii) -> np.ndarray:
    """Rows ``(r, vartheta, Psi, |vartheta| / Psi)`` for positive radii."""
    radii = np.asarray(radii, dtype=float)
    if np.any(~(radii > 0)):
        raise DomainError("profile radii must be positive")
    theta = spec.vartheta_profile(radii)
    big_psi = capital_psi_radial(radii, delta)
    return np.stack([radii, theta, big_psi, np.abs(theta) / big_psi], axis=1)


def write_profile_csv(path, profile: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "vartheta", "Psi", "ratio"])
        for row in profile:
            writer.writerow([repr(float(v)) for v in row])
