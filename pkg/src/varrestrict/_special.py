"""Lower incomplete gamma function by power series and Lentz continued fraction."""
from __future__ import annotations

import math

import numpy as np

_EPS = 1e-16
_MAX_ITER = 10000
_TINY = 1e-300


def _series(a: float, x: np.ndarray) -> np.ndarray:
    """``S(a, x)`` with ``gamma(a, x) = x^a e^{-x} S``; converges for all ``x``, fast for ``x < a + 1``."""
    term = np.full_like(x, 1.0 / a)
    total = term.copy()
    ap = a
    active = np.ones(x.shape, dtype=bool)
    for _ in range(_MAX_ITER):
        ap += 1.0
        term = np.where(active, term * x / ap, 0.0)
        total += term
        active &= np.abs(term) > np.abs(total) * _EPS
        if not active.any():
            break
    return total


def _continued_fraction(a: float, x: np.ndarray) -> np.ndarray:
    """``C(a, x)`` with ``Gamma(a, x) = x^a e^{-x} C``, modified Lentz; for ``x >= a + 1``."""
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = np.where(active, d * c, 1.0)
        h *= delta
        active &= np.abs(delta - 1.0) > _EPS
        if not active.any():
            break
    return h


def scaled_lower_gamma(a: float, x) -> np.ndarray:
    """``gamma(a, x) x^(1-a)``, i.e. ``x^(1-a) int_0^x t^(a-1) e^(-t) dt``, for ``x >= 0``.

    The scaling keeps the result representable over the whole range of ``x``.
    The series is used below ``x = a + 1`` and the continued fraction above.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    small = pos & (x < a + 1.0)
    large = pos & ~small
    xs = x[small]
    out[small] = xs * np.exp(-xs) * _series(a, xs)
    xl = x[large]
    # x^(1-a) Gamma(a) - x e^{-x} C
    out[large] = (np.exp((1.0 - a) * np.log(xl) + math.lgamma(a))
                  - xl * np.exp(-xl) * _continued_fraction(a, xl))
    return out


def lower_gamma(a: float, x) -> np.ndarray:
    """Lower incomplete gamma ``gamma(a, x)``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x > 0, scaled_lower_gamma(a, x) * np.power(x, a - 1.0), 0.0)


def regularized_lower_gamma(a: float, x) -> np.ndarray:
    """``P(a, x) = gamma(a, x) / Gamma(a)``."""
    return lower_gamma(a, x) / math.gamma(a)
