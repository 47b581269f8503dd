"""Modulated Gaussian test functions, averaged Fourier transforms and L^p norms.

A :class:`TestFunction` is

    f(x) = sum_j c_j exp(-pi |x - t_j|^2 / s_j^2) exp(2 pi i x . m_j),

whose transform ``f_hat(y) = int f(x) exp(-2 pi i x . y) dx`` is again a sum of
modulated Gaussians.  The averaged value ``(f_hat * mu_eps)(y)`` equals the
multiplier-side integral ``int f(x) mu_hat(eps x) exp(-2 pi i x . y) dx`` and is
computed either by tensor-product Gauss-Legendre quadrature or, on the measure
side, by integrating the Gaussian terms of ``f_hat`` against ``mu`` exactly.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._parallel import ordered_map
from ._quadrature import composite_gauss_legendre, gauss_legendre, nodes_for_resolution
from .errors import DomainError, QuadratureAccuracyWarning
from .measures import MeasureSpec

__all__ = [
    "TestFunction",
    "EpsLadder",
    "Grid3D",
    "fhat",
    "fhat_quadrature",
    "averaged_fhat",
    "averaged_values",
    "double_multiplier_values",
    "lp_norm",
]

METHODS = ("quadrature", "closed_form")


def _vec3(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be a finite 3-vector, got {v!r}")
    return arr


def _complex_from_json(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise DomainError(f"complex values are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, dict):
        raise DomainError(f"complex values are [re, im] pairs, got {v!r}")
    return complex(v)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Finite sum of modulated, translated and scaled Gaussians on ``R^3``.

    Parameters are stored as arrays: ``coeffs (K,)`` complex, ``centers (K, 3)``,
    ``scales (K,)`` and ``modulations (K, 3)``.  ``K = 0`` is the zero function.
    """

    __test__ = False  # not a pytest class

    coeffs: np.ndarray
    centers: np.ndarray
    scales: np.ndarray
    modulations: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        k = c.size
        t = np.asarray(self.centers, dtype=float).reshape(k, 3)
        s = np.asarray(self.scales, dtype=float).reshape(k)
        m = np.asarray(self.modulations, dtype=float).reshape(k, 3)
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(t)) and np.all(np.isfinite(m))):
            raise DomainError("test function parameters must be finite")
        if np.any(~(s > 0)) or not np.all(np.isfinite(s)):
            raise DomainError("test function scales must be positive and finite")
        for name, arr in (("coeffs", c), ("centers", t), ("scales", s), ("modulations", m)):
            object.__setattr__(self, name, _readonly(arr))

    # construction -----------------------------------------------------------

    @classmethod
    def from_terms(cls, terms) -> "TestFunction":
        """Build from an iterable of ``(coeff, center, scale, modulation)`` tuples."""
        terms = list(terms)
        if not terms:
            return cls.zero()
        c, t, s, m = zip(*terms)
        return cls(np.array(c, dtype=complex), [_vec3(x, "center") for x in t],
                   np.array(s, dtype=float), [_vec3(x, "modulation") for x in m])

    @classmethod
    def gaussian(cls, coeff: complex = 1.0, center=(0.0, 0.0, 0.0), scale: float = 1.0,
                 modulation=(0.0, 0.0, 0.0)) -> "TestFunction":
        return cls.from_terms([(coeff, center, scale, modulation)])

    @classmethod
    def zero(cls) -> "TestFunction":
        return cls(np.zeros(0, complex), np.zeros((0, 3)), np.zeros(0), np.zeros((0, 3)))

    @property
    def num_terms(self) -> int:
        return self.coeffs.size

    @property
    def is_zero(self) -> bool:
        return self.num_terms == 0 or not np.any(self.coeffs)

    def scaled(self, c: complex) -> "TestFunction":
        """The function ``c f``."""
        return TestFunction(self.coeffs * c, self.centers, self.scales, self.modulations)

    def __add__(self, other: "TestFunction") -> "TestFunction":
        return TestFunction(np.concatenate([self.coeffs, other.coeffs]),
                            np.concatenate([self.centers, other.centers]),
                            np.concatenate([self.scales, other.scales]),
                            np.concatenate([self.modulations, other.modulations]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TestFunction):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k))
                   for k in ("coeffs", "centers", "scales", "modulations"))

    def __hash__(self):
        return hash(tuple(getattr(self, k).tobytes()
                          for k in ("coeffs", "centers", "scales", "modulations")))

    def fourier_dual(self) -> "TestFunction":
        """``f_hat`` written as a test function in the frequency variable.

        A term ``(c, t, s, m)`` transforms to ``(c s^3 e^{2 pi i m.t}, m, 1/s, -t)``.
        """
        phase = np.exp(2j * math.pi * np.sum(self.modulations * self.centers, axis=1))
        return TestFunction(self.coeffs * self.scales ** 3 * phase, self.modulations,
                            1.0 / self.scales, -self.centers)

    def __call__(self, x) -> np.ndarray:
        """Evaluate at points of shape ``(..., 3)``."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (3,):
            raise DomainError(f"points must have a trailing axis of length 3, got {x.shape}")
        d = x[..., None, :] - self.centers
        expo = (-math.pi * np.sum(d * d, axis=-1) / self.scales ** 2
                + 2j * math.pi * np.sum(x[..., None, :] * self.modulations, axis=-1))
        out = np.exp(expo) @ self.coeffs if self.num_terms else np.zeros(x.shape[:-1], complex)
        return complex(out) if np.ndim(out) == 0 else out

    # serialisation -----------------------------------------------------------

    def to_dict(self) -> dict:
        return {"terms": [
            {"coeff": [float(c.real), float(c.imag)], "center": [float(v) for v in t],
             "scale": float(s), "modulation": [float(v) for v in m]}
            for c, t, s, m in zip(self.coeffs, self.centers, self.scales, self.modulations)
        ]}

    @classmethod
    def from_dict(cls, data: dict) -> "TestFunction":
        if not isinstance(data, dict) or set(data) != {"terms"}:
            raise DomainError("a test function is a JSON object with exactly the key 'terms'")
        terms = []
        for term in data["terms"]:
            unknown = set(term) - {"coeff", "center", "scale", "modulation"}
            if unknown:
                raise DomainError(f"unknown test-function term keys: {sorted(unknown)}")
            if "scale" not in term:
                raise DomainError("each term needs a 'scale'")
            terms.append((_complex_from_json(term.get("coeff", 1.0)),
                          term.get("center", [0.0, 0.0, 0.0]), float(term["scale"]),
                          term.get("modulation", [0.0, 0.0, 0.0])))
        return cls.from_terms(terms)


@dataclass(frozen=True)
class EpsLadder:
    """Geometric ladder of ``count`` dilation parameters on ``[eps_min, eps_max]``."""

    eps_min: float
    eps_max: float
    count: int

    def __post_init__(self):
        if not (0 < self.eps_min <= self.eps_max) or not math.isfinite(self.eps_max):
            raise DomainError(f"need 0 < eps_min <= eps_max < inf, got {self.eps_min}, {self.eps_max}")
        if int(self.count) != self.count or self.count < 1:
            raise DomainError(f"ladder count must be a positive integer, got {self.count}")
        if self.count > 1 and self.eps_min == self.eps_max:
            raise DomainError("a ladder with several points needs eps_min < eps_max")
        object.__setattr__(self, "count", int(self.count))

    @property
    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([float(self.eps_min)])
        return np.geomspace(self.eps_min, self.eps_max, self.count)

    def to_dict(self) -> dict:
        return {"eps_min": float(self.eps_min), "eps_max": float(self.eps_max), "count": self.count}

    @classmethod
    def from_dict(cls, data: dict) -> "EpsLadder":
        unknown = set(data) - {"eps_min", "eps_max", "count"}
        if unknown:
            raise DomainError(f"unknown ladder keys: {sorted(unknown)}")
        return cls(float(data.get("eps_min", 1e-2)), float(data.get("eps_max", 1e2)),
                   int(data.get("count", 32)))


@dataclass(frozen=True)
class Grid3D:
    """Box-quadrature descriptor.

    ``nodes`` is the minimum Gauss-Legendre count per axis; the count grows
    with the resolution the integrand needs, up to ``max_nodes``.  The box
    covers ``radius_factor`` Gaussian widths around every term.  ``method``
    selects how averaged values are computed.
    """

    nodes: int = 48
    radius_factor: float = 4.5
    max_nodes: int = 192
    method: str = "quadrature"

    def __post_init__(self):
        if int(self.nodes) != self.nodes or self.nodes < 2:
            raise DomainError(f"nodes must be an integer >= 2, got {self.nodes}")
        if int(self.max_nodes) != self.max_nodes or self.max_nodes < self.nodes:
            raise DomainError("max_nodes must be an integer >= nodes")
        if not self.radius_factor > 0:
            raise DomainError("radius_factor must be positive")
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}, got {self.method!r}")

    def to_dict(self) -> dict:
        return {"nodes": int(self.nodes), "radius_factor": float(self.radius_factor),
                "max_nodes": int(self.max_nodes), "method": self.method}

    @classmethod
    def from_dict(cls, data: dict) -> "Grid3D":
        unknown = set(data) - {"nodes", "radius_factor", "max_nodes", "method"}
        if unknown:
            raise DomainError(f"unknown grid3d keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class QuadInfo:
    """Bookkeeping from box quadratures: node counts used and accuracy warnings."""

    nodes_used: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def note(self, needed: tuple, used: tuple, what: str):
        self.nodes_used.append(list(used))
        if needed != used:
            msg = (f"{what}: resolution needs {list(needed)} nodes per axis, "
                   f"capped at {list(used)}")
            if msg not in self.warnings:
                self.warnings.append(msg)
                warnings.warn(msg, QuadratureAccuracyWarning, stacklevel=3)

    def merge(self, other: "QuadInfo"):
        self.nodes_used.extend(other.nodes_used)
        for w in other.warnings:
            if w not in self.warnings:
                self.warnings.append(w)


def _points(y) -> tuple[np.ndarray, bool]:
    y = np.asarray(y, dtype=float)
    if y.shape[-1:] != (3,):
        raise DomainError(f"points must have a trailing axis of length 3, got shape {y.shape}")
    return y.reshape(-1, 3), y.ndim == 1


def fhat(f: TestFunction, y) -> complex | np.ndarray:
    """Closed-form Fourier transform of ``f`` at points ``y`` of shape ``(..., 3)``."""
    return f.fourier_dual()(y)


# --- box quadrature ----------------------------------------------------------

def _box_and_widths(f: TestFunction, spec: MeasureSpec | None, eps_sq: float, factor: float):
    """Per-term Gaussian envelope box and smallest width of ``|f(x) mu_hat(eps x)|``.

    ``eps_sq`` is the sum of squared dilations of all Gaussian multipliers.
    """
    centers, widths = f.centers, f.scales
    if spec is not None and spec.is_gaussian:
        prec = 1.0 / f.scales ** 2 + eps_sq / spec.alpha ** 2
        centers = f.centers / (f.scales ** 2 * prec)[:, None]
        widths = 1.0 / np.sqrt(prec)
    lo = np.min(centers - factor * widths[:, None], axis=0)
    hi = np.max(centers + factor * widths[:, None], axis=0)
    return lo, hi, float(np.min(widths))


def _axis_rules(lo, hi, width, freqs, grid: Grid3D, info: QuadInfo, what: str):
    needed = tuple(nodes_for_resolution(0.5 * (h - l), width, k, floor=grid.nodes)
                   for l, h, k in zip(lo, hi, freqs))
    used = tuple(min(n, grid.max_nodes) for n in needed)
    info.note(needed, used, what)
    return [gauss_legendre(n, l, h) for n, l, h in zip(used, lo, hi)]


def _term_grid(f: TestFunction, rules) -> np.ndarray:
    """``f`` on the tensor grid, built term by term from separable factors."""
    (x1, _), (x2, _), (x3, _) = rules
    out = np.zeros((x1.size, x2.size, x3.size), dtype=complex)
    for c, t, s, m in zip(f.coeffs, f.centers, f.scales, f.modulations):
        fac = [np.exp(-math.pi * (x - t[a]) ** 2 / s ** 2 + 2j * math.pi * m[a] * x)
               for a, x in enumerate((x1, x2, x3))]
        out += c * fac[0][:, None, None] * fac[1][None, :, None] * fac[2][None, None, :]
    return out


def _multiplier_grid(spec: MeasureSpec, eps: float, rules) -> np.ndarray:
    (x1, _), (x2, _), (x3, _) = rules
    if spec.is_gaussian:
        g = [np.exp(-math.pi * (eps * x / spec.alpha) ** 2) for x in (x1, x2, x3)]
        return g[0][:, None, None] * g[1][None, :, None] * g[2][None, None, :]
    r = np.sqrt(x1[:, None, None] ** 2 + x2[None, :, None] ** 2 + x3[None, None, :] ** 2)
    return spec.profile(eps * r)


def _contract(F: np.ndarray, rules, y: np.ndarray) -> np.ndarray:
    """``sum_ijk F_ijk w_i w_j w_k exp(-2 pi i x_ijk . y_m)`` for every row of ``y``."""
    (x1, w1), (x2, w2), (x3, w3) = rules
    F = F * (w1[:, None, None] * w2[None, :, None] * w3[None, None, :])
    e1, e2, e3 = (np.exp(-2j * math.pi * np.outer(x, y[:, a])) for a, x in enumerate((x1, x2, x3)))
    n1, n2, n3 = F.shape
    T = (F.reshape(n1 * n2, n3) @ e3).reshape(n1, n2, -1)
    U = np.einsum("ijm,jm->im", T, e2)
    return np.einsum("im,im->m", U, e1)


def _box_values(f: TestFunction, spec: MeasureSpec | None, eps: tuple, y: np.ndarray,
                grid: Grid3D, info: QuadInfo) -> np.ndarray:
    """``int f(x) prod_k mu_hat(eps_k x) exp(-2 pi i x . y) dx`` by box quadrature."""
    if f.num_terms == 0:
        return np.zeros(y.shape[0], dtype=complex)
    eps = tuple(float(e) for e in eps) if spec is not None else ()
    lo, hi, width = _box_and_widths(f, spec, sum(e * e for e in eps), grid.radius_factor)
    mult_freq = sum(spec.multiplier_frequency(e) for e in eps)
    freqs = np.max(np.abs(f.modulations[:, None, :] - y[None, :, :]), axis=(0, 1)) + mult_freq
    what = "fhat" if not eps else "averaged value at eps=" + ",".join(f"{e:.6g}" for e in eps)
    rules = _axis_rules(lo, hi, width, freqs, grid, info, what)
    F = _term_grid(f, rules)
    for e in eps:
        F = F * _multiplier_grid(spec, e, rules)
    return _contract(F, rules, y)


def fhat_quadrature(f: TestFunction, y, grid3d: Grid3D = Grid3D(), info: QuadInfo | None = None):
    """Defining integral of ``f_hat`` by box quadrature; an oracle for :func:`fhat`."""
    pts, single = _points(y)
    info = QuadInfo() if info is None else info
    out = _box_values(f, None, (), pts, grid3d, info)
    return complex(out[0]) if single else out.reshape(np.shape(y)[:-1])


# --- measure-side closed forms -------------------------------------------------

def _log_sinhc(z: np.ndarray) -> np.ndarray:
    """A branch of ``log(sinh(z) / z)``, accurate for large and small ``|z|``."""
    z = np.where(z.real < 0, -z, z)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-2
    q = z[small] ** 2
    out[small] = q * (1 / 6 + q * (-1 / 180 + q * (1 / 2835 - q / 37800)))
    zb = z[~small]
    out[~small] = zb - np.log(2 * zb) + np.log(-np.expm1(-2 * zb))
    return out


#: Gauss-Legendre nodes per panel for the radial integral of the ball measure.
_BALL_ORDER = 12
_BALL_MAX_PANELS = 4096


def _closed_form_values(f: TestFunction, spec: MeasureSpec, eps: float, y: np.ndarray,
                        info: QuadInfo) -> np.ndarray:
    d = f.fourier_dual()
    if d.num_terms == 0:
        return np.zeros(y.shape[0], dtype=complex)
    sig2 = d.scales ** 2
    u = y[:, None, :] - d.centers[None, :, :]
    A = -math.pi * np.sum(u * u, axis=-1) / sig2 + 2j * math.pi * (y @ d.modulations.T)
    v = eps * (2 * math.pi * u / sig2[:, None] - 2j * math.pi * d.modulations[None, :, :])
    vv = np.sum(v * v, axis=-1)
    kappa = math.pi * eps ** 2 / sig2
    if spec.is_gaussian:
        lam = kappa + math.pi * spec.alpha ** 2
        log = A + 3 * math.log(spec.alpha) + 1.5 * np.log(math.pi / lam) + vv / (4 * lam)
        vals = np.exp(log)
    else:
        k = np.sqrt(vv)
        if spec.kind == "sphere":
            vals = np.exp(A - kappa + _log_sinhc(k))
        else:
            scale = float(np.max(np.abs(k))) + 2.0 * math.sqrt(float(np.max(kappa)))
            panels = int(min(_BALL_MAX_PANELS, math.ceil(2 + scale / 4.0)))
            if panels == _BALL_MAX_PANELS:
                info.note((int(math.ceil(2 + scale / 4.0)),), (panels,), "ball radial integral")
            rho, w = composite_gauss_legendre(np.linspace(0.0, 1.0, panels + 1), _BALL_ORDER)
            log = (A[..., None] - kappa[None, :, None] * rho ** 2
                   + _log_sinhc(k[..., None] * rho))
            vals = np.exp(log) @ (3.0 * rho ** 2 * w)
    return vals @ d.coeffs


# --- public evaluation ---------------------------------------------------------

def averaged_values(f: TestFunction, spec: MeasureSpec, eps, y, grid3d: Grid3D = Grid3D(),
                    info: QuadInfo | None = None) -> np.ndarray:
    """``(f_hat * mu_eps)(y_m)`` for every ``eps_e`` and point ``y_m``; shape ``(E, M)``.

    ``eps`` values are independent and are processed in their given order; the
    result does not depend on the thread count.
    """
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    if eps.ndim != 1 or np.any(~(eps > 0)) or not np.all(np.isfinite(eps)):
        raise DomainError("eps values must be positive and finite")
    pts, _ = _points(y)
    info = QuadInfo() if info is None else info

    def one(e):
        local = QuadInfo()
        if grid3d.method == "closed_form":
            row = _closed_form_values(f, spec, float(e), pts, local)
        else:
            row = _box_values(f, spec, (e,), pts, grid3d, local)
        return row, local

    rows = []
    for row, local in ordered_map(one, eps):
        rows.append(row)
        info.merge(local)
    return np.stack(rows) if rows else np.zeros((0, pts.shape[0]), complex)


def averaged_fhat(f: TestFunction, spec: MeasureSpec, eps: float, y,
                  grid3d: Grid3D = Grid3D()) -> complex:
    """``(f_hat * mu_eps)(y) = int f(x) mu_hat(eps x) exp(-2 pi i x . y) dx``.

    A :class:`~varrestrict.errors.QuadratureAccuracyWarning` is issued when the
    box rule cannot reach its resolution target within ``grid3d.max_nodes``.
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    y = _vec3(y, "y")
    return complex(averaged_values(f, spec, [eps], y, grid3d)[0, 0])


def double_multiplier_values(f: TestFunction, spec: MeasureSpec, eps: float, eta: float, y,
                             grid3d: Grid3D = Grid3D(), info: QuadInfo | None = None) -> np.ndarray:
    """``int f(x) mu_hat(eps x) conj(mu_hat(eta x)) exp(-2 pi i x . y) dx`` by box quadrature.

    The catalogued transforms are real, so the conjugation is a no-op.
    """
    if not (eps > 0 and eta > 0):
        raise DomainError("eps and eta must be positive")
    pts, single = _points(y)
    info = QuadInfo() if info is None else info
    out = _box_values(f, spec, (eps, eta), pts, grid3d, info)
    return complex(out[0]) if single else out


def lp_norm(f: TestFunction, p: float, grid3d: Grid3D = Grid3D(),
            info: QuadInfo | None = None) -> float:
    """``(int |f|^p)^(1/p)`` by box quadrature."""
    if not p >= 1 or not math.isfinite(p):
        raise DomainError(f"lp_norm needs 1 <= p < inf, got {p}")
    if f.is_zero:
        return 0.0
    info = QuadInfo() if info is None else info
    lo, hi, width = _box_and_widths(f, None, 0.0, grid3d.radius_factor)
    spread = np.max(f.modulations, axis=0) - np.min(f.modulations, axis=0)
    rules = _axis_rules(lo, hi, width / math.sqrt(p), spread, grid3d, info, f"L^{p:g} norm")
    F = np.abs(_term_grid(f, rules)) ** p
    (_, w1), (_, w2), (_, w3) = rules
    total = np.einsum("ijk,i,j,k->", F, w1, w2, w3)
    return float(total) ** (1.0 / p)
