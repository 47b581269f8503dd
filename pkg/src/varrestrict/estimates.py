"""Empirical ratio testers for the variational restriction inequalities.

Every tester returns a :class:`RatioReport` holding the computed left and right
sides, their ratio and a fingerprint of all inputs.  Nothing here certifies a
constant: each ratio is a finite-sample lower bound for the quantity it probes.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ._jsonio import fingerprint, jsonable
from .errors import DomainError
from .fourier import (EpsLadder, Grid3D, QuadInfo, TestFunction, averaged_values,
                      double_multiplier_values, lp_norm)
from .measures import MeasureSpec
from .sphere import SphereGrid, l2_norm_squared, restriction_bilinear_form
from .variation import SampledSurface, bivar_seminorm, variation_batch

__all__ = [
    "RatioReport",
    "fingerprint",
    "variation_curve",
    "theorem1_ratio",
    "maximal_ratio",
    "condition_a_l2_probe",
    "condition_c_probe",
    "tomas_stein_ratio",
]

#: Relative increase of a probe under ladder doubling above which it is flagged.
GROWTH_TOLERANCE = 0.05


@dataclass(frozen=True)
class RatioReport:
    """Left side, right side and ratio of one empirical inequality.

    ``ratio`` is ``None`` (and ``"undefined_ratio"`` is in ``flags``) when the
    right side vanishes.  ``metadata`` carries per-node values and quadrature
    warnings.
    """

    lhs: float
    rhs: float
    ratio: float | None
    config_fingerprint: str
    flags: tuple = ()
    metadata: dict = field(default_factory=dict, compare=False)

    @classmethod
    def build(cls, lhs: float, rhs: float, config: dict, flags=(), metadata=None) -> "RatioReport":
        flags = list(flags)
        if rhs > 0:
            ratio = lhs / rhs
        else:
            ratio = None
            flags.append("undefined_ratio")
        return cls(float(lhs), float(rhs), ratio, fingerprint(config), tuple(flags),
                   dict(metadata or {}))

    def to_dict(self) -> dict:
        return jsonable({
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "config_fingerprint": self.config_fingerprint,
            "flags": list(self.flags),
            "metadata": self.metadata,
        })

    def to_csv(self, path) -> None:
        """Per-node profile ``index, x, y, z, weight, value`` when available, else the summary."""
        nodes = self.metadata.get("nodes")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            if nodes is None:
                writer.writerow(["lhs", "rhs", "ratio"])
                writer.writerow([repr(self.lhs), repr(self.rhs),
                                 "" if self.ratio is None else repr(self.ratio)])
                return
            writer.writerow(["index", "x", "y", "z", "weight", "value"])
            for i, (pt, w, v) in enumerate(zip(nodes, self.metadata["weights"],
                                               self.metadata["node_values"])):
                writer.writerow([i, *(repr(float(c)) for c in pt), repr(float(w)), repr(float(v))])


def _config(op: str, **items) -> dict:
    out = {"op": op}
    for k, v in items.items():
        out[k] = v.to_dict() if hasattr(v, "to_dict") else v
    return out


def _grid_config(grid: SphereGrid) -> dict:
    return grid.describe()


def _rho(rho: float) -> float:
    rho = float(rho)
    if math.isnan(rho) or rho < 1:
        raise DomainError(f"rho must lie in [1, inf], got {rho}")
    return rho


def _which(which: str) -> bool:
    if which not in ("norm", "seminorm"):
        raise DomainError(f"which must be 'norm' or 'seminorm', got {which!r}")
    return which == "norm"


def _curves_on_sphere(f, spec, grid, ladder, grid3d, info) -> np.ndarray:
    """Samples ``(f_hat * mu_eps)(omega_i)`` with shape ``(nodes, ladder)``."""
    return averaged_values(f, spec, ladder.values, grid.nodes, grid3d, info).T


# --- pointwise functional -------------------------------------------------------

def variation_curve(f: TestFunction, spec: MeasureSpec, omega, ladder: EpsLadder, rho: float,
                    which: str = "norm", grid3d: Grid3D = Grid3D()) -> float:
    """rho-variation (norm or seminorm) of ``eps -> (f_hat * mu_eps)(omega)`` on the ladder."""
    rho = _rho(rho)
    with_first = _which(which)
    a = averaged_values(f, spec, ladder.values, np.asarray(omega, dtype=float), grid3d)[:, 0]
    return float(variation_batch(a, rho, with_first))


# --- sphere-based ratios ----------------------------------------------------------

def _sphere_report(op, f, spec, grid, ladder, grid3d, inner, extra_config, flags):
    info = QuadInfo()
    a = _curves_on_sphere(f, spec, grid, ladder, grid3d, info)
    node_values = inner(a)
    lhs = math.sqrt(float(np.dot(grid.weights, node_values ** 2)))
    rhs = lp_norm(f, 4.0 / 3.0, grid3d, info)
    config = _config(op, f=f, spec=spec, grid=_grid_config(grid), ladder=ladder, grid3d=grid3d,
                     **extra_config)
    meta = {"node_values": node_values, "nodes": grid.nodes, "weights": grid.weights,
            "warnings": info.warnings}
    if info.warnings:
        flags = list(flags) + ["quadrature_accuracy"]
    return RatioReport.build(lhs, rhs, config, flags, meta)


def theorem1_ratio(f: TestFunction, spec: MeasureSpec, rho: float, grid: SphereGrid,
                   ladder: EpsLadder, grid3d: Grid3D = Grid3D()) -> RatioReport:
    """``||V^rho_eps (f_hat * mu_eps)(omega)||_{L^2(sigma)} / ||f||_{4/3}``.

    Values of ``rho <= 1`` are computed but flagged ``outside_theorem``.
    """
    rho = _rho(rho)
    flags = [] if rho > 1 else ["outside_theorem"]
    return _sphere_report("theorem1", f, spec, grid, ladder, grid3d,
                          lambda a: variation_batch(a, rho, True), {"rho": rho}, flags)


def maximal_ratio(f: TestFunction, spec: MeasureSpec, grid: SphereGrid, ladder: EpsLadder,
                  grid3d: Grid3D = Grid3D()) -> RatioReport:
    """``||max_eps |(f_hat * mu_eps)(omega)| ||_{L^2(sigma)} / ||f||_{4/3}``."""
    return _sphere_report("maximal", f, spec, grid, ladder, grid3d,
                          lambda a: np.abs(a).max(axis=1), {}, [])


def tomas_stein_ratio(grid: SphereGrid, g, h: TestFunction,
                      grid3d: Grid3D = Grid3D()) -> RatioReport:
    """``|sum w_i w_j g_i conj(g_j) h(omega_i - omega_j)| / (||g||^2 ||h||_2)``."""
    g = np.asarray(g, dtype=complex)
    info = QuadInfo()
    lhs = abs(restriction_bilinear_form(grid, g, h))
    g2 = l2_norm_squared(grid, g)
    rhs = g2 * lp_norm(h, 2.0, grid3d, info) if g2 > 0 else 0.0
    config = _config("tomas_stein", grid=_grid_config(grid), g=[[z.real, z.imag] for z in g],
                     h=h, grid3d=grid3d)
    flags = ["quadrature_accuracy"] if info.warnings else []
    return RatioReport.build(lhs, rhs, config, flags,
                             {"g_norm_squared": g2, "warnings": info.warnings})


# --- condition probes -----------------------------------------------------------

def _samples(sample_points, weights):
    pts = np.atleast_2d(np.asarray(sample_points, dtype=float))
    if pts.size == 0:
        raise DomainError("need at least one sample point")
    if pts.shape[-1] != 3:
        raise DomainError("sample points must be 3-vectors")
    if weights is None:
        w = np.ones(pts.shape[0])
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (pts.shape[0],) or np.any(~(w > 0)):
            raise DomainError("cell weights must be positive, one per sample point")
    return pts, w


def _convolution_samples(h, spec, eps, pts, grid3d, info) -> np.ndarray:
    """``(h * mu_eps)(x)`` via the multiplier identity; shape ``(points, ladder)``."""
    return averaged_values(h.fourier_dual(), spec, eps, -pts, grid3d, info).T


def condition_a_l2_probe(h: TestFunction, spec: MeasureSpec, rho: float, sample_points,
                         ladder: EpsLadder, grid3d: Grid3D = Grid3D(), weights=None,
                         growth_check: bool = True) -> RatioReport:
    """Sampled ``||V~^rho_eps (h * mu_eps)(x)||_{L^2(dx)} / ||h||_2``.

    The spatial ``L^2`` norm is replaced by a weighted sum over ``sample_points``,
    so the left side is a lower-bound probe.  With ``growth_check`` the probe is
    repeated on ladders with twice and four times as many points; a relative
    increase above ``GROWTH_TOLERANCE`` from the doubled to the quadrupled ladder
    is flagged ``non_convergent``.
    """
    rho = _rho(rho)
    pts, w = _samples(sample_points, weights)
    info = QuadInfo()

    def lhs_for(lad):
        a = _convolution_samples(h, spec, lad.values, pts, grid3d, info)
        v = variation_batch(a, rho, False)
        return math.sqrt(float(np.dot(w, v ** 2))), v

    lhs, node_values = lhs_for(ladder)
    flags, meta = [], {"node_values": node_values, "nodes": pts, "weights": w}
    if growth_check and ladder.count > 1:
        ladder_lhs = [lhs]
        for mult in (2, 4):
            lad = EpsLadder(ladder.eps_min, ladder.eps_max, ladder.count * mult)
            ladder_lhs.append(lhs_for(lad)[0])
        meta["ladder_counts"] = [ladder.count, 2 * ladder.count, 4 * ladder.count]
        meta["ladder_lhs"] = ladder_lhs
        base = ladder_lhs[1]
        growth = (ladder_lhs[2] - base) / base if base > 0 else 0.0
        meta["ladder_growth"] = growth
        if growth > GROWTH_TOLERANCE:
            flags.append("non_convergent")
    rhs = lp_norm(h, 2.0, grid3d, info)
    meta["warnings"] = info.warnings
    if info.warnings:
        flags.append("quadrature_accuracy")
    config = _config("condition_a", h=h, spec=spec, rho=rho, samples=pts, weights=w,
                     ladder=ladder, grid3d=grid3d, growth_check=growth_check)
    return RatioReport.build(lhs, rhs, config, flags, meta)


def condition_c_probe(h: TestFunction, spec: MeasureSpec, rho: float, sample_points,
                      eps_ladder: EpsLadder, eta_ladder: EpsLadder, grid3d: Grid3D = Grid3D(),
                      weights=None, mode: str = "exact") -> RatioReport:
    """Sampled ``||W~^rho_{eps,eta} (h * mu_eps * conj(mu)_eta)(x)||_{L^2(dx)} / ||h||_2``.

    Surface values come from box quadrature of ``h_hat(xi) mu_hat(eps xi)
    conj(mu_hat(eta xi))``.  For a Gaussian measure they are cross-checked
    against the semigroup closed form ``mu_hat(sqrt(eps^2 + eta^2) xi)``; the
    largest discrepancy is ``metadata["semigroup_max_abs_diff"]``.
    """
    rho = _rho(rho)
    pts, w = _samples(sample_points, weights)
    info = QuadInfo()
    dual = h.fourier_dual()
    E, H = eps_ladder.values, eta_ladder.values
    quad_grid = Grid3D(grid3d.nodes, grid3d.radius_factor, grid3d.max_nodes, "quadrature")
    surf = np.empty((pts.shape[0], E.size, H.size), dtype=complex)
    for i, e in enumerate(E):
        for j, t in enumerate(H):
            surf[:, i, j] = double_multiplier_values(dual, spec, e, t, -pts, quad_grid, info)
    meta = {}
    if spec.is_gaussian:
        combined = np.sqrt(E[:, None] ** 2 + H[None, :] ** 2).ravel()
        closed = averaged_values(dual, spec, combined, -pts, Grid3D(method="closed_form"))
        closed = closed.T.reshape(surf.shape)
        meta["semigroup_max_abs_diff"] = float(np.max(np.abs(closed - surf)))
    node_values = np.array([
        bivar_seminorm(SampledSurface(E, H, surf[k]), rho, mode=mode).value
        for k in range(pts.shape[0])
    ])
    lhs = math.sqrt(float(np.dot(w, node_values ** 2)))
    rhs = lp_norm(h, 2.0, grid3d, info)
    meta.update({"node_values": node_values, "nodes": pts, "weights": w,
                 "warnings": info.warnings})
    flags = ["quadrature_accuracy"] if info.warnings else []
    config = _config("condition_c", h=h, spec=spec, rho=rho, samples=pts, weights=w,
                     eps_ladder=eps_ladder, eta_ladder=eta_ladder, grid3d=grid3d, mode=mode)
    return RatioReport.build(lhs, rhs, config, flags, meta)
