"""Product Gauss-Legendre quadrature on the unit sphere and the bilinear restriction form."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ._quadrature import gauss_legendre
from .errors import DomainError

__all__ = ["SphereGrid", "build_sphere_grid", "sphere_integrate", "restriction_bilinear_form",
           "l2_norm_squared"]

MAX_LEVEL = 64


@dataclass(frozen=True)
class SphereGrid:
    """Nodes on the unit sphere with positive weights summing to ``4 pi``.

    ``degree`` is the largest total degree of spherical harmonics integrated exactly.
    """

    nodes: np.ndarray
    weights: np.ndarray
    degree: int
    level: int

    def __len__(self) -> int:
        return self.weights.size

    def to_csv(self, path) -> None:
        """Write ``x,y,z,w`` rows."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "z", "w"])
            for (x, y, z), w in zip(self.nodes, self.weights):
                writer.writerow([repr(float(x)), repr(float(y)), repr(float(z)), repr(float(w))])

    def describe(self) -> dict:
        return {"kind": "gauss_product", "level": self.level, "nodes": len(self)}


def build_sphere_grid(level: int) -> SphereGrid:
    """Gauss-Legendre nodes in ``cos(theta)`` times ``2 level`` equispaced azimuths.

    ``level + 1`` polar nodes integrate polynomials in ``cos(theta)`` of degree
    ``2 level + 1``; the azimuthal trapezoid rule is exact for ``|m| < 2 level``.
    Together harmonics of degree up to ``2 level - 1`` are integrated exactly.
    """
    if int(level) != level or not 1 <= level <= MAX_LEVEL:
        raise DomainError(f"sphere grid level must be an integer in [1, {MAX_LEVEL}], got {level}")
    level = int(level)
    z, wz = gauss_legendre(level + 1, -1.0, 1.0)
    n_phi = 2 * level
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    s = np.sqrt(1.0 - z * z)
    nodes = np.stack([
        np.outer(s, np.cos(phi)).ravel(),
        np.outer(s, np.sin(phi)).ravel(),
        np.repeat(z, n_phi),
    ], axis=1)
    nodes /= np.linalg.norm(nodes, axis=1, keepdims=True)
    weights = np.repeat(wz, n_phi) * (2.0 * math.pi / n_phi)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereGrid(nodes, weights, 2 * level - 1, level)


def _per_node(grid: SphereGrid, values) -> np.ndarray:
    values = np.asarray(values)
    if values.shape[:1] != (len(grid),):
        raise DomainError(f"expected {len(grid)} values on the grid, got shape {values.shape}")
    return values


def sphere_integrate(grid: SphereGrid, values) -> complex:
    """``sum_i w_i values_i``; extra trailing axes are integrated independently."""
    values = _per_node(grid, values)
    out = np.tensordot(grid.weights, values, axes=(0, 0))
    return complex(out) if np.ndim(out) == 0 else out


def l2_norm_squared(grid: SphereGrid, g) -> float:
    """Discrete ``||g||^2`` in ``L^2(S^2, sigma)``."""
    g = _per_node(grid, g)
    return float(np.dot(grid.weights, np.abs(g) ** 2))


def restriction_bilinear_form(grid: SphereGrid, g, h, chunk: int = 256) -> complex:
    """``sum_ij w_i w_j g_i conj(g_j) h(omega_i - omega_j)``.

    ``h`` is a callable on arrays of shape ``(..., 3)``.  Rows are summed in a
    fixed order so repeated calls are bit identical.
    """
    g = _per_node(grid, np.asarray(g, dtype=complex))
    wg = grid.weights * g
    total = 0j
    for start in range(0, len(grid), chunk):
        rows = slice(start, start + chunk)
        diff = grid.nodes[rows, None, :] - grid.nodes[None, :, :]
        hv = np.asarray(h(diff), dtype=complex)
        total += complex(np.sum((hv @ np.conj(wg)) * wg[rows]))
    return total
