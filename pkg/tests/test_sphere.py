import csv
import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import sph_harm_y

from varrestrict.errors import DomainError
from varrestrict.sphere import (build_sphere_grid, l2_norm_squared, restriction_bilinear_form,
                                sphere_integrate)


def harmonic(grid, n, m):
    x, y, z = grid.nodes.T
    theta = np.arccos(np.clip(z, -1, 1))
    phi = np.arctan2(y, x)
    return sph_harm_y(n, m, theta, phi)


def geodesic_oracle(h_of_dist2):
    # int int h(|w - w'|^2) dsigma dsigma' = 4 pi * 2 pi int_{-1}^{1} h(2 - 2t) dt
    val, _ = integrate.quad(lambda t: h_of_dist2(2 - 2 * t), -1, 1, epsabs=1e-15, epsrel=1e-14)
    return 8 * math.pi ** 2 * val


def gauss_h(d):
    return np.exp(-math.pi * np.sum(d * d, axis=-1))


class TestGrid:
    def test_level_one(self):
        g = build_sphere_grid(1)
        assert len(g) == 4
        assert g.weights.sum() == pytest.approx(4 * math.pi, abs=1e-12)

    @pytest.mark.parametrize("level", [1, 2, 5, 8, 17, 64])
    def test_invariants(self, level):
        g = build_sphere_grid(level)
        assert np.max(np.abs(np.linalg.norm(g.nodes, axis=1) - 1)) < 1e-12
        assert abs(g.weights.sum() - 4 * math.pi) < 1e-10
        assert np.all(g.weights > 0)
        assert g.degree == 2 * level - 1
        assert len(g) == (level + 1) * 2 * level

    @pytest.mark.parametrize("level", [0, 65, 2.5, -1])
    def test_bad_level(self, level):
        with pytest.raises(DomainError):
            build_sphere_grid(level)

    def test_immutable(self):
        g = build_sphere_grid(3)
        with pytest.raises(ValueError):
            g.weights[0] = 1.0

    def test_csv_export(self, tmp_path):
        g = build_sphere_grid(2)
        path = tmp_path / "grid.csv"
        g.to_csv(path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["x", "y", "z", "w"]
        back = np.array(rows[1:], dtype=float)
        assert np.array_equal(back[:, :3], g.nodes)
        assert np.array_equal(back[:, 3], g.weights)


class TestIntegrate:
    grid = build_sphere_grid(8)

    def test_constant(self):
        assert sphere_integrate(self.grid, np.ones(len(self.grid))) == pytest.approx(4 * math.pi, abs=1e-12)

    def test_odd(self):
        assert abs(sphere_integrate(self.grid, self.grid.nodes[:, 2])) < 1e-12

    def test_z_squared(self):
        assert sphere_integrate(self.grid, self.grid.nodes[:, 2] ** 2) == pytest.approx(4 * math.pi / 3, abs=1e-10)

    def test_y32_norm(self):
        y = harmonic(self.grid, 3, 2)
        assert sphere_integrate(self.grid, np.abs(y) ** 2).real == pytest.approx(1.0, abs=1e-10)
        # the finer grid agrees
        fine = build_sphere_grid(32)
        assert sphere_integrate(fine, np.abs(harmonic(fine, 3, 2)) ** 2).real == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("level", [2, 5, 8])
    def test_declared_degree_exact(self, level):
        g = build_sphere_grid(level)
        for n in range(g.degree + 1):
            for m in range(-n, n + 1):
                want = math.sqrt(4 * math.pi) if n == 0 else 0.0
                assert abs(sphere_integrate(g, harmonic(g, n, m)) - want) < 1e-10

    def test_degree_beyond_fails(self):
        # the product rule is not exact one degree higher for some harmonic
        g = build_sphere_grid(4)
        errs = [abs(sphere_integrate(g, harmonic(g, g.degree + 1, m))) for m in range(-8, 9)]
        assert max(errs) > 1e-6

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            sphere_integrate(self.grid, np.ones(3))


class TestBilinearForm:
    grid = build_sphere_grid(8)

    def test_constant_h(self):
        g = np.ones(len(self.grid))
        val = restriction_bilinear_form(self.grid, g, lambda d: np.ones(d.shape[:-1]))
        assert val == pytest.approx((4 * math.pi) ** 2, rel=1e-13)

    def test_mean_zero_g(self):
        g = harmonic(self.grid, 1, 1)
        val = restriction_bilinear_form(self.grid, g, lambda d: np.ones(d.shape[:-1]))
        assert abs(val) < 1e-10

    def test_gaussian_h(self):
        want = geodesic_oracle(lambda s: math.exp(-math.pi * s))
        assert want == pytest.approx(4 * math.pi * (1 - math.exp(-4 * math.pi)), rel=1e-13)
        fine = build_sphere_grid(16)
        got = restriction_bilinear_form(fine, np.ones(len(fine)), gauss_h)
        assert got.real == pytest.approx(want, abs=1e-6)

    def test_refinement(self):
        g_fn = lambda n: np.exp(n[:, 2]) + 0.5j * n[:, 0]
        a = build_sphere_grid(12)
        b = build_sphere_grid(24)
        va = restriction_bilinear_form(a, g_fn(a.nodes), gauss_h)
        vb = restriction_bilinear_form(b, g_fn(b.nodes), gauss_h)
        assert abs(va - vb) < 1e-6

    def test_hermitian_real(self):
        rng = np.random.default_rng(0)
        g = rng.normal(size=len(self.grid)) + 1j * rng.normal(size=len(self.grid))
        val = restriction_bilinear_form(self.grid, g, gauss_h)
        assert abs(val.imag) < 1e-12 * abs(val)

    def test_cauchy_schwarz_bound(self):
        # |sum w_i w_j g_i conj(g_j) h_ij| <= sup|h| (sum_i w_i |g_i|)^2 <= sup|h| 4 pi ||g||^2
        rng = np.random.default_rng(1)
        g = rng.normal(size=len(self.grid)) + 1j * rng.normal(size=len(self.grid))
        val = abs(restriction_bilinear_form(self.grid, g, gauss_h))
        l1 = float(self.grid.weights @ np.abs(g))
        assert val <= l1 ** 2
        assert l1 ** 2 <= 4 * math.pi * l2_norm_squared(self.grid, g) * (1 + 1e-14)

    def test_deterministic_chunking(self):
        g = np.cos(self.grid.nodes[:, 0])
        a = restriction_bilinear_form(self.grid, g, gauss_h)
        b = restriction_bilinear_form(self.grid, g, gauss_h)
        assert a == b
        c = restriction_bilinear_form(self.grid, g, gauss_h, chunk=7)
        assert c == pytest.approx(a, rel=1e-13)
