import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varrestrict.errors import DomainError
from varrestrict.gaussdom import (DominationReport, capital_psi, capital_psi_alpha_integral,
                                  capital_psi_r_integral, domination_ratio, origin_limit, psi,
                                  radius_profile, tail_limit, write_profile_csv)
from varrestrict.measures import MeasureSpec, vartheta

SPECS = [MeasureSpec.gaussian(0.5), MeasureSpec.gaussian(1.0), MeasureSpec.gaussian(2.0),
         MeasureSpec.ball(), MeasureSpec.sphere()]


def directions(n, seed):
    v = np.random.default_rng(seed).normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def samples(n, seed, lo=-4, hi=4):
    r = np.geomspace(10.0 ** lo, 10.0 ** hi, n)
    return r[:, None] * directions(n, seed)


class TestPsi:
    def test_origin(self):
        assert psi((0, 0, 0)) == 0.0

    def test_maximum(self):
        x = np.array([1.0, 0, 0]) / math.sqrt(math.pi)
        assert psi(x) == pytest.approx(2 / math.e, abs=1e-15)
        assert psi(x) == pytest.approx(0.735759, abs=1e-6)
        r = np.linspace(0, 5, 20001)[:, None] * np.array([[0, 1.0, 0]])
        assert np.max(psi(r)) <= 2 / math.e + 1e-15

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 2.5])
    def test_gaussian_vartheta(self, alpha):
        x = alpha * samples(50, 1, -2, math.log10(5))
        assert np.allclose(psi(x / alpha), vartheta(MeasureSpec.gaussian(alpha), x), rtol=1e-13, atol=0)


class TestCapitalPsi:
    def test_origin(self):
        assert capital_psi((0, 0, 0), 1.0) == 0.0
        assert capital_psi((1e-3, 0, 0), 1.0) > 0

    @pytest.mark.parametrize("delta", [0.5, 1.0, 2.0])
    def test_origin_asymptotics(self, delta):
        for r in (1e-3, 1e-4):
            val = capital_psi((r, 0, 0), delta) / r ** 2
            assert val == pytest.approx(origin_limit(delta), rel=10 * r ** 2)
        assert origin_limit(1.0) == pytest.approx(2 * math.pi / 3)

    def test_small_x_delta_one(self):
        r = 1e-2
        assert capital_psi((r, 0, 0), 1.0) == pytest.approx(2 * math.pi * r * r / 3, rel=1e-3)

    def test_unit_delta_one_against_quadrature(self):
        x = (1.0, 0.0, 0.0)
        assert capital_psi(x, 1.0) == pytest.approx(capital_psi_alpha_integral(x, 1.0), rel=1e-8)

    @pytest.mark.parametrize("delta", [0.5, 1.0, 2.0])
    def test_against_alpha_integral(self, delta):
        for r in np.geomspace(1e-3, 1e3, 25):
            x = (0.0, r, 0.0)
            assert capital_psi(x, delta) == pytest.approx(capital_psi_alpha_integral(x, delta), rel=1e-8)

    def test_r_and_alpha_forms_agree(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            delta = rng.uniform(0.1, 4.0)
            x = 10 ** rng.uniform(-3, 3) * directions(1, int(rng.integers(1 << 30)))[0]
            a = capital_psi_alpha_integral(x, delta)
            b = capital_psi_r_integral(x, delta)
            assert b == pytest.approx(a, rel=1e-10)

    @pytest.mark.parametrize("delta", [0.5, 1.0, 2.0, 3.0])
    def test_tail_limit(self, delta):
        r = 1e4
        assert capital_psi((r, 0, 0), delta) * r ** delta == pytest.approx(tail_limit(delta), rel=1e-12)

    @pytest.mark.parametrize("delta", [0.5, 1.0, 2.0])
    def test_monotone_parts(self, delta):
        # Psi |x|^delta = pi^(-delta/2) gamma(delta/2 + 1, pi |x|^2) grows with |x|;
        # Psi itself rises from 0 and then decays like |x|^-delta
        r = np.geomspace(1e-3, 30, 2000)
        v = capital_psi(r[:, None] * np.array([[0, 0, 1.0]]), delta)
        below = r <= 2.0  # beyond, the increments drop under rounding of the saturated value
        assert np.all(np.diff((v * r ** delta)[below]) > 0)
        k = int(np.argmax(v))
        assert 0 < k < r.size - 1
        assert np.all(np.diff(v[:k + 1]) > 0) and np.all(np.diff(v[k:]) < 0)

    @settings(max_examples=50)
    @given(st.one_of(st.just(0.0), st.floats(1e-100, 50.0)), st.floats(0.05, 5.0))
    def test_positive_and_below_psi_integral_bound(self, r, delta):
        # psi <= 2/e, so Psi <= (2/e) / delta
        v = capital_psi((r, 0, 0), delta)
        assert 0 <= v <= 2 / math.e / delta + 1e-15
        if r > 0:
            assert v > 0

    @pytest.mark.parametrize("delta", [0.0, -1.0, math.nan, math.inf])
    def test_bad_delta(self, delta):
        with pytest.raises(DomainError):
            capital_psi((1, 0, 0), delta)


class TestDomination:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("delta", [0.5, 1.0, 2.0])
    def test_gaussian_finite(self, alpha, delta):
        rep = domination_ratio(MeasureSpec.gaussian(alpha), delta, samples(10_000, 7))
        assert np.isfinite(rep.sup_ratio)
        assert not rep.diverging_tail
        assert rep.tail_slope < 0
        # near the origin vartheta / Psi -> (2 + delta) / alpha^2
        assert rep.sup_ratio >= (2 + delta) / alpha ** 2 * (1 - 1e-6)
        if alpha <= 1:
            # psi(x / alpha) <= psi(x) ... the origin limit is the supremum
            assert rep.sup_ratio == pytest.approx((2 + delta) / alpha ** 2, rel=1e-6)

    def test_witness_attains_sup(self):
        spec = MeasureSpec.gaussian(1.0)
        rep = domination_ratio(spec, 1.0, samples(500, 3))
        w = np.array(rep.witness)
        assert abs(vartheta(spec, w)) / capital_psi(w, 1.0) == pytest.approx(rep.sup_ratio, rel=1e-14)

    def test_refinement_stable(self):
        spec = MeasureSpec.gaussian(1.0)
        a = domination_ratio(spec, 1.0, samples(10_000, 1)).sup_ratio
        b = domination_ratio(spec, 1.0, samples(20_000, 2)).sup_ratio
        assert abs(a - b) <= 0.01 * b

    @pytest.mark.parametrize("delta", [0.5, 1.0, 2.0])
    def test_tail_constant_stable(self, delta):
        rep = domination_ratio(MeasureSpec.gaussian(1.0), delta, samples(100, 0))
        assert rep.tail_stability <= 0.02
        assert rep.tail_constant == pytest.approx(tail_limit(delta), rel=1e-6)
        assert rep.origin_constant == pytest.approx(origin_limit(delta), rel=1e-6)

    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"{s.kind}")
    def test_origin_bounded(self, spec):
        rep = domination_ratio(spec, 1.0, samples(100, 0))
        assert np.isfinite(rep.vartheta_origin_constant) and rep.vartheta_origin_constant > 0

    @pytest.mark.parametrize("delta", [0.25, 0.5, 1.0])
    def test_sphere_diverges(self, delta):
        rep = domination_ratio(MeasureSpec.sphere(), delta, samples(200, 0))
        assert rep.diverging_tail
        assert rep.tail_slope == pytest.approx(delta, abs=0.15)

    def test_ball_needs_small_delta(self):
        # ball vartheta decays like |x|^-2
        assert not domination_ratio(MeasureSpec.ball(), 1.0, samples(200, 0)).diverging_tail
        assert domination_ratio(MeasureSpec.ball(), 3.0, samples(200, 0)).diverging_tail

    def test_errors(self):
        spec = MeasureSpec.gaussian()
        with pytest.raises(DomainError):
            domination_ratio(spec, 1.0, np.zeros((0, 3)))
        with pytest.raises(DomainError):
            domination_ratio(spec, 1.0, [[0.0, 0.0, 0.0], [1.0, 0, 0]])
        with pytest.raises(DomainError):
            domination_ratio(spec, 0.0, [[1.0, 0, 0]])

    def test_json(self):
        rep = domination_ratio(MeasureSpec.sphere(), 0.5, samples(20, 0))
        d = json.loads(json.dumps(rep.to_dict()))
        assert d["diverging_tail"] is True and len(d["witness"]) == 3
        assert DominationReport(**{**d, "witness": tuple(d["witness"])}) == rep


def test_profile_csv(tmp_path):
    spec = MeasureSpec.ball()
    radii = np.geomspace(0.01, 100, 9)
    prof = radius_profile(spec, 1.0, radii)
    assert prof.shape == (9, 4)
    assert np.allclose(prof[:, 3], np.abs(prof[:, 1]) / prof[:, 2])
    path = tmp_path / "p.csv"
    write_profile_csv(path, prof)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["r", "vartheta", "Psi", "ratio"]
    assert np.array_equal(np.array(rows[1:], dtype=float), prof)
    with pytest.raises(DomainError):
        radius_profile(spec, 1.0, [0.0, 1.0])
