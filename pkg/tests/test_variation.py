import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varrestrict.errors import CapError, DomainError
from varrestrict.variation import (SampledCurve, SampledSurface, bivar_objective, bivar_seminorm,
                                   chain_objective, exhaustive_variation_batch, var_norm,
                                   var_oracle_exhaustive, var_seminorm, variation_batch)

VALUE_SET = [0, 1, -1, 1j, -1j, 1 + 1j]

complex_values = st.builds(complex, st.floats(-5, 5), st.floats(-5, 5))
curves = st.lists(complex_values, min_size=1, max_size=9)
rhos = st.sampled_from([1.0, 1.3, 2.0, 2.5, 3.0, 7.0, 80.0, math.inf])


def curve(values):
    return SampledCurve.from_values(np.array(values, dtype=complex))


def subset_oracle(values, rho, with_first):
    # plain enumeration over itertools combinations, independent of both implementations;
    # values are rescaled so that large powers neither underflow nor overflow
    scale = max((abs(v) for v in values), default=0.0)
    if scale == 0.0:
        return 0.0
    values = [v / scale for v in values]
    best = 0.0
    n = len(values)
    for k in range(1, n + 1):
        for idx in itertools.combinations(range(n), k):
            sel = [values[i] for i in idx]
            d = [abs(b - a) for a, b in zip(sel, sel[1:])]
            if math.isinf(rho):
                s = max(d + ([abs(sel[0])] if with_first else []), default=0.0)
            else:
                s = sum(x ** rho for x in d) + (abs(sel[0]) ** rho if with_first else 0.0)
                s = s ** (1 / rho)
            best = max(best, s)
    return best * scale


class TestExamples:
    def test_constant_curve(self):
        res = var_seminorm(SampledCurve([1, 2, 3], [5, 5, 5]), 2)
        assert res.value == 0.0
        assert res.witness == (0,)

    def test_alternating_rho1(self):
        assert var_seminorm(SampledCurve([1, 2, 3, 4], [0, 1, 0, 1]), 1).value == 3.0

    def test_alternating_rho2(self):
        # exhaustive enumeration over all subsets
        res = var_seminorm(SampledCurve([1, 2, 3, 4], [0, 1, 0, 1]), 2)
        assert res.value == pytest.approx(math.sqrt(3), rel=1e-15)
        assert res.witness == (0, 1, 2, 3)

    def test_single_sample_norm(self):
        assert var_norm(SampledCurve([1.0], [3 + 4j]), 2.5).value == pytest.approx(5.0)

    def test_two_point_norm(self):
        assert var_norm(SampledCurve([1, 2], [1, 0]), 2).value == pytest.approx(math.sqrt(2))

    @pytest.mark.parametrize("rho", [1, 2, 3.5, math.inf])
    def test_constant_norm(self, rho):
        assert var_norm(curve([2 - 1j] * 5), rho).value == pytest.approx(abs(2 - 1j))

    def test_oracle_examples(self):
        assert var_oracle_exhaustive(curve([0, 1, 0, 1]), 2, False) == pytest.approx(math.sqrt(3))
        assert var_oracle_exhaustive(curve([3, 3]), 2, True) == pytest.approx(3.0)

    def test_sup_mode(self):
        res = var_seminorm(curve([0, 2, -1, 1]), math.inf)
        assert res.value == 3.0
        assert res.witness == (1, 2)


class TestErrors:
    def test_rho_below_one(self):
        with pytest.raises(DomainError):
            var_seminorm(curve([0, 1]), 0.5)

    def test_empty_curve(self):
        with pytest.raises(DomainError):
            SampledCurve([], [])

    @pytest.mark.parametrize("params", [[1, 1, 2], [2, 1, 3], [0, 1, 2], [-1, 1, 2]])
    def test_bad_params(self, params):
        with pytest.raises(DomainError):
            SampledCurve(params, [0, 0, 0])

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            SampledCurve([1, 2], [0, 1, 2])

    def test_oracle_cap(self):
        with pytest.raises(CapError):
            var_oracle_exhaustive(curve(np.zeros(21)), 2, False)

    def test_bivar_cap(self):
        with pytest.raises(CapError):
            bivar_seminorm(SampledSurface.from_values(np.zeros((13, 12))), 2)

    def test_bivar_unknown_mode(self):
        with pytest.raises(DomainError):
            bivar_seminorm(SampledSurface.from_values(np.zeros((3, 3))), 2, mode="fast")


class TestAgainstOracle:
    @pytest.mark.parametrize("rho", [1.0, 1.5, 2.0, 3.0, math.inf])
    @pytest.mark.parametrize("with_first", [False, True])
    def test_all_short_patterns(self, rho, with_first):
        n = 5
        pats = np.array(list(itertools.product(VALUE_SET, repeat=n)), dtype=complex)
        dp = variation_batch(pats, rho, with_first)
        ex = exhaustive_variation_batch(pats, rho, with_first)
        np.testing.assert_allclose(dp, ex, rtol=1e-12, atol=0)

    @given(curves, rhos)
    def test_seminorm_matches_subsets(self, values, rho):
        got = var_seminorm(curve(values), rho).value
        assert got == pytest.approx(subset_oracle(values, rho, False), rel=1e-12, abs=1e-300)

    @given(curves, rhos)
    def test_norm_matches_subsets(self, values, rho):
        got = var_norm(curve(values), rho).value
        assert got == pytest.approx(subset_oracle(values, rho, True), rel=1e-12, abs=1e-300)

    @given(curves, rhos)
    def test_batch_matches_scalar(self, values, rho):
        batch = variation_batch(np.array([values], dtype=complex), rho, True)[0]
        assert batch == pytest.approx(var_norm(curve(values), rho).value, rel=1e-13, abs=1e-300)


class TestProperties:
    @given(curves, rhos)
    def test_witness_reproduces_value(self, values, rho):
        for fn, first in ((var_seminorm, False), (var_norm, True)):
            res = fn(curve(values), rho)
            assert list(res.witness) == sorted(set(res.witness))
            again = chain_objective(values, res.witness, rho, first)
            assert again == pytest.approx(res.value, rel=1e-12, abs=1e-300)

    @given(curves, rhos)
    def test_norm_dominates(self, values, rho):
        c = curve(values)
        norm = var_norm(c, rho).value
        assert norm >= var_seminorm(c, rho).value * (1 - 1e-14)
        assert norm >= max(abs(v) for v in values) * (1 - 1e-14)

    @given(curves, st.floats(1, 6), st.floats(1, 6))
    def test_monotone_in_rho(self, values, r1, r2):
        lo, hi = sorted((r1, r2))
        c = curve(values)
        assert var_seminorm(c, lo).value >= var_seminorm(c, hi).value * (1 - 1e-12)

    @given(curves, rhos, complex_values)
    def test_homogeneity(self, values, rho, scale):
        c = curve(values)
        scaled = curve([scale * v for v in values])
        assert var_norm(scaled, rho).value == pytest.approx(
            abs(scale) * var_norm(c, rho).value, rel=1e-12, abs=1e-12)

    @given(curves, rhos, complex_values, st.integers(0, 9))
    def test_refinement(self, values, rho, extra, pos):
        pos = min(pos, len(values))
        refined = values[:pos] + [extra] + values[pos:]
        assert var_seminorm(curve(refined), rho).value >= var_seminorm(curve(values), rho).value * (1 - 1e-13)

    def test_large_rho_no_overflow(self):
        res = var_seminorm(curve([0, 1e200, 0]), 500)
        assert res.value == pytest.approx(1e200 * 2 ** (1 / 500), rel=1e-12)

    def test_lexicographic_tie_break(self):
        # both (0, 1) and (0, 1, 2, 3) give 2 for rho = 1 on [0, 2, 2, 2]; the prefix wins
        assert var_seminorm(curve([0, 2, 2, 2]), 1).witness == (0, 1)


class TestSerialization:
    def test_curve_round_trip(self):
        c = SampledCurve([0.5, 1.0], [1 + 2j, -3j])
        again = SampledCurve.from_dict(json.loads(json.dumps(c.to_dict())))
        assert np.array_equal(again.values, c.values)
        assert np.array_equal(again.params, c.params)

    def test_surface_round_trip(self):
        s = SampledSurface([1, 2], [1, 2, 3], np.arange(6).reshape(2, 3) * (1 + 1j))
        again = SampledSurface.from_dict(json.loads(json.dumps(s.to_dict())))
        assert np.array_equal(again.values, s.values)

    def test_unknown_key(self):
        with pytest.raises(DomainError):
            SampledCurve.from_dict({"params": [1], "values": [[0, 0]], "extra": 1})

    def test_immutable(self):
        c = curve([1, 2])
        with pytest.raises(ValueError):
            c.values[0] = 3


def surface_oracle(b, rho):
    n, m = b.shape
    best = 0.0
    chains = lambda k: [c for r in range(2, k + 1) for c in itertools.combinations(range(k), r)]
    for ce in chains(n):
        for ch in chains(m):
            best = max(best, bivar_objective(b, ce, ch, rho))
    return best


class TestBiparameter:
    def test_single_rectangle(self):
        assert bivar_seminorm(SampledSurface.from_values([[0, 0], [0, 1]]), 2).value == 1.0

    def test_product_surface(self):
        u = np.array([0, 1, 0])
        res = bivar_seminorm(SampledSurface.from_values(np.outer(u, u)), 2)
        assert res.value == pytest.approx(2.0)

    @pytest.mark.parametrize("shape", [(1, 5), (5, 1), (1, 1)])
    def test_degenerate(self, shape):
        assert bivar_seminorm(SampledSurface.from_values(np.ones(shape)), 2).value == 0.0

    @given(st.lists(complex_values, min_size=2, max_size=5),
           st.lists(complex_values, min_size=2, max_size=5), rhos)
    def test_additive_vanishes(self, u, v, rho):
        b = np.add.outer(np.array(u), np.array(v))
        assert bivar_seminorm(SampledSurface.from_values(b), rho).value <= 1e-12 * (1 + np.abs(b).max())

    @given(st.lists(complex_values, min_size=2, max_size=5),
           st.lists(complex_values, min_size=2, max_size=5), st.sampled_from([1.0, 2.0, 3.0]))
    def test_tensor_factorization(self, u, v, rho):
        b = np.outer(np.array(u), np.array(v))
        got = bivar_seminorm(SampledSurface.from_values(b), rho).value
        want = var_seminorm(curve(u), rho).value * var_seminorm(curve(v), rho).value
        assert got == pytest.approx(want, rel=1e-10, abs=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("rho", [1.0, 2.0, 3.0, math.inf])
    def test_exact_matches_enumeration(self, seed, rho):
        rng = np.random.default_rng(seed)
        b = rng.normal(size=(4, 5)) + 1j * rng.normal(size=(4, 5))
        res = bivar_seminorm(SampledSurface.from_values(b), rho)
        assert res.value == pytest.approx(surface_oracle(b, rho), rel=1e-12)
        assert bivar_objective(b, *res.witness, rho) == pytest.approx(res.value, rel=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_greedy_is_lower_bound(self, seed):
        rng = np.random.default_rng(seed)
        b = SampledSurface.from_values(rng.normal(size=(6, 6)))
        greedy = bivar_seminorm(b, 2, mode="greedy")
        exact = bivar_seminorm(b, 2)
        assert greedy.value <= exact.value * (1 + 1e-12)
        assert bivar_objective(b.values, *greedy.witness, 2) == pytest.approx(greedy.value)
        full = bivar_objective(b.values, tuple(range(6)), tuple(range(6)), 2)
        assert greedy.value >= full * (1 - 1e-12)

    def test_cap_boundary(self):
        b = SampledSurface.from_values(np.random.default_rng(0).normal(size=(12, 12)))
        assert bivar_seminorm(b, 2).value > 0
