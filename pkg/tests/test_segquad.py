import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import make_rng, random_hermitian_raw, random_psd
from hhmat.errors import BadParams, NoConvergence, RTooLarge, SpectrumOutOfDomain
from hhmat.funcat import CATALOG_DESCRIPTORS, builtin, from_descriptor
from hhmat.matcore import apply_function, hermitian_from
from hhmat.segquad import (
    QuadratureSpec,
    poly_segment_oracle,
    poly_segment_oracle_exact,
    scalar_segment_integral,
    segment_integral,
)

A_FIXED = hermitian_from([[2.0, 1.0], [1.0, 1.0]])
B_FIXED = hermitian_from([[1.0, 0.0], [0.0, 0.0]])


class TestSpec:
    def test_defaults(self):
        spec = QuadratureSpec()
        assert spec.nodes == 16 and spec.refine and spec.rtol == 1e-11

    def test_validation(self):
        with pytest.raises(BadParams):
            QuadratureSpec(nodes=0)
        with pytest.raises(BadParams):
            QuadratureSpec(rtol=0.0)


class TestSegmentIntegral:
    def test_linear_integrand_gives_midpoint(self):
        rng = make_rng(0)
        a, b = random_hermitian_raw(4, rng), random_hermitian_raw(4, rng)
        out = segment_integral(builtin("identity"), a, b)
        np.testing.assert_allclose(out.entries, ((a + b) / 2.0).entries, atol=1e-12)

    def test_cube_on_fixed_pair(self):
        out = segment_integral(builtin("cube"), A_FIXED, B_FIXED)
        np.testing.assert_allclose(
            out.entries.real, [[31 / 6, 5 / 2], [5 / 2, 4 / 3]], atol=1e-12)

    def test_square_matches_word_formula(self):
        rng = make_rng(1)
        f = builtin("power", 2)
        for _ in range(25):
            a, b = random_hermitian_raw(3, rng), random_hermitian_raw(3, rng)
            am, bm = a.entries, b.entries
            expected = am @ am / 3.0 + (am @ bm + bm @ am) / 6.0 + bm @ bm / 3.0
            out = segment_integral(f, a, b)
            assert np.max(np.abs(out.entries - expected)) <= 1e-11 * max(1.0, np.max(np.abs(expected)))

    def test_swap_symmetry(self):
        rng = make_rng(2)
        f = builtin("exp")
        a, b = random_hermitian_raw(3, rng), random_hermitian_raw(3, rng)
        lhs = segment_integral(f, a, b).entries
        rhs = segment_integral(f, b, a).entries
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(lhs)))

    def test_equal_endpoints_collapse_for_whole_catalog(self):
        rng = make_rng(3)
        for desc in CATALOG_DESCRIPTORS:
            f = from_descriptor(desc)
            lo = f.domain.lo if math.isfinite(f.domain.lo) else -1.0
            a = random_psd(3, rng) + (lo + 0.3) * hermitian_from(np.eye(3))
            out = segment_integral(f, a, a)
            expected = apply_function(f, a)
            scale = max(1.0, float(np.max(np.abs(expected.entries))))
            assert np.max(np.abs(out.entries - expected.entries)) <= 1e-10 * scale, desc

    def test_output_exactly_hermitian(self):
        rng = make_rng(4)
        a, b = random_hermitian_raw(3, rng), random_hermitian_raw(3, rng)
        out = segment_integral(builtin("exp"), a, b)
        assert out.asymmetry_residual == 0.0

    def test_domain_violation_raises(self):
        indefinite = hermitian_from(np.diag([1.0, -1.0]))
        pd = hermitian_from(np.diag([1.0, 2.0]))
        with pytest.raises(SpectrumOutOfDomain):
            segment_integral(builtin("inverse"), indefinite, pd)

    def test_unreachable_rtol_hits_node_cap(self):
        rng = make_rng(5)
        a, b = random_hermitian_raw(2, rng), random_hermitian_raw(2, rng)
        with pytest.raises(NoConvergence):
            segment_integral(builtin("exp"), a, b, QuadratureSpec(nodes=4, rtol=1e-300))


class TestWordOracle:
    def test_r_one_is_midpoint(self):
        out = poly_segment_oracle(1, A_FIXED, B_FIXED)
        np.testing.assert_allclose(out.entries, ((A_FIXED + B_FIXED) / 2.0).entries, atol=1e-15)

    def test_r_three_fixed_pair(self):
        out = poly_segment_oracle(3, A_FIXED, B_FIXED)
        np.testing.assert_allclose(
            out.entries.real, [[31 / 6, 5 / 2], [5 / 2, 4 / 3]], atol=1e-13)

    def test_equal_identity_inputs(self):
        eye = hermitian_from(np.eye(2))
        out = poly_segment_oracle(2, eye, eye)
        np.testing.assert_allclose(out.entries, np.eye(2), atol=1e-15)

    def test_r_bounds(self):
        with pytest.raises(RTooLarge):
            poly_segment_oracle(7, A_FIXED, B_FIXED)
        with pytest.raises(BadParams):
            poly_segment_oracle(0, A_FIXED, B_FIXED)

    def test_exact_variant_fixed_pair(self):
        a = np.array([[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]], dtype=object)
        b = np.array([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(0)]], dtype=object)
        out = poly_segment_oracle_exact(3, a, b)
        assert out[0, 0] == Fraction(31, 6)
        assert out[0, 1] == Fraction(5, 2)
        assert out[1, 1] == Fraction(4, 3)

    def test_exact_r_one(self):
        a = np.array([[Fraction(2)]], dtype=object)
        b = np.array([[Fraction(0)]], dtype=object)
        assert poly_segment_oracle_exact(1, a, b)[0, 0] == Fraction(1)


class TestOracleEquivalence:
    def test_quadrature_matches_words_sampled(self):
        # exactness: an n-node rule integrates degree 2n-1, so nodes=4 covers r<=6
        rng = make_rng(6)
        spec = QuadratureSpec(nodes=4, refine=False)
        for _ in range(20):
            n = int(rng.integers(2, 7))
            a = random_hermitian_raw(n, rng)
            b = random_hermitian_raw(n, rng)
            for r in range(1, 7):
                f = builtin("power", r)
                quad = segment_integral(f, a, b, spec)
                words = poly_segment_oracle(r, a, b)
                scale = max(1.0, float(np.max(np.abs(words.entries))))
                assert np.max(np.abs(quad.entries - words.entries)) <= 1e-11 * scale


class TestScalarIntegral:
    def test_polynomial(self):
        assert scalar_segment_integral(lambda t: t * t, 0.0, 1.0) == pytest.approx(1 / 3, abs=1e-13)

    def test_exponential(self):
        assert scalar_segment_integral(math.exp, 0.0, 1.0) == pytest.approx(math.e - 1.0, abs=1e-12)

    def test_bad_interval(self):
        with pytest.raises(BadParams):
            scalar_segment_integral(math.exp, 1.0, 0.0)

    def test_oscillatory_integrand_does_not_settle(self):
        with pytest.raises(NoConvergence):
            scalar_segment_integral(lambda t: math.sin(1e8 * t), 0.0, 1.0)
