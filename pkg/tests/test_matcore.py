import math

import numpy as np
import pytest

from conftest import eig2x2, make_rng, random_hermitian_raw, random_unitary
from hhmat import funcat, matcore
from hhmat.errors import BadSpec, ExcessAsymmetryError, NonSquareError, SpectrumOutOfDomain
from hhmat.matcore import (
    NormSpec,
    apply_function,
    eig,
    hermitian_from,
    matrix_from_json,
    matrix_to_json,
    ui_norm,
)


class TestConstruction:
    def test_hermitian_input_kept_verbatim(self):
        h = hermitian_from([[2.0, 1.0], [1.0, 1.0]])
        np.testing.assert_array_equal(h.entries, np.array([[2, 1], [1, 1]], dtype=complex))
        assert h.asymmetry_residual == 0.0

    def test_zero_matrix(self):
        h = hermitian_from(np.zeros((2, 2)))
        assert h.asymmetry_residual == 0.0
        assert h.trace == 0.0

    def test_complex_hermitian_fixed_point(self):
        raw = np.array([[1.0, 1j], [-1j, 1.0]])
        h = hermitian_from(raw)
        np.testing.assert_array_equal(h.entries, raw)

    def test_small_asymmetry_symmetrized_and_recorded(self):
        raw = np.array([[1.0, 0.5 + 1e-12], [0.5, 1.0]])
        h = hermitian_from(raw)
        assert 0.0 < h.asymmetry_residual < 1e-11
        np.testing.assert_array_equal(h.entries, h.entries.conj().T)

    def test_excess_asymmetry_rejected(self):
        with pytest.raises(ExcessAsymmetryError):
            hermitian_from([[0.0, 1.0], [0.0, 0.0]])

    def test_non_square_rejected(self):
        with pytest.raises(NonSquareError):
            hermitian_from([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])

    def test_entries_immutable(self):
        h = hermitian_from(np.eye(2))
        with pytest.raises(ValueError):
            h.entries[0, 0] = 5.0


class TestEig:
    def test_diagonal_sorted_descending(self):
        es = eig(hermitian_from(np.diag([1.0, 3.0, 2.0])))
        np.testing.assert_allclose(es.values, [3.0, 2.0, 1.0], atol=1e-14)

    def test_two_by_two_against_quadratic_formula(self):
        h = hermitian_from([[1.5, 0.5], [0.5, 0.5]])
        expected = eig2x2(h.entries)  # (2 +- sqrt(2)) / 2
        np.testing.assert_allclose(eig(h).values, expected, atol=1e-13)
        np.testing.assert_allclose(expected, [(2 + math.sqrt(2)) / 2, (2 - math.sqrt(2)) / 2])

    def test_identity_spectrum(self):
        es = eig(hermitian_from(np.eye(4)))
        np.testing.assert_allclose(es.values, np.ones(4), atol=1e-14)

    def test_reconstruction_and_orthonormality_random(self):
        rng = make_rng(42)
        for trial in range(1000):
            n = int(rng.integers(1, 13))
            h = random_hermitian_raw(n, rng, scale=float(rng.uniform(0.1, 10.0)))
            es = eig(h)
            assert np.all(np.diff(es.values) <= 1e-14)
            scale = max(1.0, es.spectral_radius)
            assert np.max(np.abs(es.reconstruct() - h.entries)) <= 1e-10 * scale
            assert np.max(np.abs(es.vectors.conj().T @ es.vectors - np.eye(n))) <= 1e-10


class TestApplyFunction:
    def test_identity_function_is_noop(self):
        rng = make_rng(1)
        h = random_hermitian_raw(5, rng)
        out = apply_function(funcat.builtin("identity"), h)
        np.testing.assert_allclose(out.entries, h.entries, atol=1e-12)

    def test_cube_of_midpoint_matches_fixed_value(self):
        a = hermitian_from([[2.0, 1.0], [1.0, 1.0]])
        b = hermitian_from([[1.0, 0.0], [0.0, 0.0]])
        mid = (a + b) / 2.0
        out = apply_function(funcat.builtin("cube"), mid)
        np.testing.assert_allclose(
            out.entries.real, [[17 / 4, 7 / 4], [7 / 4, 3 / 4]], atol=1e-13)

    def test_square_on_diagonal(self):
        out = apply_function(funcat.builtin("power", 2), hermitian_from(np.diag([-1.0, 2.0])))
        np.testing.assert_allclose(out.entries.real, np.diag([1.0, 4.0]), atol=1e-13)

    def test_spectrum_out_of_domain(self):
        h = hermitian_from(np.diag([-1.0, 2.0]))
        with pytest.raises(SpectrumOutOfDomain) as err:
            apply_function(funcat.builtin("cube"), h)
        assert any(x < 0 for x in err.value.offending)

    def test_spectral_mapping_property(self):
        rng = make_rng(7)
        fs = [funcat.builtin("exp"), funcat.builtin("power", 2), funcat.builtin("affine", -1.5, 0.25)]
        for trial in range(60):
            f = fs[trial % len(fs)]
            h = random_hermitian_raw(int(rng.integers(1, 7)), rng)
            image = eig(apply_function(f, h)).values
            direct = np.sort(f.eval_array(eig(h).values))[::-1]
            np.testing.assert_allclose(image, direct, atol=1e-9 * max(1.0, np.max(np.abs(direct))))

    def test_conjugation_equivariance(self):
        rng = make_rng(11)
        f = funcat.builtin("exp")
        for _ in range(30):
            n = int(rng.integers(2, 7))
            h = random_hermitian_raw(n, rng)
            u = random_unitary(n, rng)
            lhs = apply_function(f, h.conjugate_by(u)).entries
            rhs = (u.conj().T @ apply_function(f, h).entries @ u)
            scale = max(1.0, float(np.max(np.abs(rhs))))
            assert np.max(np.abs(lhs - rhs)) <= 1e-9 * scale


class TestNorms:
    def test_ky_fan_example(self):
        h = hermitian_from(np.diag([3.0, 1.0, -2.0]))
        assert ui_norm(h, NormSpec.ky_fan(2)) == pytest.approx(5.0, abs=1e-13)

    def test_trace_norm_example(self):
        h = hermitian_from(np.diag([3.0, 1.0, -2.0]))
        assert ui_norm(h, NormSpec.schatten(1)) == pytest.approx(6.0, abs=1e-13)

    def test_operator_norm_example(self):
        h = hermitian_from(np.diag([3.0, 1.0, -2.0]))
        assert ui_norm(h, NormSpec.operator()) == pytest.approx(3.0, abs=1e-13)

    def test_bad_specs(self):
        h = hermitian_from(np.eye(3))
        with pytest.raises(BadSpec):
            ui_norm(h, NormSpec.ky_fan(4))
        with pytest.raises(BadSpec):
            ui_norm(h, NormSpec.ky_fan(0))
        with pytest.raises(BadSpec):
            ui_norm(h, NormSpec.schatten(0.5))
        with pytest.raises(BadSpec):
            ui_norm(h, NormSpec("frobenius"))
        with pytest.raises(BadSpec):
            NormSpec.parse("nuclear:1")

    def test_parse_roundtrip(self):
        for text in ("kyfan:2", "schatten:1", "schatten:2", "operator"):
            assert str(NormSpec.parse(text)) == text

    def test_unitary_invariance(self):
        rng = make_rng(23)
        for _ in range(40):
            n = int(rng.integers(2, 7))
            h = random_hermitian_raw(n, rng, scale=float(rng.uniform(0.1, 5.0)))
            u = random_unitary(n, rng)
            hu = h.conjugate_by(u)
            specs = [NormSpec.ky_fan(k) for k in range(1, n + 1)]
            specs += [NormSpec.schatten(1), NormSpec.schatten(2), NormSpec.operator()]
            for spec in specs:
                base = ui_norm(h, spec)
                rotated = ui_norm(hu, spec)
                assert abs(base - rotated) <= 1e-9 * max(1.0, base)


class TestMatrixLiteral:
    def test_roundtrip_complex(self):
        rng = make_rng(3)
        h = random_hermitian_raw(4, rng)
        again = matrix_from_json(matrix_to_json(h))
        np.testing.assert_allclose(again.entries, h.entries, atol=1e-15)

    def test_string_rationals_parse_exactly(self):
        obj = {"n": 2, "re": [["1.75", "31/6"], ["31/6", "0.5"]]}
        h = matrix_from_json(obj)
        assert h.entries[0, 0].real == 1.75
        assert h.entries[0, 1].real == pytest.approx(31 / 6, abs=1e-16)

    def test_exact_loader(self):
        from fractions import Fraction
        obj = {"n": 2, "re": [["17/4", "7/4"], ["7/4", "3/4"]]}
        exact = matcore.exact_matrix_from_json(obj)
        assert exact[0, 0] == Fraction(17, 4)

    def test_im_defaults_to_zero(self):
        h = matrix_from_json({"n": 1, "re": [[2]]})
        assert h.entries[0, 0] == 2.0 + 0.0j
