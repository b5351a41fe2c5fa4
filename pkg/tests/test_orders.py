import numpy as np
import pytest

from conftest import eig2x2, make_rng, random_hermitian_raw, random_psd, random_unitary
from hhmat.errors import DimMismatch, NotOrthonormal, NotPSD
from hhmat.matcore import hermitian_from
from hhmat.orders import (
    eigen_dominance,
    ky_fan_dominance_scan,
    loewner_leq,
    top_k_frame_sum,
    unitary_witness,
    weak_majorization,
)

SEGMENT_INTEGRAL_CUBE = hermitian_from([[31 / 6, 5 / 2], [5 / 2, 4 / 3]])
ENDPOINT_AVG_CUBE = hermitian_from([[7.0, 4.0], [4.0, 5 / 2]])


class TestLoewner:
    def test_zero_below_identity(self):
        verdict = loewner_leq(hermitian_from(np.zeros((2, 2))), hermitian_from(np.eye(2)))
        assert verdict.holds and verdict.margin == pytest.approx(1.0, abs=1e-14)

    def test_cube_gap_fails(self):
        # gap [[11/6, 3/2], [3/2, 7/6]] has determinant -1/9 < 0
        verdict = loewner_leq(SEGMENT_INTEGRAL_CUBE, ENDPOINT_AVG_CUBE)
        assert not verdict.holds
        lam_min_oracle = eig2x2([[11 / 6, 3 / 2], [3 / 2, 7 / 6]])[1]
        assert verdict.margin == pytest.approx(lam_min_oracle, abs=1e-12)
        assert verdict.witness is not None

    def test_reflexive(self):
        h = random_hermitian_raw(3, make_rng(0))
        verdict = loewner_leq(h, h)
        assert verdict.holds and abs(verdict.margin) <= 1e-14

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            loewner_leq(hermitian_from(np.eye(2)), hermitian_from(np.eye(3)))


class TestEigenDominance:
    def test_diagonal_example(self):
        verdict = eigen_dominance(hermitian_from(np.diag([1.0, 0.0])),
                                  hermitian_from(np.diag([2.0, 1.0])))
        assert verdict.holds and verdict.margin == pytest.approx(1.0, abs=1e-14)

    def test_fails_at_second_index(self):
        b = hermitian_from([[1.0, 1.0], [1.0, -0.5]])
        # quadratic-formula oracle: trace 0.5 and det -1.5 give (1.5, -1.0)
        lam = eig2x2(b.entries)
        np.testing.assert_allclose(lam, [1.5, -1.0], atol=1e-14)
        verdict = eigen_dominance(hermitian_from(np.zeros((2, 2))), b)
        assert not verdict.holds
        assert verdict.witness == 1
        assert verdict.margin == pytest.approx(-1.0, abs=1e-12)

    def test_equal_matrices(self):
        h = random_hermitian_raw(4, make_rng(1))
        verdict = eigen_dominance(h, h)
        assert verdict.holds and abs(verdict.margin) <= 1e-12


class TestWeakMajorization:
    def test_entrywise_dominated(self):
        report = weak_majorization(hermitian_from(np.diag([3.0, 1.0])),
                                   hermitian_from(np.diag([3.0, 2.0])))
        np.testing.assert_allclose(report.deficits, [0.0, 1.0], atol=1e-14)
        assert report.holds

    def test_top_sum_exceeds(self):
        report = weak_majorization(hermitian_from(np.diag([4.0, 0.0])),
                                   hermitian_from(np.diag([3.0, 2.0])))
        np.testing.assert_allclose(report.deficits, [-1.0, 1.0], atol=1e-14)
        assert not report.holds
        assert report.min_deficit == pytest.approx(-1.0)

    def test_equal_matrices(self):
        h = random_hermitian_raw(5, make_rng(2))
        report = weak_majorization(h, h)
        assert report.holds
        np.testing.assert_allclose(report.deficits, np.zeros(5), atol=1e-12)


class TestUnitaryWitness:
    def test_aligned_diagonals(self):
        a = hermitian_from(np.diag([1.0, 0.0]))
        b = hermitian_from(np.diag([2.0, 1.0]))
        u = unitary_witness(a, b)
        assert u is not None
        assert loewner_leq(a, b.conjugate_by(u)).holds

    def test_permutation_case(self):
        a = hermitian_from(np.diag([1.0, 0.0]))
        b = hermitian_from([[0.0, 0.0], [0.0, 2.0]])
        u = unitary_witness(a, b)
        conj = b.conjugate_by(u)
        np.testing.assert_allclose(conj.entries.real, np.diag([2.0, 0.0]), atol=1e-12)
        assert loewner_leq(a, conj).holds

    def test_no_witness_when_dominance_fails(self):
        a = hermitian_from(np.diag([4.0, 0.0]))
        b = hermitian_from(np.diag([3.0, 2.0]))
        assert unitary_witness(a, b) is None

    def test_soundness_on_random_dominance_pairs(self):
        rng = make_rng(3)
        for _ in range(200):
            n = int(rng.integers(2, 7))
            a = random_hermitian_raw(n, rng)
            # dominating partner: same sorted spectrum plus nonnegative shifts
            # in an unrelated eigenbasis
            shifts = np.sort(rng.uniform(0.0, 2.0, n))[::-1]
            from hhmat.matcore import eig
            values = eig(a).values + shifts
            u0 = random_unitary(n, rng)
            b = hermitian_from((u0 * values) @ u0.conj().T)
            u = unitary_witness(a, b)
            assert u is not None
            assert np.max(np.abs(u.conj().T @ u - np.eye(n))) <= 1e-9
            assert loewner_leq(a, b.conjugate_by(u), 1e-8).holds


class TestFrameSum:
    def test_eigenvector_frame_attains_maximum(self):
        h = hermitian_from(np.diag([3.0, 2.0, 1.0]))
        frame = np.eye(3)[:, :2]
        assert top_k_frame_sum(h, frame) == pytest.approx(5.0, abs=1e-13)

    def test_suboptimal_frame(self):
        h = hermitian_from(np.diag([3.0, 2.0, 1.0]))
        frame = np.eye(3)[:, 1:]
        assert top_k_frame_sum(h, frame) == pytest.approx(3.0, abs=1e-13)

    def test_not_orthonormal(self):
        h = hermitian_from(np.eye(3))
        with pytest.raises(NotOrthonormal):
            top_k_frame_sum(h, np.ones((3, 2)))

    def test_never_exceeds_top_k_sum(self):
        rng = make_rng(4)
        from hhmat.matcore import eig
        for _ in range(300):
            n = int(rng.integers(2, 8))
            k = int(rng.integers(1, n + 1))
            h = random_hermitian_raw(n, rng, scale=float(rng.uniform(0.1, 4.0)))
            g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
            frame, _ = np.linalg.qr(g)
            value = top_k_frame_sum(h, frame[:, :k])
            bound = float(np.sum(eig(h).values[:k]))
            assert value <= bound + 1e-8 * max(1.0, abs(bound))


class TestKyFanScan:
    def test_ordered_diagonals_agree(self):
        report = ky_fan_dominance_scan(hermitian_from(np.diag([1.0, 1.0])),
                                       hermitian_from(np.diag([2.0, 0.5])))
        assert report.majorization.holds and report.agree
        np.testing.assert_allclose(report.majorization.partial_sums_a, [1.0, 2.0])
        np.testing.assert_allclose(report.majorization.partial_sums_b, [2.0, 2.5])

    def test_equal_matrices(self):
        h = random_psd(3, make_rng(5))
        report = ky_fan_dominance_scan(h, h)
        assert report.agree

    def test_consistent_failure(self):
        report = ky_fan_dominance_scan(hermitian_from(np.diag([4.0, 0.0])),
                                       hermitian_from(np.diag([3.0, 2.0])))
        assert not report.majorization.holds
        assert report.norm_margins[0] < 0
        assert report.agree  # both views fail at k=1 together

    def test_rejects_indefinite(self):
        with pytest.raises(NotPSD):
            ky_fan_dominance_scan(hermitian_from(np.diag([1.0, -1.0])),
                                  hermitian_from(np.eye(2)))

    def test_agreement_on_random_psd_pairs(self):
        rng = make_rng(6)
        for _ in range(150):
            n = int(rng.integers(2, 6))
            a, b = random_psd(n, rng), random_psd(n, rng)
            assert ky_fan_dominance_scan(a, b).agree


class TestOrderChain:
    def test_loewner_implies_dominance_implies_majorization(self):
        rng = make_rng(7)
        for _ in range(300):
            n = int(rng.integers(2, 7))
            a = random_hermitian_raw(n, rng)
            b = a + random_psd(n, rng)
            assert loewner_leq(a, b).holds
            assert eigen_dominance(a, b).holds
            assert weak_majorization(a, b).holds

    def test_dominance_implies_majorization_without_loewner(self):
        rng = make_rng(8)
        for _ in range(200):
            n = int(rng.integers(2, 7))
            a = random_hermitian_raw(n, rng)
            shifts = np.sort(rng.uniform(0.0, 1.0, n))[::-1]
            from hhmat.matcore import eig
            u0 = random_unitary(n, rng)
            b = hermitian_from((u0 * (eig(a).values + shifts)) @ u0.conj().T)
            assert eigen_dominance(a, b).holds
            assert weak_majorization(a, b).holds
