import numpy as np
import pytest

from conftest import grid_min_distance, random_signal

from conjpr import (
    canonical_rep,
    conj_class_distance,
    conj_equivalent,
    is_phased_real,
    numeric_rank,
    phase_equivalent,
    real_lift,
    rng_stream,
)
from conjpr.errors import DimensionMismatchError, ValidationError


class TestRealLift:
    def test_one_i(self):
        np.testing.assert_allclose(real_lift([1, 1j]), np.eye(2), atol=0)

    def test_real_vector_gives_outer_product(self):
        x = [1.0, 1.0, 0.0]
        expected = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 0.0]])
        np.testing.assert_array_equal(real_lift(x), expected)

    def test_zero(self):
        np.testing.assert_array_equal(real_lift([0, 0, 0]), np.zeros((3, 3)))

    def test_exact_symmetry_and_psd(self):
        rng = rng_stream(101, 0)
        for _ in range(200):
            x = random_signal(rng, int(rng.integers(1, 9)))
            q = real_lift(x)
            assert np.array_equal(q, q.T)
            evals = np.linalg.eigvalsh(q)
            assert evals.min() >= -1e-12 * max(evals.max(), 1.0)
            assert numeric_rank(q) <= 2

    def test_rejects_nan(self):
        with pytest.raises(ValidationError):
            real_lift([np.nan, 1.0])
        with pytest.raises(ValidationError):
            real_lift([np.inf * 1j, 1.0])


class TestEquivalence:
    def test_phase_rotation_equivalent(self):
        x = np.array([1, 1j])
        assert phase_equivalent(x, np.exp(1j * np.pi / 3) * x)

    def test_conjugate_not_phase_equivalent(self):
        assert not phase_equivalent([1, 1j], [1, -1j])

    def test_zero_signals_equivalent(self):
        assert phase_equivalent([0, 0], [0, 0])
        assert conj_equivalent([0, 0], [0, 0])

    def test_conjugate_is_conj_equivalent(self):
        assert conj_equivalent([1, 1j], [1, -1j])

    def test_distinct_classes(self):
        assert not conj_equivalent([1, 1j], [1, 1])

    def test_conjugate_with_phase(self):
        x = np.array([1, 1j, 1j])
        for theta in (0.0, 0.9, 2.5):
            assert conj_equivalent(x, np.exp(1j * theta) * np.conj(x))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            conj_equivalent([1, 1j], [1, 1j, 0])

    def test_bad_tol(self):
        with pytest.raises(ValidationError):
            conj_equivalent([1], [1], tol=0.0)

    def test_phase_implies_conj(self):
        rng = rng_stream(102, 0)
        for _ in range(100):
            x = random_signal(rng, 4)
            y = np.exp(1j * rng.uniform(0, 2 * np.pi)) * x
            assert phase_equivalent(x, y)
            assert conj_equivalent(x, y)

    def test_conj_iff_phase_or_conjphase(self):
        rng = rng_stream(103, 0)
        for trial in range(1000):
            m = int(rng.integers(1, 6))
            x = random_signal(rng, m)
            if trial % 2:
                # constructed equivalent pair, either branch
                y = np.exp(1j * rng.uniform(0, 2 * np.pi)) * (
                    np.conj(x) if trial % 4 == 1 else x
                )
            else:
                y = random_signal(rng, m)
            lhs = conj_equivalent(x, y)
            rhs = phase_equivalent(x, y) or phase_equivalent(x, np.conj(y))
            assert lhs == rhs


class TestConjClassDistance:
    def test_conjugate_distance_zero(self):
        rng = rng_stream(104, 0)
        for _ in range(50):
            x = random_signal(rng, 5)
            assert conj_class_distance(x, np.conj(x)) == 0.0

    def test_basis_vectors(self):
        assert conj_class_distance([1, 0], [0, 1]) == pytest.approx(np.sqrt(2), abs=1e-15)

    def test_phase_invariance(self):
        rng = rng_stream(105, 0)
        for _ in range(50):
            x = random_signal(rng, 4)
            d = conj_class_distance(np.exp(1j * 1.3) * x, x)
            assert d <= 1e-12 * np.linalg.norm(x) ** 2

    def test_metric_properties(self):
        rng = rng_stream(106, 0)
        for _ in range(100):
            x, y, z = (random_signal(rng, 3) for _ in range(3))
            dxy = conj_class_distance(x, y)
            assert dxy == conj_class_distance(y, x)
            assert dxy <= conj_class_distance(x, z) + conj_class_distance(z, y) + 1e-12


class TestIsPhasedReal:
    def test_rotated_real_vector(self):
        v = np.exp(1j * np.pi / 4) * np.array([2.0, -3.0, 0.0])
        assert is_phased_real(v)

    def test_one_i_is_not(self):
        assert not is_phased_real([1, 1j])

    def test_one_i_i_family(self):
        for m in range(2, 9):
            x = np.array([1.0] + [1j] * (m - 1))
            assert not is_phased_real(x)

    def test_zero_vector(self):
        assert is_phased_real(np.zeros(4, dtype=complex))


class TestCanonicalRep:
    def test_real_positive_max_fixed_point(self):
        x = np.array([0.5 + 0j, 2.0 + 0j, -1.0 + 0j])
        np.testing.assert_array_equal(canonical_rep(x), x)

    def test_rotate_and_orient(self):
        out = canonical_rep(np.array([-1j, 1.0]))
        np.testing.assert_allclose(out, np.array([1.0, 1j]), atol=1e-15)

    def test_zero(self):
        out = canonical_rep(np.zeros(3, dtype=complex))
        np.testing.assert_array_equal(out, np.zeros(3, dtype=complex))

    def test_idempotent_bitwise(self):
        rng = rng_stream(107, 0)
        for trial in range(200):
            m = int(rng.integers(1, 7))
            x = random_signal(rng, m)
            if trial % 5 == 0:
                x[: m // 2 + 1] = x[0]  # force modulus ties
            once = canonical_rep(x)
            twice = canonical_rep(once)
            assert np.array_equal(once, twice)

    def test_output_in_same_class(self):
        rng = rng_stream(108, 0)
        for _ in range(100):
            x = random_signal(rng, 5)
            out = canonical_rep(x)
            assert conj_class_distance(out, x) <= 1e-10 * np.linalg.norm(x) ** 2

    def test_class_invariance_with_strict_max(self):
        rng = rng_stream(109, 0)
        for _ in range(100):
            x = random_signal(rng, 5)
            j = int(np.argmax(np.abs(x)))
            x[j] *= 3.0  # strict modulus maximum
            base = canonical_rep(x)
            variant = canonical_rep(np.exp(1j * rng.uniform(0, 2 * np.pi)) * np.conj(x))
            np.testing.assert_allclose(variant, base, atol=1e-12 * np.linalg.norm(x))


class TestGridOracle:
    def test_agreement_outside_resolution_band(self):
        rng = rng_stream(110, 0)
        k = 4096
        for trial in range(200):
            m = int(rng.integers(2, 5))
            x = random_signal(rng, m)
            if trial % 2:
                y = np.exp(1j * rng.uniform(0, 2 * np.pi)) * (
                    np.conj(x) if trial % 4 == 1 else x
                )
            else:
                y = random_signal(rng, m)
            band = np.pi / k * max(np.linalg.norm(x), np.linalg.norm(y))
            gmin = grid_min_distance(x, y, k)
            if gmin <= 2 * band:
                assert conj_equivalent(x, y)
            elif gmin >= 10 * band:
                assert not conj_equivalent(x, y)


class TestLiftRankBounds:
    def test_lift_rank_bounds(self):
        rng = rng_stream(111, 0)
        for _ in range(200):
            m = int(rng.integers(2, 11))
            x, y = random_signal(rng, m), random_signal(rng, m)
            assert numeric_rank(real_lift(x)) <= 2
            assert numeric_rank(real_lift(x) - real_lift(y)) <= 4
