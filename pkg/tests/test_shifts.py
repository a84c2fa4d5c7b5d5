import math

import numpy as np
import pytest

from mslattice import (SpaceParams, adaptive_shifts, build_index_set,
                       capacity_lower_bound, cbc_construct, construct_z,
                       crt_sequence, difference_set, exp_sum_ratio,
                       geometric_weights, is_prime, next_prime,
                       partition_fibers, polynomial_shifts,
                       probabilistic_shifts, projection_integers, select_M,
                       single_lattice_shifts, multi_lattice_shifts,
                       trivial_shifts)
from mslattice.shifts import ProjectionVector, nearest_prime


class TestPrimeUtils:
    def test_next_prime(self):
        assert next_prime(3) == 3
        assert next_prime(91) == 97
        assert next_prime(0) == 2

    def test_is_prime(self):
        assert is_prime(1031)
        assert not is_prime(1033 * 3)

    def test_nearest_prime_prefers_larger_on_tie(self):
        assert nearest_prime(4096) == 4099   # 4093 below, 4099 above
        assert nearest_prime(9) == 11        # 7 and 11 tie at distance 2
        assert nearest_prime(16384) == 16381


class TestConstructZ:
    def test_d1_single_row(self):
        # hand trace: C = 0, forbidden {0}, first allowed candidate is 1
        z = construct_z(np.array([[1]]))
        assert z.z == (1,)

    def test_two_row_trace(self):
        # rows (1,-1) and (2,1): z_1 = 0 free, j=2 forbids only 0
        z = construct_z(np.array([[1, -1], [2, 1]]))
        assert z.z == (0, 1)

    def test_rejects_zero_row(self):
        with pytest.raises(ValueError):
            construct_z(np.array([[0, 0], [1, 1]]))

    def test_projections_never_zero(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            H = rng.integers(-8, 9, size=(30, 4))
            H = H[np.any(H != 0, axis=1)]
            z = construct_z(H)
            assert np.all(projection_integers(H, z) >= 1)

    def test_component_magnitude_bound(self):
        rng = np.random.default_rng(11)
        H = rng.integers(-5, 6, size=(50, 3))
        H = H[np.any(H != 0, axis=1)]
        z = construct_z(H)
        assert all(abs(v) <= math.ceil(len(H) / 2) + 1 for v in z.z)


class TestProjectionIntegers:
    def test_wide_values_exact(self):
        H = np.array([[2 ** 40, 1]], dtype=np.int64)
        z = ProjectionVector(z=(2 ** 40, 3))
        assert int(projection_integers(H, z)[0]) == 2 ** 80 + 3

    def test_overflow_refused(self):
        H = np.array([[2 ** 64, 2 ** 64]], dtype=object)
        z = ProjectionVector(z=(2 ** 64, 2 ** 64))
        with pytest.raises(OverflowError):
            projection_integers(H, z)


class TestExpSumRatio:
    def test_single_zero_shift(self):
        H = np.array([[1, 2], [3, -1]])
        assert exp_sum_ratio(trivial_shifts(2), H) == pytest.approx(1.0)

    def test_single_lattice_orthogonality(self):
        # h.z never divisible by p -> full character sum vanishes
        z = ProjectionVector(z=(1, 2))
        Y = single_lattice_shifts(z, 7)
        H = np.array([[1, 0], [1, 1], [0, 2]])
        assert np.all(projection_integers(H, z) % 7 != 0)
        assert exp_sum_ratio(Y, H) < 1e-12

    def test_polynomial_geometric_sum(self):
        Y = polynomial_shifts(5, 2)
        assert exp_sum_ratio(Y, np.array([[1, 0]])) < 1e-12

    def test_float_path_matches_exact_path(self):
        Y = polynomial_shifts(13, 3)
        H = np.array([[1, 2, 0], [4, -1, 3], [0, 0, 5]])
        exact = exp_sum_ratio(Y, H)
        Yf = type(Y)(points=Y.points, strategy="float", blocks=None)
        assert exp_sum_ratio(Yf, H) == pytest.approx(exact, abs=1e-10)


class TestPolynomialShifts:
    def test_p5_d2_points(self):
        Y = polynomial_shifts(5, 2)
        expected = [[0, 0], [1 / 5, 1 / 5], [2 / 5, 4 / 5],
                    [3 / 5, 4 / 5], [4 / 5, 1 / 5]]
        assert np.allclose(Y.points, expected)

    def test_rejects_composite(self):
        with pytest.raises(ValueError):
            polynomial_shifts(6, 2)

    @pytest.mark.parametrize("p", [101, 499])
    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    def test_weil_bound(self, p, d):
        rng = np.random.default_rng(p * d)
        Y = polynomial_shifts(p, d)
        H = rng.integers(-50, 51, size=(100, d))
        H = H[np.any(H % p != 0, axis=1)]
        sums = np.zeros(H.shape[0], dtype=np.complex128)
        for numer, q in Y.blocks:
            ph = (H % q) @ numer.T % q
            sums += np.exp(2j * np.pi * ph / q).sum(axis=1)
        assert np.abs(sums).max() <= (d - 1) * math.sqrt(p) + 1e-6


class TestCapacityBound:
    def test_direct_formula(self):
        p = SpaceParams(d=2, alpha=1.0, gamma=(1.0, 1.0))
        assert capacity_lower_bound(p, 100.0, 50) == pytest.approx(200.0)

    def test_small_M(self):
        p = SpaceParams(d=2, alpha=1.0, gamma=(1.0, 1.0))
        assert capacity_lower_bound(p, 0.5, 10) == 0.0

    def test_mixed_weights(self):
        p = SpaceParams(d=2, alpha=1.0, gamma=(1.0, 0.5))
        assert capacity_lower_bound(p, 100.0, 100) == pytest.approx(50.0)


class TestCrtSequence:
    def test_trace_r3(self):
        primes = crt_sequence(3, 1000, 0.95)
        assert primes == [97, 101, 103, 107, 109, 113, 127]
        assert sum(primes) == 757

    def test_trace_r2(self):
        assert crt_sequence(2, 2, 0.95) == [5]

    def test_density_premise(self):
        for R, V in ((2, 10), (5, 10 ** 6), (20, 10 ** 9)):
            primes = crt_sequence(R, V, 0.95)
            assert primes[-1] < 2 * primes[0]

    def test_rejects_tiny_V(self):
        with pytest.raises(ValueError):
            crt_sequence(3, 1, 0.95)


class TestProbabilisticShifts:
    def test_count_formula(self):
        Y = probabilistic_shifts(R=3, N=1031, K=2.0, t=0.5, seed=0, d=2)
        assert Y.S == 334

    def test_r1_formula(self):
        Y = probabilistic_shifts(R=1, N=100, K=2.0, t=0.5, seed=0, d=2)
        assert Y.S == math.ceil(4.0 * math.log(100) / 0.25)

    def test_seed_determinism(self):
        a = probabilistic_shifts(3, 1031, 2.0, 0.5, seed=42, d=3)
        b = probabilistic_shifts(3, 1031, 2.0, 0.5, seed=42, d=3)
        assert np.array_equal(a.points, b.points)

    def test_s_old_reported(self):
        Y = probabilistic_shifts(3, 1031, 2.0, 0.5, seed=0, d=2)
        assert Y.params["S_old"] == math.ceil(12.0 * math.log(1031))


def small_instance(d=2, N=13, alpha=1.0):
    p = SpaceParams(d=d, alpha=alpha, gamma=geometric_weights(d))
    M = select_M(p, N, mode="bisection")
    A = build_index_set(p, M)
    lat = cbc_construct(p, N)
    part = partition_fibers(A, lat)
    return p, M, part, difference_set(part)


class TestAdaptiveShifts:
    def test_r1_trivial(self):
        p = SpaceParams(d=1, alpha=1.0, gamma=(1.0,))
        Y = adaptive_shifts(np.empty((0, 1), dtype=np.int64), 1, 0.95, 13, 5.0, p)
        assert Y.S == 1 and not Y.points.any()

    def test_small_instance_accepted(self):
        p, M, part, H = small_instance()
        Y = adaptive_shifts(H, part.R, 0.95, 13, M, p)
        if part.R > 1:
            assert Y.achieved_ratio <= 0.95 / (part.R - 1) + 1e-10

    def test_never_worse_than_crt(self):
        for N in (13, 127, 1031):
            p, M, part, H = small_instance(d=3, N=N)
            if part.R <= 1:
                continue
            Y = adaptive_shifts(H, part.R, 0.95, N, M, p)
            z = construct_z(H)
            V = max(2, int(projection_integers(H.diffs, z).max()))
            assert Y.S <= sum(crt_sequence(part.R, V, 0.95))

    def test_ratio_reverified(self):
        p, M, part, H = small_instance(d=4, N=127, alpha=1.5)
        Y = adaptive_shifts(H, part.R, 0.95, 127, M, p)
        assert Y.achieved_ratio == pytest.approx(exp_sum_ratio(Y, H), abs=1e-12)

    def test_multi_lattice_bad_prime_bound(self):
        # CRT argument: at most ln(V)/ln(p_1) primes can divide one X_h
        p, M, part, H = small_instance(d=4, N=31)
        if len(H) == 0:
            pytest.skip("no aliasing differences at this size")
        z = construct_z(H)
        X = projection_integers(H.diffs, z)
        V = max(2, int(X.max()))
        primes = crt_sequence(part.R, V, 0.95)
        limit = math.log(V) / math.log(primes[0])
        for x in X.tolist():
            bad = sum(1 for q in primes if x % q == 0)
            assert bad <= limit

    def test_rejects_bad_t(self):
        p = SpaceParams(d=2, alpha=1.0, gamma=(1.0, 1.0))
        with pytest.raises(ValueError):
            adaptive_shifts(np.array([[1, 0]]), 2, 1.5, 13, 5.0, p)


class TestMultiLattice:
    def test_size_is_sum_of_primes(self):
        z = ProjectionVector(z=(1, 3))
        Y = multi_lattice_shifts(z, [3, 5, 7])
        assert Y.S == 15
        # each sub-lattice keeps its own copy of the origin
        assert (np.all(Y.points == 0.0, axis=1)).sum() == 3
