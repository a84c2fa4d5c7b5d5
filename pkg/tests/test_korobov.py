import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mslattice import (SpaceParams, build_index_set, geometric_weights,
                       index_set_size, select_M, weight_r)


def brute_force_set(params, M):
    """Independent enumeration over the bounding box."""
    limits = [int(math.ceil((g * M) ** (1.0 / params.alpha))) + 1
              for g in params.gamma]
    rows = [list(k)
            for k in itertools.product(*[range(-m, m + 1) for m in limits])
            if weight_r(params, k) < M]
    return sorted(rows)


class TestWeightR:
    def test_zero_frequency(self):
        p = SpaceParams(d=3, alpha=1.7, gamma=(1.0, 0.5, 0.25))
        assert weight_r(p, (0, 0, 0)) == 1.0

    def test_unit_weights(self):
        p = SpaceParams(d=2, alpha=1.0, gamma=(1.0, 1.0))
        assert weight_r(p, (2, 3)) == pytest.approx(6.0)

    def test_geometric_weights(self):
        p = SpaceParams(d=2, alpha=1.0, gamma=geometric_weights(2))
        assert weight_r(p, (1, 1)) == pytest.approx(2.0 ** 0.1)

    def test_sign_symmetry_and_monotonicity(self):
        p = SpaceParams(d=2, alpha=1.5, gamma=(1.0, 0.7))
        assert weight_r(p, (2, -3)) == weight_r(p, (-2, 3))
        assert weight_r(p, (2, 3)) <= weight_r(p, (2, 4))

    def test_dimension_mismatch(self):
        p = SpaceParams(d=2, alpha=1.0, gamma=(1.0, 1.0))
        with pytest.raises(ValueError):
            weight_r(p, (1, 2, 3))


class TestSpaceParams:
    def test_rejects_small_alpha(self):
        with pytest.raises(ValueError):
            SpaceParams(d=1, alpha=0.5, gamma=(1.0,))

    def test_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            SpaceParams(d=1, alpha=1.0, gamma=(1.5,))
        with pytest.raises(ValueError):
            SpaceParams(d=2, alpha=1.0, gamma=(1.0,))


class TestBuildIndexSet:
    def test_d1_interval(self):
        p = SpaceParams(d=1, alpha=1.0, gamma=(1.0,))
        A = build_index_set(p, 3.5)
        assert A.freqs[:, 0].tolist() == list(range(-3, 4))

    def test_d2_unit_box(self):
        p = SpaceParams(d=2, alpha=1.0, gamma=(1.0, 1.0))
        A = build_index_set(p, 1.5)
        assert len(A) == 9
        assert np.abs(A.freqs).max() == 1

    def test_d2_cardinality_21(self):
        # brute force over [-3, 3]^2 gives 21 indices with r < 2.5
        p = SpaceParams(d=2, alpha=1.0, gamma=(1.0, 1.0))
        A = build_index_set(p, 2.5)
        assert len(A) == 21
        assert A.freqs.tolist() == brute_force_set(p, 2.5)

    def test_empty_below_one(self):
        p = SpaceParams(d=2, alpha=1.0, gamma=(1.0, 1.0))
        assert len(build_index_set(p, 0.5)) == 0

    def test_contains_zero_and_symmetric(self):
        p = SpaceParams(d=3, alpha=1.5, gamma=geometric_weights(3))
        A = build_index_set(p, 40.0)
        rows = {tuple(r) for r in A.freqs.tolist()}
        assert (0, 0, 0) in rows
        assert all(tuple(-v for v in r) in rows for r in rows)
        assert len(rows) == len(A)  # no duplicates

    def test_lexicographic_order(self):
        p = SpaceParams(d=2, alpha=1.0, gamma=(1.0, 0.8))
        A = build_index_set(p, 10.0)
        assert A.freqs.tolist() == sorted(A.freqs.tolist())

    @settings(max_examples=25, deadline=None)
    @given(alpha=st.sampled_from([1.0, 1.5, 2.5]),
           g2=st.floats(0.3, 1.0),
           M=st.floats(1.0, 60.0))
    def test_matches_brute_force(self, alpha, g2, M):
        p = SpaceParams(d=2, alpha=alpha, gamma=(1.0, g2))
        A = build_index_set(p, M)
        assert A.freqs.tolist() == brute_force_set(p, M)

    def test_size_helper_agrees(self):
        p = SpaceParams(d=3, alpha=1.5, gamma=geometric_weights(3))
        for M in (0.5, 1.0, 7.3, 55.0):
            assert index_set_size(p, M) == len(build_index_set(p, M))


class TestSelectM:
    def test_d1_bisection(self):
        p = SpaceParams(d=1, alpha=1.0, gamma=(1.0,))
        M = select_M(p, 7, mode="bisection")
        assert 3.0 < M <= 4.0
        assert len(build_index_set(p, M)) == 7

    def test_d2_bisection(self):
        p = SpaceParams(d=2, alpha=1.0, gamma=(1.0, 1.0))
        M = select_M(p, 21, mode="bisection")
        assert len(build_index_set(p, M)) == 21

    def test_bisection_is_maximal(self):
        p = SpaceParams(d=2, alpha=1.5, gamma=geometric_weights(2))
        N = 257
        M = select_M(p, N, mode="bisection")
        assert index_set_size(p, M) <= N
        assert index_set_size(p, M * (1.0 + 1e-6) + 1e-6) > N

    @pytest.mark.parametrize("d,alpha,N", [(2, 1.0, 64), (3, 1.5, 257),
                                           (4, 2.5, 1031)])
    def test_theoretical_cardinality_bound(self, d, alpha, N):
        p = SpaceParams(d=d, alpha=alpha, gamma=geometric_weights(d))
        M = select_M(p, N, mode="theoretical")
        assert index_set_size(p, M) <= N / 2

    def test_rejects_small_N(self):
        p = SpaceParams(d=1, alpha=1.0, gamma=(1.0,))
        with pytest.raises(ValueError):
            select_M(p, 1)
