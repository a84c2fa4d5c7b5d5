import numpy as np
import pytest

from mslattice import _kernels


rng = np.random.default_rng(0)


class TestCbcSweep:
    @pytest.mark.parametrize("N", [2, 3, 13, 257])
    def test_paths_agree(self, N):
        q = rng.random(N)
        psi = rng.random(N) - 0.5
        fast = _kernels.cbc_sweep(q, psi)
        slow = _kernels.cbc_sweep_numpy(q, psi)
        assert np.abs(fast - slow).max() < 1e-10 * max(1.0, np.abs(slow).max())

    def test_against_definition(self):
        N = 11
        q = rng.random(N)
        psi = rng.random(N)
        out = _kernels.cbc_sweep_numpy(q, psi)
        for z in range(1, N):
            expected = sum(q[n] * (1.0 + psi[(n * z) % N]) for n in range(N))
            assert out[z - 1] == pytest.approx(expected)


class TestBlockExpsum:
    @pytest.mark.parametrize("p,S,m,d", [(5, 5, 7, 2), (13, 13, 40, 3),
                                         (101, 101, 300, 4)])
    def test_paths_agree(self, p, S, m, d):
        numer = rng.integers(0, p, size=(S, d), dtype=np.int64)
        hmod = rng.integers(0, p, size=(m, d), dtype=np.int64)
        fast = _kernels.block_expsum(numer, hmod, p)
        slow = _kernels.block_expsum_numpy(numer, hmod, p)
        assert np.abs(fast - slow).max() < 1e-10 * S

    def test_against_definition(self):
        p = 7
        numer = rng.integers(0, p, size=(4, 2), dtype=np.int64)
        hmod = rng.integers(0, p, size=(3, 2), dtype=np.int64)
        out = _kernels.block_expsum_numpy(numer, hmod, p)
        for r in range(3):
            expected = sum(np.exp(2j * np.pi * (numer[s] @ hmod[r]) / p)
                           for s in range(4))
            assert out[r] == pytest.approx(expected, abs=1e-12)

    def test_empty_rows(self):
        numer = np.zeros((3, 2), dtype=np.int64)
        out = _kernels.block_expsum(numer, np.empty((0, 2), dtype=np.int64), 5)
        assert out.shape == (0,)
