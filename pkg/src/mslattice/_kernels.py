"""Hot numeric kernels with numba acceleration and a pure-numpy fallback.

Set the environment variable ``MSLATTICE_NO_NUMBA=1`` to force the numpy
path (useful for debugging and for the kernel benchmark).
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("MSLATTICE_NO_NUMBA", "") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit, prange
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

__all__ = ["USE_NUMBA", "cbc_sweep", "block_expsum",
           "cbc_sweep_numpy", "block_expsum_numpy"]


def cbc_sweep_numpy(q, psi):
    """Evaluate E[z] = sum_n q[n] * (1 + psi[(n*z) % N]) for z = 1..N-1.

    Returns an array of length N-1 (index z-1).
    """
    N = q.shape[0]
    n = np.arange(N, dtype=np.int64)
    out = np.empty(N - 1)
    one_plus = 1.0 + psi
    for z in range(1, N):
        out[z - 1] = q @ one_plus[(n * z) % N]
    return out


def block_expsum_numpy(numer, hmod, p):
    """Exponential sums sum_s exp(2*pi*i/p * numer[s].h) for each row h.

    ``numer`` is the (S, d) integer numerator table of one rational shift
    block (entries reduced mod p) and ``hmod`` the (m, d) difference
    residues mod p. Returns a complex array of length m.
    """
    m = hmod.shape[0]
    if m == 0:
        return np.empty(0, dtype=np.complex128)
    ang = 2.0 * np.pi / p * np.arange(p)
    roots = np.cos(ang) + 1j * np.sin(ang)
    out = np.empty(m, dtype=np.complex128)
    # chunk rows so the (S x chunk) phase matrix stays small
    chunk = max(1, int(4_000_000 // max(numer.shape[0], 1)))
    for lo in range(0, m, chunk):
        ph = (numer @ hmod[lo:lo + chunk].T) % p
        out[lo:lo + chunk] = roots[ph].sum(axis=0)
    return out


if USE_NUMBA:

    @njit(cache=True, parallel=True)
    def _cbc_sweep_nb(q, psi):
        N = q.shape[0]
        out = np.empty(N - 1)
        for z in prange(1, N):
            acc = 0.0
            idx = 0
            for n in range(N):
                acc += q[n] * (1.0 + psi[idx])
                idx += z
                if idx >= N:
                    idx -= N
            out[z - 1] = acc
        return out

    @njit(cache=True, parallel=True)
    def _block_expsum_nb(numer, hmod, p, cos_t, sin_t):
        S = numer.shape[0]
        m = hmod.shape[0]
        d = hmod.shape[1]
        out = np.empty(m, dtype=np.complex128)
        for r in prange(m):
            re = 0.0
            im = 0.0
            for s in range(S):
                ph = 0
                for i in range(d):
                    ph += numer[s, i] * hmod[r, i]
                ph %= p
                re += cos_t[ph]
                im += sin_t[ph]
            out[r] = complex(re, im)
        return out

    def cbc_sweep(q, psi):
        return _cbc_sweep_nb(np.ascontiguousarray(q), np.ascontiguousarray(psi))

    def block_expsum(numer, hmod, p):
        if hmod.shape[0] == 0:
            return np.empty(0, dtype=np.complex128)
        ang = 2.0 * np.pi / p * np.arange(p)
        return _block_expsum_nb(np.ascontiguousarray(numer),
                                np.ascontiguousarray(hmod),
                                p, np.cos(ang), np.sin(ang))
else:
    cbc_sweep = cbc_sweep_numpy
    block_expsum = block_expsum_numpy
