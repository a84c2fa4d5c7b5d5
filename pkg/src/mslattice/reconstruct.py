"""Sampling on shifted lattices, per-residue observables and the unified
per-fiber least-squares estimator.

For each shift y_s the target is sampled on {n g/N + y_s + Delta} and a
length-N DFT of the samples produces one observable per residue class;
every fiber is then recovered by solving its small normal-equations
system and unscaling the global shift Delta.
"""

from dataclasses import dataclass

import numpy as np

from .cbc import Lattice
from .fibers import FiberPartition
from .korobov import IndexSet
from .shifts import ShiftSet

__all__ = ["SpectralApprox", "GramDiagnostics", "dft_bluestein",
           "observables", "solve_fiber", "approximate", "evaluate",
           "gram_diagnostics"]

_DIRECT_DFT_MAX_N = 4096
_EVAL_CHUNK = 4_000_000  # phase-matrix entries per evaluation chunk


@dataclass
class SpectralApprox:
    """Trigonometric approximation: frequency rows and their coefficients."""

    freqs: np.ndarray            # (n, d) int64
    coeffs: np.ndarray           # (n,) complex128
    index_set: IndexSet
    lattice: Lattice
    shifts: ShiftSet
    delta: np.ndarray

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True)
class GramDiagnostics:
    """Per-fiber Gram spectra: sizes, extremal eigenvalues, condition numbers."""

    sizes: np.ndarray
    lam_min: np.ndarray
    lam_max: np.ndarray
    kappa: np.ndarray

    @property
    def max_kappa(self):
        return float(self.kappa.max()) if self.kappa.size else 1.0


def dft_bluestein(x):
    """Length-n DFT (sign -1) via chirp-z with power-of-two convolutions."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[0]
    if n == 1:
        return x.copy()
    k = np.arange(n, dtype=np.int64)
    # phases of e^{-i pi k^2 / n}, with k^2 reduced mod 2n for accuracy
    w = np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)
    L = 1 << int(np.ceil(np.log2(2 * n - 1)))
    a = np.zeros(L, dtype=np.complex128)
    a[:n] = x * w
    b = np.zeros(L, dtype=np.complex128)
    b[:n] = np.conj(w)
    b[L - n + 1:] = np.conj(w[1:][::-1])
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))[:n]
    return w * conv


def _sample_shift(f, lattice_pts, y, delta):
    pts = np.mod(lattice_pts + y + delta, 1.0)
    return np.asarray(f(pts), dtype=np.complex128).reshape(-1)


def observables(f, lat: Lattice, part: FiberPartition, Y: ShiftSet,
                delta=None, method="auto"):
    """Per-shift, per-residue observables b_s[r] = (1/N) sum_n f(.) e^{-2 pi i n r / N}.

    ``method`` selects the full-length DFT ("dft"), the direct residue
    summation ("direct"), or a size-based choice ("auto"). Both paths
    compute the same quantity.
    """
    N = lat.N
    if delta is None:
        delta = np.zeros(lat.d)
    delta = np.asarray(delta, dtype=np.float64)
    residues = part.residues
    if method == "auto":
        method = "direct" if N < _DIRECT_DFT_MAX_N else "dft"
    lattice_pts = lat.points()
    out = np.empty((Y.S, len(residues)), dtype=np.complex128)
    if method == "dft":
        for s in range(Y.S):
            vals = _sample_shift(f, lattice_pts, Y.points[s], delta)
            out[s] = dft_bluestein(vals)[residues] / N
    elif method == "direct":
        n = np.arange(N)
        kern = np.exp(-2j * np.pi * np.outer(n, residues) / N)
        for s in range(Y.S):
            vals = _sample_shift(f, lattice_pts, Y.points[s], delta)
            out[s] = vals @ kern / N
    else:
        raise ValueError(f"unknown observables method {method!r}")
    return out


def _system_matrix(fiber_freqs, Y: ShiftSet):
    return np.exp(2j * np.pi * (Y.points @ fiber_freqs.T))


def solve_fiber(fiber_freqs, Y: ShiftSet, delta, b_col):
    """Least-squares recovery of one fiber's coefficients.

    Solves the normal equations of B x = b and applies the diagonal
    unscaling exp(-2 pi i l.Delta); the Gram matrix of an accepted shift
    set is provably well-conditioned, so the dense solve is safe.
    """
    fiber_freqs = np.atleast_2d(np.asarray(fiber_freqs, dtype=np.int64))
    B = _system_matrix(fiber_freqs, Y)
    G = B.conj().T @ B
    rhs = B.conj().T @ np.asarray(b_col, dtype=np.complex128)
    try:
        x = np.linalg.solve(G, rhs)
    except np.linalg.LinAlgError as exc:  # must not happen for accepted sets
        raise np.linalg.LinAlgError(
            "singular fiber Gram matrix; the shift set was not properly "
            "accepted for this partition") from exc
    if delta is not None:
        x = x * np.exp(-2j * np.pi * (fiber_freqs @ np.asarray(delta, dtype=np.float64)))
    return x


def approximate(f, lat: Lattice, A: IndexSet, part: FiberPartition,
                Y: ShiftSet, delta=None, method="auto") -> SpectralApprox:
    """Recover all coefficients over the index set from shifted samples."""
    if delta is None:
        delta = np.zeros(lat.d)
    delta = np.asarray(delta, dtype=np.float64)
    b = observables(f, lat, part, Y, delta, method=method)
    coeffs = np.zeros(len(A), dtype=np.complex128)
    for j, grp in enumerate(part.fibers):
        coeffs[grp] = solve_fiber(A.freqs[grp], Y, delta, b[:, j])
    return SpectralApprox(freqs=A.freqs, coeffs=coeffs, index_set=A,
                          lattice=lat, shifts=Y, delta=delta)


def evaluate(approx: SpectralApprox, x):
    """Evaluate sum_k c_k e^{2 pi i k.x} at one point or an (m, d) batch."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    n = approx.freqs.shape[0]
    out = np.empty(pts.shape[0], dtype=np.complex128)
    chunk = max(1, _EVAL_CHUNK // max(n, 1))
    ft = approx.freqs.T.astype(np.float64)
    for lo in range(0, pts.shape[0], chunk):
        ph = pts[lo:lo + chunk] @ ft
        out[lo:lo + chunk] = np.exp(2j * np.pi * ph) @ approx.coeffs
    return out[0] if single else out


def gram_diagnostics(part: FiberPartition, Y: ShiftSet) -> GramDiagnostics:
    """Extremal eigenvalues and condition number of every fiber Gram matrix."""
    freqs = part.index_set.freqs
    sizes = np.array([len(grp) for grp in part.fibers], dtype=np.int64)
    lam_min = np.empty(part.J)
    lam_max = np.empty(part.J)
    for j, grp in enumerate(part.fibers):
        B = _system_matrix(freqs[grp], Y)
        ev = np.linalg.eigvalsh(B.conj().T @ B)
        lam_min[j] = ev[0]
        lam_max[j] = ev[-1]
    kappa = lam_max / lam_min
    return GramDiagnostics(sizes=sizes, lam_min=lam_min, lam_max=lam_max,
                           kappa=kappa)
