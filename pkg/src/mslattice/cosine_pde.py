"""Non-periodic approximation via the tent transformation and a spectral
Poisson solver with homogeneous Neumann boundary conditions.

Composing a non-periodic target with the tent map psi(z) = 1 - |2z - 1|
gives an even periodic function whose Fourier coefficients fold onto
half-period cosine coefficients; the Laplacian is then diagonal in the
cosine basis.
"""

from dataclasses import dataclass

import numpy as np

from .cbc import Lattice
from .fibers import FiberPartition
from .korobov import IndexSet
from .reconstruct import SpectralApprox, approximate
from .shifts import ShiftSet

__all__ = ["CosineApprox", "PoissonSolution", "tent", "fourier_to_cosine",
           "approximate_nonperiodic", "evaluate_cosine", "poisson_solve"]

_EVAL_CHUNK = 4_000_000


@dataclass
class CosineApprox:
    """Real cosine-series approximation over nonnegative frequencies."""

    freqs: np.ndarray            # (n, d) int64, componentwise >= 0
    coeffs: np.ndarray           # (n,) float64
    periodic: SpectralApprox | None = None

    def __call__(self, x):
        return evaluate_cosine(self, x)


@dataclass
class PoissonSolution:
    """Spectral Neumann-Poisson solution: mean plus damped source modes."""

    mean: float
    freqs: np.ndarray            # nonzero nonnegative frequencies
    coeffs: np.ndarray           # already -c_k / lambda_k
    eigenvalues: np.ndarray      # lambda_k = pi^2 sum k_j^2
    source_mean_residual: float  # recovered zero mode of the source
    source: CosineApprox

    def __call__(self, x):
        body = evaluate_cosine(CosineApprox(self.freqs, self.coeffs), x)
        return self.mean + body


def tent(z):
    """Componentwise tent map 1 - |2z - 1| on [0, 1]^d."""
    z = np.asarray(z, dtype=np.float64)
    if np.any(z < 0.0) or np.any(z > 1.0):
        raise ValueError("tent transform expects coordinates in [0, 1]")
    return 1.0 - np.abs(2.0 * z - 1.0)


def _assert_sign_symmetric(freqs):
    seen = {tuple(row) for row in freqs.tolist()}
    for row in freqs.tolist():
        if tuple(-v for v in row) not in seen:
            raise ValueError("index set is not closed under sign flips")


def fourier_to_cosine(F: SpectralApprox) -> CosineApprox:
    """Fold Fourier coefficients onto cosine coefficients.

    c~_k = 2^(-|k|_0/2) * sum of c^_h over all sign patterns h with
    |h| = k present in the index set; the imaginary residue of the fold
    must vanish (checked against the largest magnitude).
    """
    _assert_sign_symmetric(F.freqs)
    absf, inverse = np.unique(np.abs(F.freqs), axis=0, return_inverse=True)
    sums = np.zeros(absf.shape[0], dtype=np.complex128)
    np.add.at(sums, inverse.reshape(-1), F.coeffs)
    nz = np.count_nonzero(absf, axis=1)
    vals = sums * 2.0 ** (-nz / 2.0)
    scale = max(1.0, float(np.abs(vals).max())) if vals.size else 1.0
    if vals.size and float(np.abs(vals.imag).max()) > 1e-10 * scale:
        raise ValueError("cosine coefficients have a non-negligible "
                         "imaginary residue; input is not conjugate-symmetric")
    return CosineApprox(freqs=absf, coeffs=vals.real, periodic=F)


def approximate_nonperiodic(f, lat: Lattice, A: IndexSet,
                            part: FiberPartition, Y: ShiftSet,
                            delta=None, method="auto") -> CosineApprox:
    """Tent-wrap f, run the periodic recovery and fold the coefficients.

    The periodic intermediate stays attached as ``.periodic`` so the
    averaging-projection identity can be checked directly.
    """
    def g(z):
        return f(tent(z))

    per = approximate(g, lat, A, part, Y, delta=delta, method=method)
    return fourier_to_cosine(per)


def evaluate_cosine(C: CosineApprox, x):
    """sum_k c~_k (sqrt 2)^{|k|_0} prod_j cos(pi k_j x_j)."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    n, d = C.freqs.shape
    w = C.coeffs * np.sqrt(2.0) ** np.count_nonzero(C.freqs, axis=1)
    out = np.empty(pts.shape[0])
    chunk = max(1, _EVAL_CHUNK // max(n, 1))
    kf = C.freqs.astype(np.float64)
    for lo in range(0, pts.shape[0], chunk):
        block = pts[lo:lo + chunk]
        basis = np.ones((block.shape[0], n))
        for j in range(d):
            basis *= np.cos(np.pi * np.outer(block[:, j], kf[:, j]))
        out[lo:lo + chunk] = basis @ w
    return float(out[0]) if single else out


def poisson_solve(f, mean_u: float, lat: Lattice, A: IndexSet,
                  part: FiberPartition, Y: ShiftSet, delta=None,
                  method="auto") -> PoissonSolution:
    """Solve Laplacian(u) = f on (0,1)^d with zero Neumann data.

    The source is recovered in the cosine basis and each nonzero mode is
    divided by its eigenvalue pi^2 sum k_j^2 and negated. The mean of u
    is not recoverable from f and must be supplied; the recovered zero
    mode of f is reported as a compatibility diagnostic.
    """
    src = approximate_nonperiodic(f, lat, A, part, Y, delta=delta, method=method)
    nonzero = np.any(src.freqs != 0, axis=1)
    freqs = src.freqs[nonzero]
    lam = np.pi ** 2 * np.sum(freqs.astype(np.float64) ** 2, axis=1)
    assert not lam.size or lam.min() >= np.pi ** 2 - 1e-12
    zero_rows = np.flatnonzero(~nonzero)
    residual = float(src.coeffs[zero_rows[0]]) if zero_rows.size else 0.0
    return PoissonSolution(mean=float(mean_u), freqs=freqs,
                           coeffs=-src.coeffs[nonzero] / lam,
                           eigenvalues=lam,
                           source_mean_residual=residual, source=src)
