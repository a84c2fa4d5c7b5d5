"""Weighted Korobov space parameters, hyperbolic-cross index sets and the
selection of the truncation threshold M.

The decay weight of a frequency vector k is

    r(k) = prod_j max{1, |k_j|^alpha / gamma_j},

and the index set collects all k with r(k) < M.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

__all__ = ["SpaceParams", "IndexSet", "geometric_weights", "weight_r",
           "build_index_set", "index_set_size", "select_M"]


@dataclass(frozen=True)
class SpaceParams:
    """Dimension d, smoothness alpha > 1/2 and product weights gamma.

    Weights are a finite tuple of length d with entries in (0, 1].
    """

    d: int
    alpha: float
    gamma: tuple

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if not self.alpha > 0.5:
            raise ValueError("smoothness alpha must exceed 1/2")
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))
        if len(self.gamma) != self.d:
            raise ValueError("need exactly d weights")
        if any(not 0.0 < g <= 1.0 for g in self.gamma):
            raise ValueError("weights must lie in (0, 1]")


@dataclass(frozen=True)
class IndexSet:
    """Hyperbolic cross {k : r(k) < M}, enumerated in lexicographic order."""

    M: float
    freqs: np.ndarray  # (n, d) int64, lexicographically sorted
    params: SpaceParams

    def __len__(self):
        return self.freqs.shape[0]


def geometric_weights(d, ratio=2.0 ** (-0.1)):
    """Weights gamma_j = ratio**(j-1); the default gives 2^((1-j)/10)."""
    return tuple(ratio ** j for j in range(d))


def weight_r(params: SpaceParams, k) -> float:
    """Product weight r(k) = prod_j max{1, |k_j|^alpha / gamma_j}."""
    k = np.asarray(k, dtype=np.float64)
    if k.shape != (params.d,):
        raise ValueError("frequency vector has wrong length")
    g = np.asarray(params.gamma)
    return float(np.prod(np.maximum(1.0, np.abs(k) ** params.alpha / g)))


def _coord_limit(gamma_j, alpha, budget):
    """Largest |k_j| with |k_j|^alpha / gamma_j < budget (strict)."""
    if budget <= 1.0:
        return -1  # no admissible value, not even 0 contributes factor < budget
    lim = (gamma_j * budget) ** (1.0 / alpha)
    m = int(np.floor(lim))
    # guard the floating-point boundary: the inequality is strict
    while m >= 1 and m ** alpha / gamma_j >= budget:
        m -= 1
    while (m + 1) ** alpha / gamma_j < budget:
        m += 1
    return m


def build_index_set(params: SpaceParams, M: float) -> IndexSet:
    """Enumerate {k : r(k) < M} by recursive per-coordinate expansion.

    Output rows are in lexicographic order on (k_1, ..., k_d); the set is
    empty when M <= 1 and closed under component-wise sign flips otherwise.
    The recursion runs over the narrow trailing coordinates and emits the
    wide first coordinate as one vectorized block per suffix, so the
    Python-level work scales with the suffix projection of the set.
    """
    if M <= 0:
        raise ValueError("M must be positive")
    d, alpha, gamma = params.d, params.alpha, params.gamma
    rows = []
    suffix = np.zeros(d, dtype=np.int64)

    def recurse(j, budget):
        if j == 0:
            m = _coord_limit(gamma[0], alpha, budget)
            if m < 0:
                return
            block = np.empty((2 * m + 1, d), dtype=np.int64)
            block[:, 0] = np.arange(-m, m + 1)
            block[:, 1:] = suffix[1:]
            rows.append(block)
            return
        m = _coord_limit(gamma[j], alpha, budget)
        for kj in range(-m, m + 1):
            factor = max(1.0, abs(kj) ** alpha / gamma[j])
            suffix[j] = kj
            recurse(j - 1, budget / factor)
        suffix[j] = 0

    recurse(d - 1, float(M))
    if rows:
        freqs = np.vstack(rows)
        freqs = freqs[np.lexsort(freqs.T[::-1])]
    else:
        freqs = np.empty((0, d), dtype=np.int64)
    return IndexSet(M=float(M), freqs=freqs, params=params)


def index_set_size(params: SpaceParams, M: float, cap=None) -> int:
    """Cardinality of the index set, optionally stopping once it exceeds cap."""
    d, alpha, gamma = params.d, params.alpha, params.gamma
    big = cap + 1 if cap is not None else None

    def count(j, budget):
        m = _coord_limit(gamma[j], alpha, budget)
        if m < 0:
            return 0
        if j == 0:
            return 2 * m + 1
        total = count(j - 1, budget)  # k_j = 0
        if big is not None and total >= big:
            return total
        for kj in range(1, m + 1):
            sub = count(j - 1, budget / (kj ** alpha / gamma[j])
                        if kj ** alpha / gamma[j] > 1.0
                        else budget)
            if sub == 0:
                break  # budget shrinks with |k_j|, so larger k_j are empty too
            total += 2 * sub  # +-kj
            if big is not None and total >= big:
                return total
        return total

    return count(d - 1, float(M))


def select_M(params: SpaceParams, N: int, mode="bisection") -> float:
    """Choose the truncation threshold M for a lattice of size N.

    ``theoretical`` maximises ((N/2) * prod_j (1 + 2 gamma_j^lam zeta(alpha*lam))^-1)^(1/lam)
    over lam in (1/alpha, 2] on a dense grid. ``bisection`` returns the
    largest M (abs. tol 1e-9) with |{k : r(k) < M}| <= N.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    alpha = params.alpha
    g = np.asarray(params.gamma)
    if mode == "theoretical":
        lam = np.linspace(1.0 / alpha + 1e-6, 2.0, 2048)
        logprod = np.array([np.sum(np.log1p(2.0 * g ** l * zeta(alpha * l)))
                            for l in lam])
        vals = (np.log(N / 2.0) - logprod) / lam
        return float(np.exp(vals.max()))
    if mode != "bisection":
        raise ValueError(f"unknown mode {mode!r}")
    lo = 1.0
    hi = N ** alpha / params.gamma[0] + 1.0
    while index_set_size(params, hi, cap=N) <= N:
        hi *= 2.0
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if index_set_size(params, mid, cap=N) <= N:
            lo = mid
        else:
            hi = mid
    assert index_set_size(params, lo, cap=N) <= N
    return lo
