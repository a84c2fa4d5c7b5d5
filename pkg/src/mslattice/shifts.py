"""Deterministic shift-set construction for de-aliasing fiber systems.

A shift set {y_s} is accepted when the normalized exponential sum
|sum_s exp(2 pi i h.y_s)| / S stays below t/(R-1) for every within-fiber
difference h; Gershgorin then bounds every fiber Gram matrix spectrum to
[(1-t)S, (1+t)S]. Three deterministic strategies are available:

* polynomial: y_s = (s, s^2, ..., s^d)/p, backed by the Weil bound;
* single lattice: y_s = s z / p with h.z never divisible by p;
* multi lattice: the union of lattices s z / p_j over several primes,
  where the Chinese Remainder Theorem limits how many primes can divide
  any projection h.z.

The adaptive driver scans primes upward and keeps the cheapest accepted
construction, with the explicit CRT prime sequence as a guaranteed
fallback.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import sympy

from . import _kernels
from .fibers import DifferenceSet
from .korobov import SpaceParams

__all__ = ["ShiftSet", "ProjectionVector", "is_prime", "next_prime",
           "nearest_prime", "prime_utils", "construct_z", "exp_sum_ratio",
           "trivial_shifts", "polynomial_shifts", "single_lattice_shifts",
           "multi_lattice_shifts", "capacity_lower_bound", "crt_sequence",
           "probabilistic_shifts", "adaptive_shifts", "projection_integers"]

_ROSSER_C = 0.32


@dataclass
class ShiftSet:
    """S points in [0,1)^d plus the strategy that produced them.

    ``blocks`` carries the exact rational structure (integer numerators
    and a prime denominator per sub-lattice) for strategies whose points
    are rationals; exponential sums over such sets are evaluated with
    integer phase arithmetic.
    """

    points: np.ndarray                    # (S, d) float64
    strategy: str
    params: dict = field(default_factory=dict)
    blocks: list | None = None            # [(numer int64 (p, d) mod p, p)]
    achieved_ratio: float | None = None

    @property
    def S(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]


@dataclass(frozen=True)
class ProjectionVector:
    """Integer direction z with h.z != 0 for every difference h."""

    z: tuple


def is_prime(n: int) -> bool:
    return bool(sympy.isprime(int(n)))


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = int(n)
    if n <= 2:
        return 2
    return n if sympy.isprime(n) else int(sympy.nextprime(n))


def nearest_prime(n: int) -> int:
    """Prime closest to n, preferring the larger one on ties."""
    n = int(n)
    if n <= 2:
        return 2
    if sympy.isprime(n):
        return n
    lo, hi = int(sympy.prevprime(n)), int(sympy.nextprime(n))
    return hi if hi - n <= n - lo else lo


def prime_utils(n: int) -> dict:
    return {"is_prime": is_prime(n), "next_prime": next_prime(n)}


def construct_z(H) -> ProjectionVector:
    """Sequential search for z with (Hz)_i != 0 for every difference row.

    Rows are grouped by their rightmost nonzero column; coordinate j only
    has to dodge the finitely many values that would zero a row ending at
    j, so scanning 0, 1, -1, 2, -2, ... always succeeds within
    ceil(|H_j|/2) steps.
    """
    diffs = H.diffs if isinstance(H, DifferenceSet) else np.asarray(H, dtype=np.int64)
    m, d = diffs.shape
    if m and np.any(np.all(diffs == 0, axis=1)):
        raise ValueError("difference matrix contains a zero row")
    rows = diffs.tolist()  # exact python ints from here on
    by_last = [[] for _ in range(d)]
    for row in rows:
        last = max(j for j in range(d) if row[j] != 0)
        by_last[last].append(row)
    z = [0] * d
    for j in range(d):
        forbidden = set()
        for row in by_last[j]:
            c = sum(row[l] * z[l] for l in range(j))
            if c % row[j] == 0:
                forbidden.add(-c // row[j])
        # candidate order 0, 1, -1, 2, -2, ...
        if 0 not in forbidden:
            z[j] = 0
        else:
            step = 1
            while step in forbidden and -step in forbidden:
                step += 1
            z[j] = step if step not in forbidden else -step
    out = ProjectionVector(z=tuple(z))
    assert m == 0 or not np.any(projection_integers(diffs, out) == 0)
    return out


def projection_integers(diffs, z: ProjectionVector):
    """X_h = |h.z| for each difference row, exact.

    Uses int64 when the worst-case magnitude fits comfortably, otherwise
    falls back to python integers; magnitudes beyond 127 bits are refused.
    """
    diffs = np.asarray(diffs)
    zv = np.asarray(z.z if isinstance(z, ProjectionVector) else z, dtype=object)
    if diffs.shape[0] == 0:
        return np.empty(0, dtype=np.int64)
    bound = int(np.abs(diffs).max(axis=0) @ np.abs(zv))
    if bound >= 1 << 127:
        raise OverflowError("projection integers exceed 127 bits")
    if bound < 1 << 62:
        return np.abs(diffs.astype(np.int64) @ np.asarray(z.z, dtype=np.int64))
    return np.abs(diffs.astype(object) @ zv)


def exp_sum_ratio(Y: ShiftSet, H) -> float:
    """max_h |sum_s exp(2 pi i h.y_s)| / S over the difference set.

    Rational shift sets are summed with exact integer phases; arbitrary
    point sets fall back to floating-point phases.
    """
    diffs = H.diffs if isinstance(H, DifferenceSet) else np.asarray(H, dtype=np.int64)
    if diffs.shape[0] == 0:
        return 0.0
    if Y.blocks is not None:
        total = np.zeros(diffs.shape[0], dtype=np.complex128)
        for numer, p in Y.blocks:
            total += _kernels.block_expsum(numer, diffs % p, p)
        return float(np.abs(total).max()) / Y.S
    sums = np.zeros(diffs.shape[0], dtype=np.complex128)
    chunk = max(1, 4_000_000 // max(Y.S, 1))
    for lo in range(0, diffs.shape[0], chunk):
        ph = Y.points @ diffs[lo:lo + chunk].T
        sums[lo:lo + chunk] = np.exp(2j * np.pi * ph).sum(axis=0)
    return float(np.abs(sums).max()) / Y.S


def trivial_shifts(d: int) -> ShiftSet:
    """The single unshifted lattice; sufficient whenever R = 1."""
    return ShiftSet(points=np.zeros((1, d)), strategy="trivial",
                    blocks=[(np.zeros((1, d), dtype=np.int64), 1)],
                    achieved_ratio=0.0)


def _poly_numer(p: int, d: int):
    numer = np.empty((p, d), dtype=np.int64)
    s = np.arange(p, dtype=np.int64)
    acc = s % p
    numer[:, 0] = acc
    for i in range(1, d):
        acc = (acc * s) % p
        numer[:, i] = acc
    return numer


def polynomial_shifts(p: int, d: int) -> ShiftSet:
    """Weil-bound curve shifts y_s = (s, s^2, ..., s^d)/p, s = 0..p-1."""
    if not is_prime(p):
        raise ValueError("p must be prime")
    numer = _poly_numer(p, d)
    return ShiftSet(points=numer / p, strategy="polynomial",
                    params={"p": p}, blocks=[(numer, p)])


def _lattice_numer(z, p: int):
    zmod = np.asarray([v % p for v in z], dtype=np.int64)
    return (np.arange(p, dtype=np.int64)[:, None] * zmod[None, :]) % p


def single_lattice_shifts(z: ProjectionVector, p: int) -> ShiftSet:
    """One rank-1 sub-lattice y_s = s z / p mod 1."""
    numer = _lattice_numer(z.z, p)
    return ShiftSet(points=numer / p, strategy="single_lattice",
                    params={"p": p, "z": z.z}, blocks=[(numer, p)])


def multi_lattice_shifts(z: ProjectionVector, primes, strategy="multi_lattice") -> ShiftSet:
    """Union of the sub-lattices s z / p_j; S = sum p_j, origin duplicated."""
    primes = [int(p) for p in primes]
    blocks = [(_lattice_numer(z.z, p), p) for p in primes]
    points = np.vstack([numer / p for numer, p in blocks])
    return ShiftSet(points=points, strategy=strategy,
                    params={"primes": primes, "z": z.z}, blocks=blocks)


def capacity_lower_bound(params: SpaceParams, M: float, N: int) -> float:
    """Smallest prime admissible for the single-lattice strategy."""
    if params.d < 2:
        raise ValueError("capacity bound requires d >= 2")
    a = math.floor((params.gamma[0] * M) ** (1.0 / params.alpha))
    b = math.floor((params.gamma[1] * M) ** (1.0 / params.alpha))
    return a * b / N


def crt_sequence(R: int, V: int, t: float) -> list:
    """Consecutive-prime sequence whose union lattice always passes.

    p_1 = next_prime(ceil(2 (R-1) ln V / (c t))) with c = 0.32 and
    k = ceil(2 (R-1) ln V / (t ln p_1)); the Rosser prime-density premise
    p_k < 2 p_1 is asserted on the generated sequence.
    """
    if V < 2:
        raise ValueError("projection bound V must be >= 2")
    lnv = math.log(V)
    p1 = next_prime(math.ceil(2.0 * (R - 1) * lnv / (_ROSSER_C * t)))
    k = max(1, math.ceil(2.0 * (R - 1) * lnv / (t * math.log(p1))))
    primes = [p1]
    while len(primes) < k:
        primes.append(next_prime(primes[-1] + 1))
    assert primes[-1] < 2 * primes[0]
    return primes


def probabilistic_shifts(R: int, N: int, K: float, t: float, seed: int,
                         d: int) -> ShiftSet:
    """i.i.d. uniform baseline with S = ceil(2 K R ln(N) / t^2) shifts.

    ``params['S_old']`` reports the older per-frequency baseline count
    ceil(2 K R ln N), kept for cost comparisons only.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    S = math.ceil(2.0 * K * R * math.log(N) / t ** 2)
    rng = np.random.default_rng(seed)
    return ShiftSet(points=rng.random((S, d)), strategy="probabilistic",
                    params={"seed": seed, "K": K, "t": t,
                            "S_old": math.ceil(2.0 * K * R * math.log(N))})


def _poly_max_sum(diffs, p: int) -> float:
    """max_h |sum_s exp(2 pi i sum_i h_i s^i / p)| with exact phases."""
    hmod = np.unique(diffs % p, axis=0)
    numer = _poly_numer(p, diffs.shape[1])
    return float(np.abs(_kernels.block_expsum(numer, hmod, p)).max())


def adaptive_shifts(H, R: int, t: float, N: int, M: float,
                    params: SpaceParams) -> ShiftSet:
    """Adaptive deterministic construction.

    Scans primes p upward from next_prime(R) while p is below the cost of
    the current best set (initially the explicit CRT sequence). At each p
    the polynomial curve is accepted if its worst exponential sum passes
    the t/(R-1) threshold; the single lattice is accepted if p clears the
    geometric capacity bound and divides no projection integer; otherwise
    p feeds the greedy multi-lattice accumulator, which freezes as soon
    as its divisibility ratio passes. The returned set's ratio is
    re-verified by direct exponential-sum evaluation.
    """
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    d = params.d
    diffs = H.diffs if isinstance(H, DifferenceSet) else np.asarray(H, dtype=np.int64)
    if R <= 1 or diffs.shape[0] == 0:
        return trivial_shifts(d)

    threshold = t / (R - 1)
    z = construct_z(diffs)
    X = projection_integers(diffs, z)
    V = max(2, int(X.max()))

    crt_primes = crt_sequence(R, V, t)
    best = multi_lattice_shifts(z, crt_primes, strategy="crt_bound")
    s_best = best.S
    p_min = capacity_lower_bound(params, M, N) if d >= 2 else 0.0

    greedy_primes = []
    s_greedy = 0
    n_h = np.zeros(diffs.shape[0], dtype=np.int64)
    greedy_found = False

    p = next_prime(R)
    while p < s_best:
        # Step A: polynomial strategy
        if _poly_max_sum(diffs, p) <= threshold * p * (1.0 + 1e-12) + 1e-9:
            best = polynomial_shifts(p, d)
            s_best = p
            break
        # Step B: single-lattice strategy
        if p >= p_min and not np.any(X % p == 0):
            best = single_lattice_shifts(z, p)
            s_best = p
            break
        # Step C: greedy multi-lattice accumulation
        if not greedy_found:
            greedy_primes.append(p)
            s_greedy += p
            n_h[np.asarray(X % p == 0, dtype=bool)] += p
            if n_h.max() / s_greedy <= threshold:
                greedy_found = True
                if s_greedy < s_best:
                    best = multi_lattice_shifts(z, greedy_primes)
                    s_best = s_greedy
        p = next_prime(p + 1)

    best.achieved_ratio = exp_sum_ratio(best, diffs)
    assert best.achieved_ratio <= threshold * (1.0 + 1e-10) + 1e-12
    return best
