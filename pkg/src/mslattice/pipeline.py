"""Convenience wiring of the full approximation pipeline.

Bundles threshold selection, CBC lattice construction, fiber analysis and
shift-set construction for one (params, N) configuration, plus a survey
helper that prices every shift strategy for cost comparisons.
"""

import math
from dataclasses import dataclass

import numpy as np

from .cbc import Lattice, cbc_construct
from .fibers import DifferenceSet, FiberPartition, difference_set, partition_fibers
from .korobov import IndexSet, SpaceParams, build_index_set, select_M
from .shifts import (ShiftSet, adaptive_shifts, capacity_lower_bound,
                     construct_z, crt_sequence, exp_sum_ratio, multi_lattice_shifts,
                     next_prime, polynomial_shifts, probabilistic_shifts,
                     projection_integers, single_lattice_shifts, trivial_shifts,
                     _poly_max_sum)

__all__ = ["Pipeline", "build_pipeline", "strategy_survey",
           "probabilistic_counts"]


@dataclass
class Pipeline:
    params: SpaceParams
    N: int
    M: float
    index_set: IndexSet
    lattice: Lattice
    partition: FiberPartition
    diffs: DifferenceSet

    @property
    def R(self):
        return max(self.partition.R, 1)

    def shifts(self, t: float, strategy="adaptive", seed=0, K=None) -> ShiftSet:
        """Build a shift set accepted for this partition."""
        R = self.R
        if strategy == "adaptive":
            return adaptive_shifts(self.diffs, R, t, self.N, self.M, self.params)
        if strategy == "probabilistic":
            if K is None:
                K = 1.0 + math.log(100.0) / math.log(self.N)
            return probabilistic_shifts(R, self.N, K, t, seed, self.params.d)
        sets = strategy_survey(self, t, build=True)
        if strategy not in sets or sets[strategy] is None:
            raise ValueError(f"strategy {strategy!r} not available for this config")
        return sets[strategy]


def build_pipeline(params: SpaceParams, N: int, m_mode="bisection") -> Pipeline:
    M = select_M(params, N, mode=m_mode)
    A = build_index_set(params, M)
    lat = cbc_construct(params, N)
    part = partition_fibers(A, lat)
    diffs = difference_set(part)
    return Pipeline(params=params, N=N, M=M, index_set=A, lattice=lat,
                    partition=part, diffs=diffs)


def strategy_survey(pipe: Pipeline, t: float, build=False, verify=False):
    """Smallest accepted shift set per deterministic strategy.

    Returns a dict strategy -> ShiftSet (or None when the strategy finds
    nothing below the CRT fallback cost). With ``build=False`` only the
    sizes S are reported (dict strategy -> int or None).
    """
    d = pipe.params.d
    diffs = pipe.diffs.diffs
    R = pipe.R
    if R <= 1 or diffs.shape[0] == 0:
        triv = trivial_shifts(d)
        out = {"trivial": triv}
        return out if build else {k: v.S for k, v in out.items()}

    threshold = t / (R - 1)
    z = construct_z(diffs)
    X = projection_integers(diffs, z)
    V = max(2, int(X.max()))
    crt_primes = crt_sequence(R, V, t)
    s_cap = sum(crt_primes)
    p_min = capacity_lower_bound(pipe.params, pipe.M, pipe.N) if d >= 2 else 0.0

    poly_p = None
    single_p = None
    greedy_primes = []
    greedy_final = None
    s_greedy = 0
    n_h = np.zeros(diffs.shape[0], dtype=np.int64)

    p = next_prime(R)
    while p < s_cap and (poly_p is None or single_p is None or greedy_final is None):
        if poly_p is None and _poly_max_sum(diffs, p) <= threshold * p * (1 + 1e-12) + 1e-9:
            poly_p = p
        if single_p is None and p >= p_min and not np.any(X % p == 0):
            single_p = p
        if greedy_final is None:
            greedy_primes.append(p)
            s_greedy += p
            n_h[np.asarray(X % p == 0, dtype=bool)] += p
            if n_h.max() / s_greedy <= threshold:
                greedy_final = list(greedy_primes)
        p = next_prime(p + 1)

    sets = {
        "polynomial": polynomial_shifts(poly_p, d) if poly_p else None,
        "single_lattice": single_lattice_shifts(z, single_p) if single_p else None,
        "multi_lattice": (multi_lattice_shifts(z, greedy_final)
                          if greedy_final else None),
        "crt_bound": multi_lattice_shifts(z, crt_primes, strategy="crt_bound"),
    }
    candidates = [s for s in sets.values() if s is not None]
    sets["adaptive"] = min(candidates, key=lambda s: s.S)
    if verify:
        for s in sets.values():
            if s is not None and s.achieved_ratio is None:
                s.achieved_ratio = exp_sum_ratio(s, pipe.diffs)
    if build:
        return sets
    return {k: (v.S if v is not None else None) for k, v in sets.items()}


def probabilistic_counts(R: int, N: int, t: float, K=None):
    """Shift counts of the probabilistic baselines at a 99% success target.

    ``standard`` is the per-frequency scheme (ceil(2 K R ln N) shifts for
    each of up to R frequencies in a fiber); ``simplified`` is the
    uniform-shift count ceil(2 K R ln N / t^2).
    """
    if K is None:
        K = 1.0 + math.log(100.0) / math.log(N)
    per_freq = math.ceil(2.0 * K * R * math.log(N))
    return {"standard": R * per_freq,
            "simplified": math.ceil(2.0 * K * R * math.log(N) / t ** 2),
            "K": K}
