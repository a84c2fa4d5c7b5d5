"""Aliasing fibers of an index set on a rank-1 lattice.

Frequencies sharing the residue k.g mod N are indistinguishable on the
lattice nodes; the partition into fibers and the set of within-fiber
differences drive the shift-set construction.
"""

from dataclasses import dataclass
import warnings

import numpy as np

from .cbc import Lattice, validate_zero_fiber
from .korobov import IndexSet

__all__ = ["FiberPartition", "DifferenceSet", "partition_fibers",
           "difference_set"]


@dataclass(frozen=True)
class FiberPartition:
    """Grouping of an index set by residue k.g mod N.

    ``fibers[j]`` holds row indices into ``index_set.freqs``; the first
    entry of each fiber is its lexicographically smallest member.
    """

    index_set: IndexSet
    lattice: Lattice
    residues: np.ndarray          # (J,) int64
    fibers: list                  # J arrays of row indices
    R: int                        # max fiber cardinality
    J: int

    def representative(self, j):
        return self.index_set.freqs[self.fibers[j][0]]


@dataclass(frozen=True)
class DifferenceSet:
    """Nonzero within-fiber differences, one representative per +-pair."""

    diffs: np.ndarray             # (m, d) int64
    source: FiberPartition

    def __len__(self):
        return self.diffs.shape[0]


def partition_fibers(A: IndexSet, lat: Lattice) -> FiberPartition:
    """Group the index set by residue k.g mod N.

    Components are reduced mod N before the dot product so the int64
    accumulation stays exact for any supported N and d.
    """
    if not validate_zero_fiber(lat, A):
        warnings.warn("index set intersects the dual lattice beyond 0; "
                      "recovery within the zero fiber will alias")
    N = lat.N
    g = np.asarray(lat.g, dtype=np.int64)
    if len(A) == 0:
        return FiberPartition(A, lat, residues=np.empty(0, dtype=np.int64),
                              fibers=[], R=0, J=0)
    res = (A.freqs % N) @ g % N
    order = np.argsort(res, kind="stable")  # stable keeps lex order in fibers
    sorted_res = res[order]
    cuts = np.flatnonzero(np.diff(sorted_res)) + 1
    groups = np.split(order, cuts)
    residues = np.array([int(res[grp[0]]) for grp in groups], dtype=np.int64)
    R = max(len(grp) for grp in groups)
    return FiberPartition(A, lat, residues=residues, fibers=groups,
                          R=int(R), J=len(groups))


def _canonical_sign(diffs):
    """Negate rows whose first nonzero entry is negative."""
    if diffs.shape[0] == 0:
        return diffs
    first = np.zeros(diffs.shape[0], dtype=np.int64)
    undecided = np.ones(diffs.shape[0], dtype=bool)
    for j in range(diffs.shape[1]):
        col = diffs[:, j]
        pick = undecided & (col != 0)
        first[pick] = col[pick]
        undecided &= col == 0
    return np.where((first < 0)[:, None], -diffs, diffs)


def difference_set(part: FiberPartition) -> DifferenceSet:
    """All pairwise differences within each fiber, sign-deduplicated.

    Asserts the component bound max_j |h_j| < (2 C_alpha M)^(1/alpha) with
    C_alpha = 1 for alpha <= 1 and 2^(alpha-1) otherwise.
    """
    freqs = part.index_set.freqs
    blocks = []
    for grp in part.fibers:
        v = len(grp)
        if v < 2:
            continue
        pts = freqs[grp]
        iu, ju = np.triu_indices(v, k=1)
        blocks.append(pts[ju] - pts[iu])
    if blocks:
        diffs = np.unique(_canonical_sign(np.vstack(blocks)), axis=0)
    else:
        diffs = np.empty((0, freqs.shape[1]), dtype=np.int64)
    alpha = part.index_set.params.alpha
    c_alpha = 1.0 if alpha <= 1.0 else 2.0 ** (alpha - 1.0)
    bound = (2.0 * c_alpha * part.index_set.M) ** (1.0 / alpha)
    if diffs.size:
        assert np.abs(diffs).max() < bound + 1e-9
    return DifferenceSet(diffs=diffs, source=part)
