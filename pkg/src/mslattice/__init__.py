"""Deterministic multiple-shift rank-1 lattice approximation.

Pipeline: choose a hyperbolic-cross frequency set in a weighted Korobov
space, build a rank-1 lattice component-by-component, partition the
frequencies into aliasing fibers, construct a small deterministic shift
set that de-aliases every fiber, and recover all coefficients by
per-fiber least squares. A tent transformation extends the machinery to
non-periodic targets and a spectral Neumann-Poisson solver.
"""

from .korobov import (SpaceParams, IndexSet, geometric_weights, weight_r,
                      build_index_set, index_set_size, select_M)
from .cbc import Lattice, bernoulli_even, worst_case_P, cbc_construct
from .fibers import (FiberPartition, DifferenceSet, partition_fibers,
                     difference_set)
from .shifts import (ShiftSet, ProjectionVector, is_prime, next_prime,
                     nearest_prime, construct_z, projection_integers,
                     exp_sum_ratio, trivial_shifts, polynomial_shifts,
                     single_lattice_shifts, multi_lattice_shifts,
                     capacity_lower_bound, crt_sequence,
                     probabilistic_shifts, adaptive_shifts)
from .reconstruct import (SpectralApprox, GramDiagnostics, dft_bluestein,
                          observables, solve_fiber, approximate, evaluate,
                          gram_diagnostics)
from .cosine_pde import (CosineApprox, PoissonSolution, tent,
                         fourier_to_cosine, approximate_nonperiodic,
                         evaluate_cosine, poisson_solve)
from .pipeline import (Pipeline, build_pipeline, strategy_survey,
                       probabilistic_counts)

__version__ = "0.1.0"

__all__ = [
    "SpaceParams", "IndexSet", "geometric_weights", "weight_r",
    "build_index_set", "index_set_size", "select_M",
    "Lattice", "bernoulli_even", "worst_case_P", "cbc_construct",
    "FiberPartition", "DifferenceSet", "partition_fibers", "difference_set",
    "ShiftSet", "ProjectionVector", "is_prime", "next_prime",
    "nearest_prime", "construct_z", "projection_integers", "exp_sum_ratio",
    "trivial_shifts", "polynomial_shifts", "single_lattice_shifts",
    "multi_lattice_shifts", "capacity_lower_bound", "crt_sequence",
    "probabilistic_shifts", "adaptive_shifts",
    "SpectralApprox", "GramDiagnostics", "dft_bluestein", "observables",
    "solve_fiber", "approximate", "evaluate", "gram_diagnostics",
    "CosineApprox", "PoissonSolution", "tent", "fourier_to_cosine",
    "approximate_nonperiodic", "evaluate_cosine", "poisson_solve",
    "Pipeline", "build_pipeline", "strategy_survey", "probabilistic_counts",
    "__version__",
]
