"""Sparse signal reconstruction with zero-attracting adaptive filters."""

from .attractors import AttractorKind, AttractorParams, attract_exponential, attract_reciprocal, attract_vector
from .core import (
    ProblemInstance,
    SparseSignal,
    derive_seed,
    generate_sensing_matrix,
    generate_sparse_signal,
    load_instance,
    make_instance,
    measure,
    msd,
    relative_error,
    save_instance,
    snr_db,
)
from .projection import PseudoInverse, SingularMatrixError, least_squares_solution, project, pseudo_inverse
from .solvers import DivergenceError, RunReport, SolverConfig, SolverKind, SolverState, preset, row_index, run

__version__ = "0.1.0"
