"""Random Rota basis decompositions over finite fields, the rationals and graphic matroids."""

from __future__ import annotations

from .constants import CertifiedValue, ConstantsReport, alpha, c_prime, choose_K, choose_L, constants_report, delta, min_n
from .decompose import (
    Decomposition,
    DecomposeResult,
    Diagnostics,
    IndependenceGraph,
    SplitView,
    bad_pairs,
    build_graph,
    decompose,
    degree_stats,
    max_matching,
    split,
    verify,
)
from .errors import (
    BadSplitPoint,
    BudgetExceeded,
    DimensionMismatch,
    EmptyList,
    NonPrimeModulus,
    RejectionBudgetExceeded,
    RotaError,
    TailDiverges,
    TooLarge,
    UnsupportedInExactIntegerMode,
    ZeroInverse,
)
from .exact import SearchBudget, enumerate_ordered_bases, oracle_decompose, oracle_matching
from .field import Field, FieldSpec, field_make, scalar_inv
from .harness import ExperimentConfig, TrialRecord, run_experiment
from .linalg import EchelonBasis, TSet, intersection_dim, is_dispersed, multiset_independent, rank
from .sample import BasisFamily, RngStream, TSpec, sample_basis_tuple, sample_family, t_enumerate, wilson_tree

__version__ = "0.1.0"
