"""Co-occurrence word-vector workbench.

Counts weighted co-occurrences, builds PMI-family matrices, solves per-pair
loss objectives in closed form, applies L1/L2 regularization, factorizes the
results (randomized SVD and curvature-weighted ALS), trains a convex sparse
bag-of-contexts model, and evaluates embeddings on similarity datasets.
"""
from .closed_form import (
    LOSS_NAMES,
    PairSolution,
    assemble_spmi_solution,
    loss_derivative,
    loss_second_derivative,
    loss_value,
    minimize_pair_numeric,
    objective_value,
    pair_objective,
    solve_pair,
)
from .convex_model import ContextSpec, TrainConfig, build_examples, explain, train
from .corpus import (
    CooccurrenceStats,
    Vocabulary,
    WindowSpec,
    build_vocabulary,
    check_symmetry,
    count_cooccurrences,
    count_sharded,
    read_corpus,
    tokenize,
)
from .errors import (
    DegenerateMarginalError,
    DimensionMismatchError,
    DivergenceError,
    DomainError,
    EmptyVocabularyError,
    FormatError,
    InsufficientPairsError,
    InvalidShiftError,
    MarkerContaminationError,
    MixedProvenanceError,
    UnknownWordError,
    WorkbenchError,
)
from .evaluation import SpearmanReport, neighbors, spearman
from .factorization import (
    AlsResult,
    SvdResult,
    WeightedFactorizationProblem,
    consistency_report,
    truncated_svd,
    weighted_factorize,
    word_vectors,
)
from .formats import (
    MatrixInfo,
    Provenance,
    make_provenance,
    read_cooc,
    read_embedding,
    read_matrix,
    read_provenance,
    read_similarity,
    read_vocab,
    write_cooc,
    write_embedding,
    write_matrix,
    write_vocab,
)
from .pmi import SparseMatrix, build_matrix, pmi_value
from .regularization import (
    RegSpec,
    h_function,
    regularize_stats,
    solve_exact,
    solve_l1,
    solve_l2,
)
from .vectors import Embedding, EmbeddingPair

__version__ = "0.1.0"

__all__ = [
    "AlsResult",
    "ContextSpec",
    "CooccurrenceStats",
    "DegenerateMarginalError",
    "DimensionMismatchError",
    "DivergenceError",
    "DomainError",
    "Embedding",
    "EmbeddingPair",
    "EmptyVocabularyError",
    "FormatError",
    "InsufficientPairsError",
    "InvalidShiftError",
    "LOSS_NAMES",
    "MarkerContaminationError",
    "MatrixInfo",
    "MixedProvenanceError",
    "PairSolution",
    "Provenance",
    "RegSpec",
    "SparseMatrix",
    "SpearmanReport",
    "SvdResult",
    "TrainConfig",
    "UnknownWordError",
    "Vocabulary",
    "WeightedFactorizationProblem",
    "WindowSpec",
    "WorkbenchError",
    "assemble_spmi_solution",
    "build_examples",
    "build_matrix",
    "build_vocabulary",
    "check_symmetry",
    "consistency_report",
    "count_cooccurrences",
    "count_sharded",
    "explain",
    "h_function",
    "loss_derivative",
    "loss_second_derivative",
    "loss_value",
    "make_provenance",
    "minimize_pair_numeric",
    "neighbors",
    "objective_value",
    "pair_objective",
    "pmi_value",
    "read_cooc",
    "read_corpus",
    "read_embedding",
    "read_matrix",
    "read_provenance",
    "read_similarity",
    "read_vocab",
    "regularize_stats",
    "solve_exact",
    "solve_l1",
    "solve_l2",
    "solve_pair",
    "spearman",
    "tokenize",
    "train",
    "truncated_svd",
    "weighted_factorize",
    "word_vectors",
    "write_cooc",
    "write_embedding",
    "write_matrix",
    "write_vocab",
]
