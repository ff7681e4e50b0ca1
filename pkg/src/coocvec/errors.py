"""Error hierarchy shared by every module.

Each error carries a stable ``category`` tag; the command line prints the tag
as a single machine-parseable line and exits nonzero.
"""
from __future__ import annotations


class WorkbenchError(Exception):
    """Base class for all package errors."""

    category = "error"


class EmptyVocabularyError(WorkbenchError):
    category = "empty-vocabulary"


class InvalidShiftError(WorkbenchError):
    """Shift parameter k outside [1, inf)."""

    category = "invalid-k"


class DegenerateMarginalError(WorkbenchError):
    """A word or context with zero marginal count where a positive one is required."""

    category = "degenerate-marginal"


class MarkerContaminationError(WorkbenchError):
    """A matrix containing undefined / minus-infinity markers reached a numeric routine."""

    category = "marker-contamination"


class DivergenceError(WorkbenchError):
    """An iterative solver increased its objective beyond tolerance."""

    category = "divergence"


class DomainError(WorkbenchError):
    """Closed form evaluated outside its region of validity."""

    category = "domain-error"


class UnknownWordError(WorkbenchError):
    category = "unknown-word"


class InsufficientPairsError(WorkbenchError):
    """Fewer than two scorable pairs in a similarity evaluation."""

    category = "insufficient-pairs"


class DimensionMismatchError(WorkbenchError):
    category = "dimension-mismatch"


class MixedProvenanceError(WorkbenchError):
    """Inputs produced by different upstream runs were mixed in one report."""

    category = "mixed-provenance"


class FormatError(WorkbenchError):
    """Malformed input file."""

    category = "bad-format"
