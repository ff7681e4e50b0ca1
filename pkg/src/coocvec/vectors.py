"""Shared dense-vector containers.

An Embedding is a labelled matrix of word vectors.  Entries that are driven to
minus infinity by the logistic closed form are represented by a boolean mask
(the stored float is 0.0 there), never by a raw float infinity, so downstream
linear algebra cannot silently absorb them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UnknownWordError


@dataclass
class Embedding:
    """Word vectors with row labels.

    vectors has shape (len(words), dim).  neg_inf_mask, when present, marks
    entries whose true value is -infinity; masked entries hold 0.0 in
    ``vectors`` and are treated as absent by dot products.
    """

    words: list[str]
    vectors: np.ndarray
    neg_inf_mask: np.ndarray | None = None
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.vectors = np.asarray(self.vectors, dtype=float)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.words):
            raise ValueError("vector matrix shape does not match word list")
        self._index = {w: i for i, w in enumerate(self.words)}

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def index(self, word: str) -> int:
        try:
            return self._index[word]
        except KeyError:
            raise UnknownWordError(f"word not in embedding: {word!r}") from None

    def vector(self, word: str) -> np.ndarray:
        return self.vectors[self.index(word)]


@dataclass
class EmbeddingPair:
    """Word matrix W and context matrix C sharing an inner dimension."""

    W: np.ndarray
    C: np.ndarray
    W_neg_inf: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.W = np.asarray(self.W, dtype=float)
        self.C = np.asarray(self.C, dtype=float)
        if self.W.shape[1] != self.C.shape[1]:
            raise ValueError("W and C disagree on the inner dimension")

    @property
    def dim(self) -> int:
        return self.W.shape[1]
