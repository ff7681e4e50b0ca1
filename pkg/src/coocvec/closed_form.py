"""Per-pair objectives for count-weighted binary losses and their minimizers.

Each (word, context) pair contributes

    rho(x) = #(w,c) * L(x, +1) + k * #(w,.) * #(.,c) / |D| * L(x, -1)

where x is the score the model assigns the pair and L is one of five losses
in the margin variable y*x.  Because rho depends on the embedding only
through the scalar x, its minimizer has a closed form per loss; with one-hot
context vectors those scalars are exactly the entries of the word matrix, so
full matrices of solutions can be assembled directly from counts.

All minimizers can be written in terms of pmi = log(#(w,c)|D| / #(w,.)#(.,c))
and the shift k:

    logistic                 x* = pmi - log k
    squared family           x* = (e^pmi - k) / (e^pmi + k)
    hinge                    x* = +1 if pmi >= log k else -1

The squared family (squared, squared hinge, huber) shares one formula because
the three losses agree on the interval where the minimizer lands.  A pair
with #(w,c) = 0 drives the logistic score to minus infinity; that is reported
as a marker, never as a float infinity inside a matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import CooccurrenceStats
from .errors import (
    DegenerateMarginalError,
    DimensionMismatchError,
    InvalidShiftError,
    MarkerContaminationError,
)
from .vectors import EmbeddingPair

LOSS_NAMES = ("logistic", "squared", "squared_hinge", "hinge", "huber")
QUADRATIC_FAMILY = ("squared", "squared_hinge", "huber")


def _softplus(t: float) -> float:
    # log(1 + e^t) without overflow
    if t > 35.0:
        return t + math.log1p(math.exp(-t))
    if t < -35.0:
        return math.exp(t)
    return math.log1p(math.exp(t))


def _sigmoid(t: float) -> float:
    if t >= 0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def _check_kind(kind: str) -> None:
    if kind not in LOSS_NAMES:
        raise ValueError(f"unknown loss {kind!r}, expected one of {LOSS_NAMES}")


def loss_value(kind: str, x: float, y: float) -> float:
    """L(x, y) for y in {+1, -1}."""
    _check_kind(kind)
    yx = y * x
    if kind == "logistic":
        return _softplus(-yx)
    if kind == "squared":
        return 0.5 * (x - y) ** 2
    if kind == "squared_hinge":
        return 0.5 * max(1.0 - yx, 0.0) ** 2
    if kind == "hinge":
        return max(1.0 - yx, 0.0)
    # huber: quadratic near the margin, linear far on the wrong side
    if yx >= -1.0:
        return 0.5 * max(1.0 - yx, 0.0) ** 2
    return -2.0 * yx


def loss_derivative(kind: str, x: float, y: float) -> float:
    """dL/dx at (x, y)."""
    _check_kind(kind)
    yx = y * x
    if kind == "logistic":
        return -y * _sigmoid(-yx)
    if kind == "squared":
        return x - y
    if kind == "squared_hinge":
        return -y * max(1.0 - yx, 0.0)
    if kind == "hinge":
        return -y if yx < 1.0 else 0.0
    if yx < -1.0:
        return -2.0 * y
    return -y * (1.0 - yx) if yx <= 1.0 else 0.0


def loss_second_derivative(kind: str, x: float, y: float) -> float | None:
    """d2L/dx2 at (x, y); None for the hinge, whose curvature is nowhere defined."""
    _check_kind(kind)
    yx = y * x
    if kind == "logistic":
        return _sigmoid(yx) * _sigmoid(-yx)
    if kind == "squared":
        return 1.0
    if kind == "squared_hinge":
        return 1.0 if yx < 1.0 else 0.0
    if kind == "hinge":
        return None
    return 1.0 if -1.0 < yx < 1.0 else 0.0


def _check_counts(n_wc: float, n_w: float, n_c: float, total: float, k: float) -> None:
    if n_wc < 0 or n_w < 0 or n_c < 0:
        raise ValueError("counts must be non-negative")
    if total <= 0:
        raise ValueError(f"total pair mass must be positive, got {total}")
    if not (k >= 1.0 and math.isfinite(k)):
        raise InvalidShiftError(f"shift k must be a finite real >= 1, got {k}")


def pair_objective(
    kind: str, n_wc: float, n_w: float, n_c: float, total: float, k: float, x: float
) -> float:
    """rho(x): positive count times L(x,+1) plus expected negative mass times L(x,-1)."""
    _check_counts(n_wc, n_w, n_c, total, k)
    neg_mass = k * n_w * n_c / total
    return n_wc * loss_value(kind, x, 1.0) + neg_mass * loss_value(kind, x, -1.0)


@dataclass
class PairSolution:
    """Minimizer of one pair objective plus its local curvature.

    neg_inf marks the logistic zero-count case whose score runs off to minus
    infinity; x_star is meaningless there.  alpha is the second derivative of
    the pair objective at the minimizer (None for hinge), delta the total
    pair weight #(w,c) + k #(w,.) #(.,c) / |D|, and pos_condition records
    whether pmi strictly exceeds log k.
    """

    x_star: float
    neg_inf: bool
    alpha: float | None
    delta: float
    pos_condition: bool


def solve_pair(
    kind: str, n_wc: float, n_w: float, n_c: float, total: float, k: float
) -> PairSolution:
    """Closed-form minimizer of the pair objective.

    The curvature reported for the logistic loss is sigma(x*) sigma(-x*) delta,
    which for positive counts equals #(w,c) times the expected negative mass
    divided by delta; the squared family has constant curvature delta.
    """
    _check_kind(kind)
    _check_counts(n_wc, n_w, n_c, total, k)
    if n_w == 0.0 or n_c == 0.0:
        raise DegenerateMarginalError(
            f"marginals must be positive to place a pair, got #(w,.)={n_w}, #(.,c)={n_c}"
        )
    neg_mass = k * n_w * n_c / total
    delta = n_wc + neg_mass
    pos_condition = n_wc * total > k * n_w * n_c

    if n_wc == 0.0:
        if kind == "logistic":
            return PairSolution(-math.inf, True, 0.0, delta, False)
        alpha = None if kind == "hinge" else delta
        return PairSolution(-1.0, False, alpha, delta, False)

    if kind == "logistic":
        x = math.log(n_wc / neg_mass)
        alpha = n_wc * neg_mass / delta  # = sigma(x*) sigma(-x*) delta
        return PairSolution(x, False, alpha, delta, pos_condition)
    if kind == "hinge":
        x = 1.0 if n_wc * total >= k * n_w * n_c else -1.0
        return PairSolution(x, False, None, delta, pos_condition)
    x = (n_wc - neg_mass) / (n_wc + neg_mass)
    return PairSolution(x, False, delta, delta, pos_condition)


def minimize_pair_numeric(
    kind: str,
    n_wc: float,
    n_w: float,
    n_c: float,
    total: float,
    k: float,
    lo: float = -60.0,
    hi: float = 60.0,
) -> float:
    """Minimize the pair objective numerically, without the closed forms.

    Hinge objectives are piecewise linear with the optimum at a margin vertex,
    so those are compared directly; the smooth losses are solved by bisecting
    the sign change of the first derivative, which every convex member has.
    """
    _check_kind(kind)
    if kind == "hinge":
        return min((-1.0, 1.0), key=lambda v: pair_objective(kind, n_wc, n_w, n_c, total, k, v))
    neg_mass = k * n_w * n_c / total

    def slope(x: float) -> float:
        return n_wc * loss_derivative(kind, x, 1.0) + neg_mass * loss_derivative(kind, x, -1.0)

    a, b = lo, hi
    fa = slope(a)
    if fa >= 0.0:
        return a
    if slope(b) <= 0.0:
        return b
    for _ in range(200):
        mid = 0.5 * (a + b)
        if slope(mid) < 0.0:
            a = mid
        else:
            b = mid
        if b - a < 1e-15 * max(1.0, abs(a)):
            break
    return 0.5 * (a + b)


def assemble_spmi_solution(stats: CooccurrenceStats, kind: str, k: float) -> EmbeddingPair:
    """Solve every pair against one-hot context vectors.

    C is the identity, so the score of (w, c) is just W[w, c] and each entry
    is the closed-form scalar solution; for the logistic loss the result is
    exactly the shifted PMI matrix with markers at absent pairs.
    """
    n = stats.n_words
    W = np.zeros((n, n))
    mask = np.zeros((n, n), dtype=bool) if kind == "logistic" else None
    for w in range(n):
        for c in range(n):
            sol = solve_pair(
                kind,
                stats.count(w, c),
                float(stats.row_marginal[w]),
                float(stats.col_marginal[c]),
                stats.total,
                k,
            )
            if sol.neg_inf:
                mask[w, c] = True
            else:
                W[w, c] = sol.x_star
    return EmbeddingPair(W=W, C=np.eye(n), W_neg_inf=mask)


def _loss_matrix(kind: str, X: np.ndarray, y: float) -> np.ndarray:
    yx = y * X
    if kind == "logistic":
        return np.logaddexp(0.0, -yx)
    if kind == "squared":
        return 0.5 * (X - y) ** 2
    if kind == "squared_hinge":
        return 0.5 * np.maximum(1.0 - yx, 0.0) ** 2
    if kind == "hinge":
        return np.maximum(1.0 - yx, 0.0)
    return np.where(yx >= -1.0, 0.5 * np.maximum(1.0 - yx, 0.0) ** 2, -2.0 * yx)


def objective_value(
    W: np.ndarray,
    C: np.ndarray,
    stats: CooccurrenceStats,
    kind: str,
    k: float,
    neg_inf_mask: np.ndarray | None = None,
) -> float:
    """Full corpus objective: sum of pair objectives at scores X = W C^T.

    The negative term ranges over every pair with positive marginals, not
    just the stored ones.  neg_inf_mask marks score entries that sit at minus
    infinity (only the logistic loss produces them); masked stored pairs are
    not allowed, and masked absent pairs contribute the limit value zero.
    """
    _check_kind(kind)
    if not (k >= 1.0 and math.isfinite(k)):
        raise InvalidShiftError(f"shift k must be a finite real >= 1, got {k}")
    W = np.asarray(W, dtype=float)
    C = np.asarray(C, dtype=float)
    n = stats.n_words
    if W.ndim != 2 or C.ndim != 2 or W.shape[0] != n or C.shape[0] != n:
        raise DimensionMismatchError(
            f"need W and C with {n} rows, got {W.shape} and {C.shape}"
        )
    if W.shape[1] != C.shape[1]:
        raise DimensionMismatchError(
            f"inner dimensions differ: {W.shape[1]} vs {C.shape[1]}"
        )
    if neg_inf_mask is not None and kind != "logistic":
        raise MarkerContaminationError(
            "minus-infinity score markers only make sense for the logistic loss"
        )

    X = W @ C.T
    pos = 0.0
    for (w, c), joint in stats.pairs.items():
        if neg_inf_mask is not None and neg_inf_mask[w, c]:
            raise MarkerContaminationError(
                f"stored pair {(w, c)} has a minus-infinity score"
            )
        pos += joint * loss_value(kind, float(X[w, c]), 1.0)

    neg_losses = _loss_matrix(kind, X, -1.0)
    if neg_inf_mask is not None:
        # logistic L(x, -1) = log(1 + e^x) -> 0 as x -> -inf
        neg_losses = np.where(neg_inf_mask, 0.0, neg_losses)
    weights = np.outer(stats.row_marginal, stats.col_marginal)
    neg = float((weights * neg_losses).sum()) * k / stats.total
    return pos + neg
