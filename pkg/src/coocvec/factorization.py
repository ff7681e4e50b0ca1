"""Low-rank factorization: randomized truncated SVD and weighted ALS.

The SVD path serves matrices whose absent entries mean an exact value
(positive PMI variants, regularized scores); matrices with undefined absent
entries are refused outright.  The ALS path minimizes

    0.5 * sum_ij alpha_ij (w_i . c_j - x_ij)^2 + ridge * (|W|_F^2 + |C|_F^2)

over the stored support only, with per-pair curvature weights alpha.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, DivergenceError, MarkerContaminationError
from .pmi import SparseMatrix
from .vectors import Embedding, EmbeddingPair


@dataclass
class SvdResult:
    """Truncated factors M ~ U diag(sigma) V^T with orthonormal columns."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.sigma)


def _as_dense(M: SparseMatrix | np.ndarray) -> np.ndarray:
    if isinstance(M, SparseMatrix):
        return M.to_dense()
    A = np.asarray(M, dtype=float)
    if not np.isfinite(A).all():
        raise MarkerContaminationError("matrix contains non-finite entries")
    return A


def truncated_svd(
    M: SparseMatrix | np.ndarray,
    dim: int,
    seed: int = 0,
    oversample: int = 8,
    power_iters: int = 4,
) -> SvdResult:
    """Randomized subspace iteration for the top `dim` singular triplets.

    A Gaussian sketch of dim + oversample columns is refined by QR-stabilized
    power iterations before a small dense SVD.  Deterministic for a fixed
    seed.
    """
    A = _as_dense(M)
    n_rows, n_cols = A.shape
    if not 1 <= dim <= min(n_rows, n_cols):
        raise DimensionMismatchError(
            f"dim must lie in [1, {min(n_rows, n_cols)}], got {dim}"
        )
    rng = np.random.default_rng(seed)
    sketch = min(dim + oversample, min(n_rows, n_cols))
    G = rng.standard_normal((n_cols, sketch))
    Q, _ = np.linalg.qr(A @ G)
    for _ in range(power_iters):
        Z, _ = np.linalg.qr(A.T @ Q)
        Q, _ = np.linalg.qr(A @ Z)
    B = Q.T @ A
    Ub, s, Vt = np.linalg.svd(B, full_matrices=False)
    U = Q @ Ub
    return SvdResult(U=U[:, :dim], sigma=s[:dim], V=Vt[:dim].T)


def word_vectors(svd: SvdResult, flavor: str, words: list[str] | None = None) -> Embedding:
    """Turn SVD factors into word vectors.

    plain:     U diag(sigma)        (rows reproduce the row space of M)
    symmetric: U diag(sqrt(sigma))  (splits the spectrum with the context side)
    """
    if flavor not in ("plain", "symmetric"):
        raise ValueError(f"flavor must be plain or symmetric, got {flavor!r}")
    scale = svd.sigma if flavor == "plain" else np.sqrt(svd.sigma)
    vectors = svd.U * scale
    if words is None:
        words = [str(i) for i in range(vectors.shape[0])]
    if len(words) != vectors.shape[0]:
        raise DimensionMismatchError(
            f"{len(words)} labels for {vectors.shape[0]} vector rows"
        )
    return Embedding(words=list(words), vectors=vectors)


def consistency_report(M: SparseMatrix | np.ndarray, flavor: str) -> float:
    """Largest absolute gap between W W^T and M M^T at full rank.

    The plain flavor keeps the gap at rounding level; the symmetric flavor
    replaces squared singular values by plain ones inside the product, so any
    spectrum away from 0/1 shows a real gap.
    """
    A = _as_dense(M)
    n = min(A.shape)
    if max(A.shape) > 500:
        raise DimensionMismatchError(
            f"consistency report is a desk-scale check (max side 500), got {A.shape}"
        )
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    svd = SvdResult(U=U, sigma=s, V=Vt.T)
    W = word_vectors(svd, flavor).vectors
    gap = np.abs(W @ W.T - A @ A.T)
    return float(gap.max())


@dataclass
class WeightedFactorizationProblem:
    """Sparse weighted least-squares factorization instance.

    targets and weights must share their support exactly; weights are
    non-negative and targets finite (minus-infinity markers have no place
    here and are rejected).
    """

    n_rows: int
    n_cols: int
    targets: dict[tuple[int, int], float]
    weights: dict[tuple[int, int], float]
    dim: int
    epochs: int = 200
    ridge: float = 1e-8
    tol: float = 1e-8

    def __post_init__(self) -> None:
        if set(self.targets) != set(self.weights):
            raise DimensionMismatchError("targets and weights must share one support")
        if not 1 <= self.dim <= min(self.n_rows, self.n_cols):
            raise DimensionMismatchError(
                f"dim must lie in [1, {min(self.n_rows, self.n_cols)}], got {self.dim}"
            )
        if self.ridge < 0:
            raise ValueError("ridge must be non-negative")
        for key, x in self.targets.items():
            if not math.isfinite(x):
                raise MarkerContaminationError(f"non-finite target at {key}")
            w = self.weights[key]
            if not (math.isfinite(w) and w >= 0.0):
                raise ValueError(f"weight at {key} must be finite and >= 0, got {w}")

    def is_uniform_dense(self) -> bool:
        if len(self.targets) != self.n_rows * self.n_cols:
            return False
        values = iter(self.weights.values())
        first = next(values, None)
        return first is not None and all(v == first for v in values)


@dataclass
class AlsResult:
    pair: EmbeddingPair
    objective_history: list[float] = field(default_factory=list)
    residual_history: list[float] = field(default_factory=list)
    converged: bool = False


def _objective(problem, W, C, keys, t_vals, w_vals) -> tuple[float, float]:
    scores = np.einsum("ij,ij->i", W[keys[:, 0]], C[keys[:, 1]])
    residual = 0.5 * float(np.sum(w_vals * (scores - t_vals) ** 2))
    total = residual + problem.ridge * (float(np.sum(W * W)) + float(np.sum(C * C)))
    return total, residual


def weighted_factorize(problem: WeightedFactorizationProblem, seed: int = 0) -> AlsResult:
    """Alternate exact per-row ridge solves until the objective stalls.

    Each half-sweep minimizes the full objective over one factor exactly, so
    the objective can never increase; an increase beyond 1e-9 is reported as
    divergence.  Stops after `epochs` sweeps or when one sweep improves the
    objective by less than `tol` relative.
    """
    rng = np.random.default_rng(seed)
    d = problem.dim
    W = 0.1 * rng.standard_normal((problem.n_rows, d))
    C = 0.1 * rng.standard_normal((problem.n_cols, d))

    keys = np.array(sorted(problem.targets), dtype=np.int64).reshape(-1, 2)
    t_vals = np.array([problem.targets[(i, j)] for i, j in keys])
    w_vals = np.array([problem.weights[(i, j)] for i, j in keys])

    by_row: list[list[int]] = [[] for _ in range(problem.n_rows)]
    by_col: list[list[int]] = [[] for _ in range(problem.n_cols)]
    for pos, (i, j) in enumerate(keys):
        by_row[i].append(pos)
        by_col[j].append(pos)

    uniform = problem.is_uniform_dense()
    if uniform:
        alpha_u = next(iter(problem.weights.values()))
        T = np.zeros((problem.n_rows, problem.n_cols))
        for (i, j), x in problem.targets.items():
            T[i, j] = x

    eye = np.eye(d)

    def solve_side(F_fixed, index_lists, own_axis) -> np.ndarray:
        out = np.zeros((len(index_lists), d))
        for r, positions in enumerate(index_lists):
            if not positions:
                continue
            pos = np.array(positions)
            other = keys[pos, 1 - own_axis]
            Fo = F_fixed[other]
            a = w_vals[pos]
            A = (Fo * a[:, None]).T @ Fo + 2.0 * problem.ridge * eye
            b = Fo.T @ (a * t_vals[pos])
            out[r] = np.linalg.solve(A, b)
        return out

    result = AlsResult(pair=EmbeddingPair(W=W, C=C))
    prev_total, prev_res = _objective(problem, W, C, keys, t_vals, w_vals)
    last_sweep_total = prev_total

    for _ in range(problem.epochs):
        if uniform:
            A = alpha_u * (C.T @ C) + 2.0 * problem.ridge * eye
            W = np.linalg.solve(A, alpha_u * C.T @ T.T).T
        else:
            W = solve_side(C, by_row, own_axis=0)
        total, res = _objective(problem, W, C, keys, t_vals, w_vals)
        if total > prev_total + 1e-9:
            raise DivergenceError(
                f"objective rose from {prev_total!r} to {total!r} after a row sweep"
            )
        result.objective_history.append(total)
        result.residual_history.append(res)
        prev_total = total

        if uniform:
            A = alpha_u * (W.T @ W) + 2.0 * problem.ridge * eye
            C = np.linalg.solve(A, alpha_u * W.T @ T).T
        else:
            C = solve_side(W, by_col, own_axis=1)
        total, res = _objective(problem, W, C, keys, t_vals, w_vals)
        if total > prev_total + 1e-9:
            raise DivergenceError(
                f"objective rose from {prev_total!r} to {total!r} after a column sweep"
            )
        result.objective_history.append(total)
        result.residual_history.append(res)
        prev_total = total

        if last_sweep_total - total < problem.tol * max(1.0, abs(last_sweep_total)):
            result.converged = True
            break
        last_sweep_total = total

    result.pair = EmbeddingPair(W=W, C=C)
    return result
