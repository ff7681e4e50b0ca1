import math

import numpy as np
import pytest

from coocvec import (
    DimensionMismatchError,
    MarkerContaminationError,
    SparseMatrix,
    WeightedFactorizationProblem,
    build_matrix,
    consistency_report,
    solve_pair,
    truncated_svd,
    weighted_factorize,
    word_vectors,
)
from helpers import random_stats


def dense_matrix(values) -> np.ndarray:
    return np.asarray(values, dtype=float)


class TestTruncatedSvd:
    def test_identity(self):
        svd = truncated_svd(np.eye(2), dim=2)
        assert np.allclose(svd.sigma, [1.0, 1.0])
        assert np.allclose(svd.U @ np.diag(svd.sigma) @ svd.V.T, np.eye(2))

    def test_diagonal_dominant_axis(self):
        svd = truncated_svd(np.diag([3.0, 1.0]), dim=1)
        assert svd.sigma.shape == (1,)
        assert svd.sigma[0] == pytest.approx(3.0)
        approx = svd.U @ np.diag(svd.sigma) @ svd.V.T
        assert np.allclose(approx, np.diag([3.0, 0.0]), atol=1e-10)

    def test_matches_dense_svd_residual_on_sparse_matrix(self, rng):
        A = np.zeros((50, 50))
        for _ in range(300):
            A[rng.integers(0, 50), rng.integers(0, 50)] = rng.normal()
        svd = truncated_svd(A, dim=10, seed=0)
        got = np.linalg.norm(A - svd.U @ np.diag(svd.sigma) @ svd.V.T)
        s = np.linalg.svd(A, compute_uv=False)
        best = math.sqrt(float(np.sum(s[10:] ** 2)))
        assert got >= best - 1e-12
        assert got <= best * 1.01
        assert np.allclose(svd.sigma, s[:10], rtol=1e-3)

    def test_orthonormal_factors(self, rng):
        A = rng.normal(size=(30, 20))
        svd = truncated_svd(A, dim=6, seed=1)
        assert np.allclose(svd.U.T @ svd.U, np.eye(6), atol=1e-8)
        assert np.allclose(svd.V.T @ svd.V, np.eye(6), atol=1e-8)
        assert all(a >= b for a, b in zip(svd.sigma, svd.sigma[1:]))
        assert (svd.sigma >= 0).all()

    def test_deterministic_under_seed(self, rng):
        A = rng.normal(size=(15, 15))
        a = truncated_svd(A, dim=4, seed=9)
        b = truncated_svd(A, dim=4, seed=9)
        assert np.array_equal(a.U, b.U)
        assert np.array_equal(a.sigma, b.sigma)

    def test_refuses_undefined_absences(self):
        mat = SparseMatrix(rows=3, cols=3, entries={(0, 1): 1.0}, implicit_value=None)
        with pytest.raises(MarkerContaminationError):
            truncated_svd(mat, dim=1)

    def test_accepts_sparse_with_exact_zero_absences(self):
        mat = SparseMatrix(rows=3, cols=3, entries={(0, 1): 2.0}, implicit_value=0.0)
        svd = truncated_svd(mat, dim=1)
        assert svd.sigma[0] == pytest.approx(2.0)

    def test_dim_bounds(self):
        with pytest.raises(DimensionMismatchError):
            truncated_svd(np.eye(3), dim=4)
        with pytest.raises(DimensionMismatchError):
            truncated_svd(np.eye(3), dim=0)

    def test_rank_deficiency_gives_zero_singular_values(self):
        A = np.outer([1.0, 2.0, 3.0], [1.0, 0.0, 1.0])
        svd = truncated_svd(A, dim=3)
        assert svd.sigma[0] > 1.0
        assert np.allclose(svd.sigma[1:], 0.0, atol=1e-10)


class TestWordVectors:
    def test_flavors_scale_columns(self):
        U = np.eye(2)
        svd_like = truncated_svd(np.diag([4.0, 1.0]), dim=2)
        plain = word_vectors(svd_like, "plain")
        symm = word_vectors(svd_like, "symmetric")
        assert np.allclose(np.abs(plain.vectors), np.diag([4.0, 1.0]))
        assert np.allclose(np.abs(symm.vectors), np.diag([2.0, 1.0]))
        assert np.allclose(np.abs(U), np.eye(2))

    def test_identity_spectrum_makes_flavors_agree(self):
        svd = truncated_svd(np.eye(3), dim=3)
        a = word_vectors(svd, "plain").vectors
        b = word_vectors(svd, "symmetric").vectors
        assert np.allclose(a, b)

    def test_labels_default_to_row_ids(self):
        svd = truncated_svd(np.eye(2), dim=2)
        emb = word_vectors(svd, "plain")
        assert emb.words == ["0", "1"]
        named = word_vectors(svd, "plain", words=["x", "y"])
        assert named.words == ["x", "y"]
        with pytest.raises(DimensionMismatchError):
            word_vectors(svd, "plain", words=["only-one"])

    def test_unknown_flavor_rejected(self):
        svd = truncated_svd(np.eye(2), dim=2)
        with pytest.raises(ValueError):
            word_vectors(svd, "fancy")

    def test_full_rank_plain_preserves_gram(self, rng):
        A = rng.normal(size=(12, 12))
        svd = truncated_svd(A, dim=12, power_iters=8)
        W = word_vectors(svd, "plain").vectors
        assert np.abs(W @ W.T - A @ A.T).max() <= 1e-6


class TestConsistencyReport:
    def test_identity_is_consistent_both_ways(self):
        assert consistency_report(np.eye(4), "plain") == pytest.approx(0.0, abs=1e-10)
        assert consistency_report(np.eye(4), "symmetric") == pytest.approx(0.0, abs=1e-10)

    def test_plain_flavor_gap_is_rounding_level(self, rng):
        A = rng.normal(size=(20, 20))
        assert consistency_report(A, "plain") <= 1e-6

    def test_symmetric_flavor_gap_on_diag_4_1(self):
        gap = consistency_report(np.diag([4.0, 1.0]), "symmetric")
        assert gap == pytest.approx(12.0, rel=1e-9)

    def test_desk_scale_guard(self):
        with pytest.raises(DimensionMismatchError):
            consistency_report(np.zeros((501, 501)), "plain")


class TestWeightedProblemValidation:
    def test_support_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            WeightedFactorizationProblem(
                n_rows=2, n_cols=2, targets={(0, 0): 1.0}, weights={(0, 1): 1.0}, dim=1
            )

    def test_non_finite_target(self):
        with pytest.raises(MarkerContaminationError):
            WeightedFactorizationProblem(
                n_rows=2,
                n_cols=2,
                targets={(0, 0): -math.inf},
                weights={(0, 0): 1.0},
                dim=1,
            )

    def test_negative_weight(self):
        with pytest.raises(ValueError):
            WeightedFactorizationProblem(
                n_rows=2, n_cols=2, targets={(0, 0): 1.0}, weights={(0, 0): -1.0}, dim=1
            )

    def test_dim_bound(self):
        with pytest.raises(DimensionMismatchError):
            WeightedFactorizationProblem(
                n_rows=2, n_cols=3, targets={(0, 0): 1.0}, weights={(0, 0): 1.0}, dim=3
            )

    def test_uniform_dense_detection(self):
        dense = {(i, j): 1.0 for i in range(2) for j in range(2)}
        p = WeightedFactorizationProblem(
            n_rows=2, n_cols=2, targets=dict(dense), weights=dict(dense), dim=1
        )
        assert p.is_uniform_dense()
        varied = dict(dense)
        varied[(1, 1)] = 2.0
        q = WeightedFactorizationProblem(
            n_rows=2, n_cols=2, targets=dict(dense), weights=varied, dim=1
        )
        assert not q.is_uniform_dense()


class TestWeightedFactorize:
    def test_single_pair_reaches_zero_objective(self):
        problem = WeightedFactorizationProblem(
            n_rows=1, n_cols=1, targets={(0, 0): 2.0}, weights={(0, 0): 5.0}, dim=1,
            ridge=0.0,
        )
        result = weighted_factorize(problem, seed=0)
        assert result.objective_history[-1] == pytest.approx(0.0, abs=1e-12)
        assert float(result.pair.W[0, 0] * result.pair.C[0, 0]) == pytest.approx(2.0)

    def test_objective_monotone_over_half_sweeps(self, rng):
        n = 8
        targets = {}
        weights = {}
        for i in range(n):
            for j in range(n):
                if rng.random() < 0.6:
                    targets[(i, j)] = float(rng.normal())
                    weights[(i, j)] = float(rng.uniform(0.1, 3.0))
        problem = WeightedFactorizationProblem(
            n_rows=n, n_cols=n, targets=targets, weights=weights, dim=3, epochs=40
        )
        result = weighted_factorize(problem, seed=2)
        hist = result.objective_history
        assert all(a + 1e-9 >= b for a, b in zip(hist, hist[1:]))

    def test_full_dimension_interpolates(self, rng):
        n = 12
        targets = {}
        weights = {}
        for i in range(n):
            for j in range(n):
                targets[(i, j)] = float(rng.normal())
                weights[(i, j)] = float(rng.uniform(0.5, 2.0))
        problem = WeightedFactorizationProblem(
            n_rows=n, n_cols=n, targets=targets, weights=weights, dim=n,
            epochs=300, ridge=1e-9, tol=1e-14,
        )
        result = weighted_factorize(problem, seed=1)
        assert result.residual_history[-1] < 1e-8

    def test_unweighted_dense_matches_svd_truncation(self, rng):
        n, d = 12, 4
        A = rng.normal(size=(n, n))
        targets = {(i, j): float(A[i, j]) for i in range(n) for j in range(n)}
        weights = {key: 1.0 for key in targets}
        problem = WeightedFactorizationProblem(
            n_rows=n, n_cols=n, targets=targets, weights=weights, dim=d,
            epochs=3000, ridge=1e-12, tol=0.0,
        )
        result = weighted_factorize(problem, seed=3)
        s = np.linalg.svd(A, compute_uv=False)
        best = 0.5 * float(np.sum(s[d:] ** 2))
        assert result.residual_history[-1] <= best + 1e-6

    def test_uniform_fast_path_agrees_with_generic_path(self, rng, monkeypatch):
        n, d = 6, 2
        A = rng.normal(size=(n, n))
        targets = {(i, j): float(A[i, j]) for i in range(n) for j in range(n)}
        weights = {key: 1.7 for key in targets}
        make = lambda: WeightedFactorizationProblem(
            n_rows=n, n_cols=n, targets=dict(targets), weights=dict(weights), dim=d,
            epochs=50, tol=1e-14,
        )
        fast = weighted_factorize(make(), seed=4)
        slow_problem = make()
        monkeypatch.setattr(
            WeightedFactorizationProblem, "is_uniform_dense", lambda self: False
        )
        slow = weighted_factorize(slow_problem, seed=4)
        assert fast.objective_history[-1] == pytest.approx(
            slow.objective_history[-1], rel=1e-9
        )
        assert np.allclose(fast.pair.W, slow.pair.W, atol=1e-8)

    def test_row_without_support_stays_zero(self):
        problem = WeightedFactorizationProblem(
            n_rows=3, n_cols=2, targets={(0, 0): 1.0, (2, 1): 2.0},
            weights={(0, 0): 1.0, (2, 1): 1.0}, dim=1, epochs=10,
        )
        result = weighted_factorize(problem, seed=0)
        assert np.allclose(result.pair.W[1], 0.0)

    def test_convergence_flag_set_when_stalled(self, rng):
        targets = {(0, 0): 1.0, (1, 1): 2.0}
        weights = {(0, 0): 1.0, (1, 1): 1.0}
        problem = WeightedFactorizationProblem(
            n_rows=2, n_cols=2, targets=targets, weights=weights, dim=2, epochs=500
        )
        result = weighted_factorize(problem, seed=0)
        assert result.converged


class TestDiscardingSupportHook:
    def test_sppmi_support_is_the_positive_condition_set(self, rng):
        for seed in range(5):
            stats = random_stats(np.random.default_rng(seed), n_words=6, density=0.5)
            k = 1.5
            sppmi = build_matrix(stats, "sppmi", k=k)
            expected = set()
            for (w, c) in stats.pairs:
                sol = solve_pair(
                    "logistic",
                    stats.count(w, c),
                    float(stats.row_marginal[w]),
                    float(stats.col_marginal[c]),
                    stats.total,
                    k,
                )
                if sol.pos_condition:
                    expected.add((w, c))
            assert set(sppmi.entries) == expected
