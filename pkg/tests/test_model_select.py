import numpy as np
import pytest

from mladlasso.lad_solver import SolverOptions, solve_lad
from mladlasso.lasso import default_lambda_grid, lambda_max
from mladlasso.model_select import cv_score, make_folds, select_lambda


def _signal_problem(rng, n=60, q=4, p=2):
    X = np.column_stack([np.ones(n), rng.standard_normal((n, q - 1))])
    B = np.zeros((q, p))
    B[1] = (2.0, -1.5)
    Y = X @ B + 0.3 * rng.standard_normal((n, p))
    return Y, X


class TestMakeFolds:
    def test_partitions_all_rows(self):
        folds = make_folds(17, 5, seed=0)
        assert len(folds) == 5
        assert sorted(np.concatenate(folds).tolist()) == list(range(17))
        sizes = sorted(len(f) for f in folds)
        assert sizes == [3, 3, 3, 4, 4]

    def test_deterministic_in_seed(self):
        a = make_folds(30, 4, seed=9)
        b = make_folds(30, 4, seed=9)
        for fa, fb in zip(a, b):
            np.testing.assert_array_equal(fa, fb)
        c = make_folds(30, 4, seed=10)
        assert any(
            not np.array_equal(fa, fc) for fa, fc in zip(a, c)
        )

    def test_fold_count_bounds(self):
        with pytest.raises(ValueError, match="2 <= k"):
            make_folds(10, 1, seed=0)
        with pytest.raises(ValueError, match="2 <= k"):
            make_folds(10, 11, seed=0)


class TestCvScore:
    def test_noiseless_score_is_tiny(self):
        rng = np.random.default_rng(0)
        X = np.column_stack([np.ones(40), rng.standard_normal((40, 2))])
        B = np.array([[1.0, 0.0], [2.0, -1.0], [0.5, 0.5]])
        Y = X @ B
        folds = make_folds(40, 5, seed=1)
        score = cv_score(Y, X, 0.0, np.ones(2), folds)
        assert score < 1e-5

    def test_huge_lambda_matches_null_model(self):
        rng = np.random.default_rng(1)
        Y, X = _signal_problem(rng)
        folds = make_folds(Y.shape[0], 5, seed=2)
        score = cv_score(Y, X, 1e6, np.ones(X.shape[1] - 1), folds)
        # null model: intercept-only fit on each training split
        expected = 0.0
        all_rows = np.arange(Y.shape[0])
        for heldout in folds:
            train = np.setdiff1d(all_rows, heldout)
            med, _ = solve_lad(Y[train], np.ones((train.size, 1)))
            R = Y[heldout] - med[0]
            expected += np.mean(np.sqrt((R * R).sum(axis=1)))
        expected /= len(folds)
        assert score == pytest.approx(expected, abs=1e-3)

    def test_signal_beats_near_max_penalty(self):
        rng = np.random.default_rng(2)
        Y, X = _signal_problem(rng)
        folds = make_folds(Y.shape[0], 5, seed=3)
        w = np.ones(X.shape[1] - 1)
        lmax = lambda_max(Y, X)
        assert cv_score(Y, X, lmax * 1e-3, w, folds) < cv_score(
            Y, X, lmax, w, folds
        )


class TestSelectLambda:
    def test_single_value_grid(self):
        rng = np.random.default_rng(3)
        Y, X = _signal_problem(rng, n=30)
        folds = make_folds(30, 3, seed=4)
        res = select_lambda(Y, X, [0.2], np.ones(X.shape[1] - 1), folds)
        assert res.selected_lambda == 0.2
        assert res.selected_index == 0
        assert res.mean_scores.shape == (1,)

    def test_exact_tie_breaks_to_smaller_lambda(self, monkeypatch):
        import mladlasso.model_select as ms

        monkeypatch.setattr(
            ms, "_fold_score_matrix",
            lambda *a, **k: np.array([[0.7, 0.3, 0.3], [0.3, 0.7, 0.7]]),
        )
        Y = np.zeros((10, 1))
        X = np.column_stack([np.ones(10), np.arange(10.0)])
        folds = make_folds(10, 2, seed=5)
        res = ms.select_lambda(Y, X, [0.01, 0.1, 1.0], np.ones(1), folds)
        assert res.selected_index == 0
        assert res.selected_lambda == 0.01

    def test_picks_interior_lambda_for_signal(self):
        rng = np.random.default_rng(5)
        Y, X = _signal_problem(rng)
        folds = make_folds(Y.shape[0], 5, seed=6)
        grid = default_lambda_grid(Y, X)
        res = select_lambda(Y, X, grid, np.ones(X.shape[1] - 1), folds)
        assert res.selected_lambda < grid[-1]
        assert res.fold_scores.shape == (5, 30)
        assert res.mean_scores[res.selected_index] == res.mean_scores.min()

    def test_row_permutation_with_mapped_folds_is_invariant(self):
        rng = np.random.default_rng(6)
        Y, X = _signal_problem(rng, n=45)
        folds = make_folds(45, 5, seed=7)
        grid = [0.01, 0.05, 0.2]
        w = np.ones(X.shape[1] - 1)
        res = select_lambda(Y, X, grid, w, folds)

        perm = rng.permutation(45)
        inv = np.argsort(perm)
        mapped = [np.sort(inv[f]) for f in folds]
        res_p = select_lambda(Y[perm], X[perm], grid, w, mapped)
        np.testing.assert_allclose(res_p.mean_scores, res.mean_scores, atol=1e-9)
        assert res_p.selected_lambda == res.selected_lambda

    def test_scores_come_from_heldout_rows_only(self):
        # corrupt exactly one fold's responses; only that fold's row of the
        # score matrix should blow up, and the training fits should not see it
        rng = np.random.default_rng(7)
        X = np.column_stack([np.ones(20), rng.standard_normal((20, 1))])
        B = np.array([[0.5, -0.5], [1.0, 2.0]])
        Y = X @ B  # noiseless: held-out loss is ~0 everywhere
        folds = make_folds(20, 4, seed=8)
        bad = folds[2]
        Y_bad = Y.copy()
        Y_bad[bad] += 1e3
        res = select_lambda(Y_bad, X, [1e-6], np.ones(1), folds)
        clean = [f for f in range(4) if f != 2]
        assert np.all(res.fold_scores[clean, 0] < 1.0)
        assert res.fold_scores[2, 0] > 100.0

    def test_rejects_degenerate_training_split(self):
        Y = np.zeros((4, 1))
        X = np.column_stack([np.ones(4), np.arange(4.0)])
        folds = [np.array([0, 1, 2]), np.array([3])]
        with pytest.raises(ValueError, match="training rows"):
            select_lambda(Y, X, [0.1], np.ones(1), folds)

    def test_rejects_empty_grid(self):
        Y = np.zeros((6, 1))
        X = np.column_stack([np.ones(6), np.arange(6.0)])
        folds = make_folds(6, 2, seed=0)
        with pytest.raises(ValueError, match="nonempty"):
            select_lambda(Y, X, [], np.ones(1), folds)
