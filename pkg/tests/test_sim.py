import numpy as np
import pytest

from mladlasso.lasso import AdaptiveFitOptions
from mladlasso.sim import (
    CONTAMINATED_ROWS,
    CONTAMINATION_FACTOR,
    DEFAULT_QTL_EFFECTS,
    GenotypeScenario,
    ZerosScenario,
    bias_matrix,
    contaminate,
    gen_genotype_study,
    gen_zeros_study,
    pct_correct_zeros,
    run_study,
    sample_asymmetric_laplace,
    zeros_scenarios,
)


class TestGenotypeStudy:
    def test_shapes_and_intercept(self):
        Y, X, B_true = gen_genotype_study()
        assert Y.shape == (300, 3)
        assert X.shape == (300, 201)
        assert B_true.shape == (201, 3)
        assert np.all(X[:, 0] == 1.0)

    def test_genotype_frequencies(self):
        _, X, _ = gen_genotype_study(GenotypeScenario(n=2000, rng_seed=0))
        G = X[:, 1:]
        assert set(np.unique(G)) == {-1.0, 0.0, 1.0}
        freq = [(G == v).mean() for v in (-1.0, 0.0, 1.0)]
        np.testing.assert_allclose(freq, [0.25, 0.5, 0.25], atol=0.01)

    def test_true_effects_placed_on_marker_rows(self):
        _, _, B_true = gen_genotype_study()
        np.testing.assert_array_equal(B_true[75], (0.0, 50.0, 100.0))
        np.testing.assert_array_equal(B_true[50], (100.0, 100.0, 100.0))
        assert np.all(B_true[0] == 0.0)
        active = {m for m in range(201) if np.any(B_true[m] != 0.0)}
        assert active == set(DEFAULT_QTL_EFFECTS)

    def test_zero_covariance_is_noiseless(self):
        s = GenotypeScenario(n=50, markers=10,
                             true_effects={3: (1.0, 2.0, 3.0)},
                             error_covariance=np.zeros((3, 3)))
        Y, X, B_true = gen_genotype_study(s)
        np.testing.assert_array_equal(Y, X @ B_true)

    def test_non_spd_covariance_rejected(self):
        s = GenotypeScenario(error_covariance=-np.eye(3))
        with pytest.raises(ValueError, match="positive definite"):
            gen_genotype_study(s)

    def test_deterministic_in_seed(self):
        Y1, X1, _ = gen_genotype_study(GenotypeScenario(rng_seed=5))
        Y2, X2, _ = gen_genotype_study(GenotypeScenario(rng_seed=5))
        np.testing.assert_array_equal(Y1, Y2)
        np.testing.assert_array_equal(X1, X2)


class TestZerosStudy:
    def test_shapes(self):
        Y, X, B_true = gen_zeros_study()
        assert Y.shape == (100, 2)
        assert X.shape == (100, 11)
        assert B_true.shape == (11, 2)
        assert np.all(X[:, 0] == 1.0)

    def test_zero_fraction_and_value_distribution(self):
        s = ZerosScenario(n=2000, q=20, p_zeros=0.3, rng_seed=1)
        _, X, _ = gen_zeros_study(s)
        C = X[:, 1:]
        assert (C == 0.0).mean() == pytest.approx(0.3, abs=0.01)
        nonzero = C[C != 0.0]
        assert nonzero.mean() == pytest.approx(3.0, abs=0.05)

    def test_three_active_rows(self):
        _, _, B_true = gen_zeros_study(ZerosScenario(q=50, n=25))
        active = np.flatnonzero(np.any(B_true != 0.0, axis=1))
        np.testing.assert_array_equal(active, [1, 2, 3])

    def test_uniform_errors_in_unit_interval(self):
        s = ZerosScenario(rng_seed=2)
        Y, X, B_true = gen_zeros_study(s)
        E = Y - X @ B_true
        assert np.all((E >= 0.0) & (E < 1.0))

    def test_mask_stream_independent_of_values(self):
        # raising p_zeros only zeroes more entries; surviving values agree
        a = gen_zeros_study(ZerosScenario(p_zeros=0.1, rng_seed=3))[1][:, 1:]
        b = gen_zeros_study(ZerosScenario(p_zeros=0.3, rng_seed=3))[1][:, 1:]
        both = (a != 0.0) & (b != 0.0)
        np.testing.assert_array_equal(a[both], b[both])
        assert (b == 0.0).sum() > (a == 0.0).sum()

    def test_invalid_scenarios_rejected(self):
        with pytest.raises(ValueError, match="p_zeros"):
            ZerosScenario(p_zeros=1.5)
        with pytest.raises(ValueError, match="error kind"):
            ZerosScenario(error_kind="gaussian")


class TestAsymmetricLaplace:
    def test_mean_matches_location(self):
        mu = np.array([3.0, 6.0])
        draws = sample_asymmetric_laplace(mu, np.diag([0.5, 0.5]), 200000, seed=0)
        np.testing.assert_allclose(draws.mean(axis=0), mu, atol=0.05)

    def test_right_skew(self):
        draws = sample_asymmetric_laplace([3.0], np.array([[0.5]]), 100000, seed=1)
        x = draws[:, 0]
        skew = np.mean(((x - x.mean()) / x.std()) ** 3)
        assert skew > 1.0

    def test_deterministic_and_generator_input(self):
        a = sample_asymmetric_laplace([1.0], np.eye(1), 10, seed=4)
        b = sample_asymmetric_laplace([1.0], np.eye(1), 10, seed=4)
        c = sample_asymmetric_laplace([1.0], np.eye(1), 10, np.random.default_rng(4))
        np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(a, c)

    def test_non_spd_rejected(self):
        with pytest.raises(ValueError, match="positive definite"):
            sample_asymmetric_laplace([0.0], np.zeros((1, 1)), 5, seed=0)


class TestContaminate:
    def test_scales_named_rows_one_based(self):
        Y = np.arange(12.0).reshape(6, 2)
        out = contaminate(Y, (1, 4), 100.0)
        np.testing.assert_array_equal(out[0], Y[0] * 100.0)
        np.testing.assert_array_equal(out[3], Y[3] * 100.0)
        np.testing.assert_array_equal(out[[1, 2, 4, 5]], Y[[1, 2, 4, 5]])
        np.testing.assert_array_equal(Y, np.arange(12.0).reshape(6, 2))  # no mutation

    def test_default_study_rows_fit_n300(self):
        Y = np.ones((300, 3))
        out = contaminate(Y, CONTAMINATED_ROWS, CONTAMINATION_FACTOR)
        assert out[9, 0] == 100.0 and out[291, 0] == 100.0

    def test_out_of_range_row(self):
        with pytest.raises(ValueError, match="outside"):
            contaminate(np.ones((5, 1)), (6,), 2.0)


class TestBiasMatrix:
    def test_single_row(self):
        B_hat = np.array([[0.0, 0.0], [1.0, 2.0]])
        B_true = np.array([[0.0, 0.0], [2.0, 2.0]])
        np.testing.assert_array_equal(bias_matrix(B_hat, B_true, [2]), [[-1.0, 0.0]])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape mismatch"):
            bias_matrix(np.zeros((2, 1)), np.zeros((3, 1)), [1])


class TestPctCorrectZeros:
    def test_all_recovered(self):
        B = np.zeros((5, 2))
        assert pct_correct_zeros(B, B, 1e-6) == 100.0

    def test_none_recovered(self):
        B_true = np.zeros((4, 2))
        B_hat = np.ones((4, 2))
        assert pct_correct_zeros(B_hat, B_true, 1e-6) == 0.0

    def test_partial_recovery(self):
        # 7 true-zero penalized rows, 6 recovered -> 85.71...
        B_true = np.zeros((8, 1))
        B_hat = np.zeros((8, 1))
        B_hat[3, 0] = 0.5
        assert pct_correct_zeros(B_hat, B_true, 1e-3) == pytest.approx(600 / 7)

    def test_vacuous_warns(self):
        B_true = np.ones((3, 1))
        with pytest.warns(UserWarning, match="vacuously"):
            assert pct_correct_zeros(np.zeros((3, 1)), B_true, 1e-3) == 100.0

    def test_monotone_in_tau(self):
        rng = np.random.default_rng(0)
        B_true = np.zeros((10, 2))
        B_hat = 0.01 * rng.standard_normal((10, 2))
        taus = [1e-4, 1e-3, 1e-2, 1e-1]
        vals = [pct_correct_zeros(B_hat, B_true, t) for t in taus]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_rejects_nonpositive_tau(self):
        with pytest.raises(ValueError, match="positive"):
            pct_correct_zeros(np.zeros((2, 1)), np.zeros((2, 1)), 0.0)


class TestRunStudy:
    def test_scenario_grid_has_sixteen_entries(self):
        scens = zeros_scenarios()
        assert len(scens) == 16
        assert {(s.n, s.q) for s in scens} == {(100, 10), (25, 50)}
        assert {s.p_zeros for s in scens} == {0.1, 0.2, 0.3, 0.4}
        assert {s.error_kind for s in scens} == {"uniform", "asymmetric_laplace"}

    def test_rejects_unknown_study(self):
        with pytest.raises(ValueError, match="unknown study"):
            run_study("phenotype")

    def test_zeros_study_structure_and_determinism(self):
        scen = [ZerosScenario(n=40, q=5, p_zeros=0.2)]
        kwargs = dict(replicates=2, seed=3, scenarios=scen,
                      fit_options=AdaptiveFitOptions(folds=3, max_outer_iterations=3))
        res1 = run_study("zeros", **kwargs)
        res2 = run_study("zeros", **kwargs)
        # 1 scenario x 2 replicates x 2 methods
        assert len(res1.rows) == 4
        assert {r["method"] for r in res1.rows} == {"non_adaptive", "adaptive"}
        assert all(r["metric_name"] == "pct_correct_zeros" for r in res1.rows)
        assert res1.rows == res2.rows
        assert len(res1.aggregates) == 2
        agg = res1.aggregates[0]
        assert {"mean", "q25", "median", "q75"} <= set(agg)

    def test_genotype_study_structure(self):
        res = run_study(
            "genotype", replicates=1, seed=11,
            fit_options=AdaptiveFitOptions(folds=3, max_outer_iterations=2),
        )
        # 4 markers x 3 outcomes x 2 methods
        assert len(res.rows) == 24
        assert res.scenario_ids == ["genotype"]
        markers = {r["marker"] for r in res.marker_profiles}
        assert markers == set(range(1, 201))
        assert len(res.marker_profiles) == 400
        assert len(res.aggregates) == 2
        for agg in res.aggregates:
            assert agg["metric_name"] == "bias"
            assert "mean_abs" in agg
