import math
import random

import numpy as np
import pytest
import scipy.cluster.hierarchy
import scipy.stats

from diachron.errors import InfiniteEffectError, OracleScopeError
from diachron.oracles import (
    jacobi_eigh,
    ref_anova,
    ref_cohens_d,
    ref_ols,
    ref_spearman,
    t_cdf_quad,
    f_sf_quad,
)
from diachron.patterns import FeatureMatrix, MatrixMethod
from diachron.stats import (
    EffectBand,
    TrendClass,
    anova_oneway,
    classify_trends,
    cluster,
    cohens_d,
    effect_band,
    f_sf,
    ols_trend,
    pca,
    regularized_incomplete_beta,
    spearman,
    t_two_sided_p,
)


def matrix_from(freq, texts=None):
    freq = np.asarray(freq, dtype=np.float64)
    return FeatureMatrix(
        method=MatrixMethod.REGEX,
        texts=texts or [f"t{j}" for j in range(freq.shape[1])],
        features=[f"f{i}" for i in range(freq.shape[0])],
        freq=freq,
        detected=freq > 0,
    )


class TestIncompleteBeta:
    def test_bounds(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0

    def test_symmetry_identity(self):
        # I_x(a,b) = 1 - I_{1-x}(b,a)
        rng = random.Random(5)
        for _ in range(200):
            a = rng.uniform(0.5, 20)
            b = rng.uniform(0.5, 20)
            x = rng.uniform(0.001, 0.999)
            lhs = regularized_incomplete_beta(a, b, x)
            rhs = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x)
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_against_scipy_betainc(self):
        from scipy.special import betainc

        rng = random.Random(6)
        for _ in range(300):
            a = rng.uniform(0.5, 30)
            b = rng.uniform(0.5, 30)
            x = rng.uniform(0, 1)
            assert regularized_incomplete_beta(a, b, x) == pytest.approx(
                float(betainc(a, b, x)), abs=1e-12
            )


class TestDistributionTails:
    def test_t_symmetry_at_zero(self):
        assert t_cdf_quad(0.0, 7) == 0.5
        assert t_two_sided_p(0.0, 7) == 1.0

    def test_t_p_matches_quadrature(self):
        rng = random.Random(7)
        for _ in range(100):
            t = rng.uniform(-6, 6)
            df = rng.randint(1, 40)
            want = 2.0 * (1.0 - t_cdf_quad(abs(t), df))
            assert t_two_sided_p(t, df) == pytest.approx(want, abs=1e-9)

    def test_t_p_matches_scipy(self):
        rng = random.Random(8)
        for _ in range(100):
            t = rng.uniform(-8, 8)
            df = rng.randint(2, 60)
            want = 2.0 * scipy.stats.t.sf(abs(t), df)
            assert t_two_sided_p(t, df) == pytest.approx(want, rel=1e-10, abs=1e-13)

    def test_f_tail_matches_quadrature_and_scipy(self):
        rng = random.Random(9)
        for _ in range(60):
            f = rng.uniform(0.01, 12)
            d1 = rng.randint(1, 10)
            d2 = rng.randint(2, 40)
            assert f_sf(f, d1, d2) == pytest.approx(f_sf_quad(f, d1, d2), abs=1e-9)
            assert f_sf(f, d1, d2) == pytest.approx(
                float(scipy.stats.f.sf(f, d1, d2)), rel=1e-9, abs=1e-13
            )


class TestOlsTrend:
    def test_perfect_fit(self):
        res = ols_trend([1.0, 3.0, 5.0, 7.0])
        assert res.slope == pytest.approx(2.0, abs=1e-15)
        assert res.r_squared == 1.0
        assert res.p_value == 0.0

    def test_constant_series_convention(self):
        res = ols_trend([4.2, 4.2, 4.2, 4.2])
        assert (res.slope, res.r_squared, res.p_value) == (0.0, 0.0, 1.0)

    def test_worked_small_case_vs_oracle(self):
        y = [2.0, 1.0, 4.0, 3.0, 6.0]
        res = ols_trend(y)
        ref = ref_ols(y)
        assert res.slope == pytest.approx(ref["slope"], abs=1e-9)
        assert res.r_squared == pytest.approx(ref["r_squared"], abs=1e-9)
        assert res.p_value == pytest.approx(ref["p_value"], abs=1e-6)

    def test_random_instances_vs_oracle(self):
        rng = random.Random(21)
        for _ in range(100):
            n = rng.randint(3, 30)
            y = [rng.uniform(-10, 10) for _ in range(n)]
            res = ols_trend(y)
            ref = ref_ols(y)
            assert res.slope == pytest.approx(ref["slope"], abs=1e-9)
            assert res.r_squared == pytest.approx(ref["r_squared"], abs=1e-9)
            assert res.p_value == pytest.approx(ref["p_value"], abs=1e-6)

    def test_matches_scipy_linregress(self):
        rng = random.Random(22)
        y = [rng.uniform(0, 5) for _ in range(12)]
        res = ols_trend(y)
        lr = scipy.stats.linregress(np.arange(12), y)
        assert res.slope == pytest.approx(lr.slope, abs=1e-12)
        assert res.r_squared == pytest.approx(lr.rvalue**2, abs=1e-12)
        assert res.p_value == pytest.approx(lr.pvalue, abs=1e-10)

    def test_r_squared_equals_pearson_squared(self):
        from diachron.evaluation import pearson

        rng = random.Random(23)
        for _ in range(50):
            n = rng.randint(3, 25)
            y = [rng.uniform(-3, 3) for _ in range(n)]
            if len(set(y)) == 1:
                continue
            res = ols_trend(y)
            r = pearson(list(range(n)), y)
            assert res.r_squared == pytest.approx(r * r, abs=1e-12)

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            ols_trend([1.0, 2.0])


class TestSpearman:
    def test_strictly_increasing(self):
        res = spearman([1.0, 2.0, 5.0, 9.0])
        assert res.rho == 1.0
        assert res.p_value == 0.0

    def test_strictly_decreasing(self):
        res = spearman([9.0, 5.0, 2.0, 1.0])
        assert res.rho == -1.0

    def test_constant_convention(self):
        res = spearman([3.0, 3.0, 3.0])
        assert (res.rho, res.p_value) == (0.0, 1.0)

    def test_tie_case_vs_oracle(self):
        y = [1.0, 2.0, 2.0, 3.0]
        res = spearman(y)
        ref = ref_spearman(y)
        assert res.rho == pytest.approx(ref["rho"], abs=1e-12)
        assert res.rho == pytest.approx(0.9486832980505138, abs=1e-12)

    def test_random_instances_vs_oracle(self):
        rng = random.Random(31)
        for _ in range(100):
            n = rng.randint(3, 30)
            # duplicates guaranteed sometimes: draw from a small value set
            y = [float(rng.randint(0, 6)) for _ in range(n)]
            res = spearman(y)
            ref = ref_spearman(y)
            assert res.rho == pytest.approx(ref["rho"], abs=1e-9)
            assert res.p_value == pytest.approx(ref["p_value"], abs=1e-6)

    def test_matches_scipy(self):
        rng = random.Random(32)
        for _ in range(50):
            n = rng.randint(4, 20)
            y = [float(rng.randint(0, 8)) for _ in range(n)]
            if len(set(y)) == 1:
                continue
            res = spearman(y)
            rho, p = scipy.stats.spearmanr(np.arange(n), y)
            assert res.rho == pytest.approx(float(rho), abs=1e-12)
            if abs(res.rho) < 1.0:
                assert res.p_value == pytest.approx(float(p), abs=1e-9)

    def test_monotone_transform_invariance(self):
        rng = random.Random(33)
        y = [rng.uniform(0, 4) for _ in range(15)]
        base = spearman(y).rho
        assert spearman([math.exp(v) for v in y]).rho == pytest.approx(base, abs=1e-12)
        assert spearman([v**3 + 2 for v in y]).rho == pytest.approx(base, abs=1e-12)

    def test_exact_permutation_option(self):
        y = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0]
        approx = spearman(y)
        exact = spearman(y, exact=True)
        assert exact.rho == approx.rho
        # exact p: share of permutations with |rho| at least as extreme
        assert 0.0 < exact.p_value <= 1.0
        with pytest.raises(ValueError):
            spearman(list(range(11, 23)), exact=True)


class TestCohensD:
    def test_identical_groups(self):
        assert cohens_d([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0

    def test_hand_worked_example(self):
        # means 2 and 4, pooled SD 1
        assert cohens_d([1.0, 2.0, 3.0], [3.0, 4.0, 5.0]) == pytest.approx(2.0, abs=1e-12)

    def test_orientation_positive_means_late_higher(self):
        assert cohens_d([0.0, 0.0, 0.1], [5.0, 5.1, 5.2]) > 0

    def test_antisymmetry_shift_scale(self):
        rng = random.Random(41)
        for _ in range(50):
            a = [rng.uniform(0, 5) for _ in range(rng.randint(2, 10))]
            b = [rng.uniform(0, 5) for _ in range(rng.randint(2, 10))]
            if np.var(a) + np.var(b) == 0:
                continue
            d = cohens_d(a, b)
            assert cohens_d(b, a) == pytest.approx(-d, abs=1e-12)
            assert cohens_d([v + 3 for v in a], [v + 3 for v in b]) == pytest.approx(
                d, abs=1e-12
            )
            assert cohens_d([2 * v for v in a], [2 * v for v in b]) == pytest.approx(
                d, abs=1e-9
            )

    def test_random_instances_vs_oracle(self):
        rng = random.Random(42)
        for _ in range(100):
            a = [rng.uniform(-4, 4) for _ in range(rng.randint(2, 12))]
            b = [rng.uniform(-4, 4) for _ in range(rng.randint(2, 12))]
            assert cohens_d(a, b) == pytest.approx(ref_cohens_d(a, b), abs=1e-9)

    def test_zero_spread_unequal_means_errors(self):
        with pytest.raises(InfiniteEffectError):
            cohens_d([1.0, 1.0], [2.0, 2.0])

    def test_effect_bands(self):
        assert effect_band(0.1) is EffectBand.NEGLIGIBLE
        assert effect_band(-0.3) is EffectBand.SMALL
        assert effect_band(0.653) is EffectBand.MEDIUM
        assert effect_band(-1.438) is EffectBand.LARGE
        assert effect_band(0.2) is EffectBand.SMALL
        assert effect_band(0.5) is EffectBand.MEDIUM
        assert effect_band(0.8) is EffectBand.LARGE


class TestAnova:
    def test_identical_constant_groups(self):
        res = anova_oneway([[2.0, 2.0], [2.0, 2.0, 2.0]])
        assert (res.f_statistic, res.p_value) == (0.0, 1.0)

    def test_degenerate_separated_groups(self):
        res = anova_oneway([[0.0, 0.0, 0.0], [10.0, 10.0, 10.0]])
        assert math.isinf(res.f_statistic)
        assert res.p_value == 0.0
        assert res.degenerate is True

    def test_random_instances_vs_oracle(self):
        rng = random.Random(51)
        for _ in range(60):
            k = rng.randint(2, 5)
            groups = [
                [rng.uniform(-3, 3) for _ in range(rng.randint(2, 8))] for _ in range(k)
            ]
            res = anova_oneway(groups)
            ref = ref_anova(groups)
            assert res.f_statistic == pytest.approx(ref["f"], abs=1e-9)
            assert res.p_value == pytest.approx(ref["p_value"], abs=1e-6)

    def test_matches_scipy(self):
        rng = random.Random(52)
        groups = [[rng.uniform(0, 4) for _ in range(6)] for _ in range(3)]
        res = anova_oneway(groups)
        f, p = scipy.stats.f_oneway(*groups)
        assert res.f_statistic == pytest.approx(float(f), abs=1e-10)
        assert res.p_value == pytest.approx(float(p), abs=1e-10)

    def test_needs_two_groups(self):
        with pytest.raises(ValueError):
            anova_oneway([[1.0, 2.0]])


class TestPca:
    def test_two_perfectly_correlated_features(self):
        base = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        result = pca(matrix_from([base, 2 * base + 1]))
        assert result.explained_variance_ratio[0] == pytest.approx(1.0, abs=1e-12)

    def test_identity_correlation_equal_ratios(self):
        # orthogonal standardized columns: equal eigenvalues
        z = np.array(
            [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]
        )
        result = pca(matrix_from(z.T))
        assert np.allclose(result.explained_variance_ratio, [0.5, 0.5], atol=1e-12)

    def test_eigenvalues_match_jacobi_oracle(self):
        rng = np.random.default_rng(61)
        for _ in range(20):
            n_feat = rng.integers(2, 8)
            n_text = rng.integers(3, 9)
            freq = rng.uniform(0, 20, size=(n_feat, n_text))
            m = matrix_from(freq)
            try:
                result = pca(m)
            except ValueError:
                continue
            z = (freq.T - freq.T.mean(axis=0)) / freq.T.std(axis=0, ddof=1)
            corr = (z.T @ z) / (len(m.texts) - 1)
            ref_vals, _ = jacobi_eigh(corr)
            k = len(result.eigenvalues)
            assert np.allclose(result.eigenvalues, ref_vals[:k], atol=1e-8)

    def test_loadings_orthonormal(self):
        rng = np.random.default_rng(62)
        result = pca(matrix_from(rng.uniform(0, 5, (6, 8))))
        gram = result.loadings.T @ result.loadings
        assert np.allclose(gram, np.eye(gram.shape[0]), atol=1e-8)

    def test_ratios_sorted_and_sum_to_one_at_rank(self):
        rng = np.random.default_rng(63)
        result = pca(matrix_from(rng.uniform(0, 5, (5, 12))))
        r = result.explained_variance_ratio
        assert np.all(np.diff(r) <= 1e-12)
        assert float(r.sum()) == pytest.approx(1.0, abs=1e-10)

    def test_reconstruction_from_all_components(self):
        rng = np.random.default_rng(64)
        freq = rng.uniform(0, 5, (6, 9))
        result = pca(matrix_from(freq))
        z = (freq.T - freq.T.mean(axis=0)) / freq.T.std(axis=0, ddof=1)
        recon = result.scores @ result.loadings.T
        assert np.allclose(recon, z, atol=1e-8)

    def test_zero_variance_feature_dropped_with_warning(self, caplog):
        rng = np.random.default_rng(65)
        freq = rng.uniform(0, 5, (3, 7))
        freq[1, :] = 4.0
        with caplog.at_level("WARNING"):
            result = pca(matrix_from(freq))
        assert result.dropped_features == ["f1"]
        assert "zero-variance" in caplog.text

    def test_k_beyond_rank_truncates_with_warning(self, caplog):
        rng = np.random.default_rng(66)
        freq = rng.uniform(0, 5, (6, 4))  # rank <= 3
        with caplog.at_level("WARNING"):
            result = pca(matrix_from(freq), k=6)
        assert len(result.eigenvalues) <= 3
        assert "truncating" in caplog.text

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(67)
        freq = rng.uniform(0, 5, (4, 9))
        a = pca(matrix_from(freq))
        b = pca(matrix_from(freq.copy()))
        assert np.array_equal(a.loadings, b.loadings)
        for col in range(a.loadings.shape[1]):
            pivot = np.argmax(np.abs(a.loadings[:, col]))
            assert a.loadings[pivot, col] > 0


class TestCluster:
    def test_two_texts_single_merge(self):
        tree = cluster(matrix_from([[1.0, 5.0], [2.0, 6.0]]))
        assert len(tree.merges) == 1
        assert tree.merges[0].size == 2
        assert tree.cut(1) == [0, 0]
        assert tree.cut(2) == [0, 1]

    def test_outlier_merges_last(self):
        # two tight pairs plus one outlier in feature space
        freq = np.array(
            [
                [0.0, 0.1, 10.0, 10.1, 50.0],
                [0.0, 0.1, 10.0, 10.1, 50.0],
                [1.0, 1.0, 1.0, 1.0, 1.0],
            ]
        )
        freq[2, :] = [0.0, 0.05, 5.0, 5.05, 30.0]
        tree = cluster(matrix_from(freq))
        last = tree.merges[-1]
        # the outlier (text 4) joins at the final, largest merge
        labels = tree.cut(3)
        assert labels[0] == labels[1]
        assert labels[2] == labels[3]
        assert labels[4] not in (labels[0], labels[2])
        assert last.size == 5

    def test_heights_monotone(self):
        rng = np.random.default_rng(71)
        for _ in range(10):
            freq = rng.uniform(0, 10, (5, rng.integers(3, 12)))
            tree = cluster(matrix_from(freq))
            heights = [m.height for m in tree.merges]
            assert all(b >= a - 1e-12 for a, b in zip(heights, heights[1:]))

    def test_matches_scipy_ward_heights(self):
        rng = np.random.default_rng(72)
        for _ in range(10):
            freq = rng.uniform(0, 10, (6, 9))
            z = (freq.T - freq.T.mean(axis=0)) / freq.T.std(axis=0, ddof=1)
            ours = cluster(matrix_from(freq))
            link = scipy.cluster.hierarchy.linkage(z, method="ward")
            assert np.allclose(
                sorted(m.height for m in ours.merges), sorted(link[:, 2]), atol=1e-8
            )

    def test_three_blob_recovery(self):
        rng = np.random.default_rng(73)
        centers = np.array([[0.0, 0.0, 0.0], [10.0, 10.0, 10.0], [-10.0, 5.0, -5.0]])
        rows = []
        truth = []
        for label, c in enumerate(centers):
            for _ in range(4):
                rows.append(c + rng.normal(0, 0.3, 3))
                truth.append(label)
        freq = np.array(rows).T  # features x texts
        tree = cluster(matrix_from(freq))
        labels = tree.cut(3)
        # same partition as planted labels, up to renaming
        mapping = {}
        for got, want in zip(labels, truth):
            mapping.setdefault(got, want)
            assert mapping[got] == want

    def test_deterministic_tie_break(self):
        # four identical texts: ties everywhere; lowest indices merge first
        freq = np.ones((3, 4))
        freq[0, :] = [1.0, 1.0, 1.0, 1.0]
        tree = cluster(matrix_from(freq))
        assert (tree.merges[0].left, tree.merges[0].right) == (0, 1)
        assert tree.merges[1].right == 2 or tree.merges[1].left == 2


class TestClassifyTrends:
    def _matrix_with(self, series):
        return matrix_from(np.array(series))

    def test_linear_increase_classified(self):
        rows = [np.linspace(1, 20, 12) + 0.01 * np.sin(np.arange(12))]
        trends = classify_trends(self._matrix_with(rows))
        assert trends[0].trend_class is TrendClass.INCREASING

    def test_noise_with_moderate_p_is_stable(self):
        # sawtooth: slope near zero, regression p far above 0.05
        rows = [np.array([1.0, 5.0, 1.0, 5.0, 1.0, 5.0, 1.0, 5.0])]
        trends = classify_trends(self._matrix_with(rows))
        t = trends[0]
        assert t.p_regression > 0.05
        assert t.trend_class is TrendClass.STABLE

    def test_dual_rule_requires_both_p_values(self):
        # monotone-ish but noisy enough that one test stays insignificant
        rng = np.random.default_rng(81)
        y = np.arange(8) * 0.2 + rng.normal(0, 2.0, 8)
        trends = classify_trends(self._matrix_with([y]))
        t = trends[0]
        if t.p_regression >= 0.05 or t.p_spearman >= 0.05:
            assert t.trend_class is TrendClass.STABLE

    def test_all_zero_feature_flagged_stable(self):
        rows = [np.zeros(10), np.linspace(0, 9, 10)]
        trends = classify_trends(self._matrix_with(rows))
        assert trends[0].all_zero is True
        assert trends[0].trend_class is TrendClass.STABLE
        assert trends[1].all_zero is False

    def test_class_counts_partition_features(self):
        rng = np.random.default_rng(82)
        rows = [rng.uniform(0, 5, 10) for _ in range(7)]
        trends = classify_trends(self._matrix_with(rows))
        assert len(trends) == 7
        by_class = {c: 0 for c in TrendClass}
        for t in trends:
            by_class[t.trend_class] += 1
        assert sum(by_class.values()) == 7

    def test_effect_groups_clamped_for_small_corpora(self):
        rows = [np.linspace(0, 5, 6)]
        trends = classify_trends(self._matrix_with(rows), effect_group_size=5)
        # groups clamp to 3 texts per end; d still defined
        assert math.isfinite(trends[0].cohens_d)


class TestOracleScope:
    def test_ols_scope_guard(self):
        with pytest.raises(OracleScopeError):
            ref_ols(list(range(60)))

    def test_jacobi_scope_guard(self):
        with pytest.raises(OracleScopeError):
            jacobi_eigh(np.eye(9))

    def test_jacobi_matches_numpy_on_random_symmetric(self):
        rng = np.random.default_rng(91)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            a = rng.normal(0, 1, (n, n))
            sym = (a + a.T) / 2
            vals, vecs = jacobi_eigh(sym)
            want = np.sort(np.linalg.eigvalsh(sym))[::-1]
            assert np.allclose(vals, want, atol=1e-10)
            # eigenvector property: A v = lambda v
            for i in range(n):
                assert np.allclose(sym @ vecs[:, i], vals[i] * vecs[:, i], atol=1e-8)
