import numpy as np
import pytest

from uncoupled import (
    Dataset,
    EmptyDataError,
    LinearModel,
    PairwiseSet,
    ParameterError,
    RankerModel,
    gaussian_distribution,
    lr_fit,
    predict,
    rank_predict,
    ranker_fit,
    ranking_error,
    uniform_distribution,
)
from uncoupled.baselines import _hinge_loss


def labeled(X, y):
    return Dataset(features=np.asarray(X, dtype=float), targets=np.asarray(y, dtype=float))


class TestLeastSquares:
    def test_exact_recovery_without_noise(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((60, 4))
        theta = np.array([1.5, -2.0, 0.25, 3.0])
        model = lr_fit(labeled(X, X @ theta))
        np.testing.assert_allclose(model.theta, theta, atol=1e-8)

    def test_residual_orthogonality(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((200, 3))
        y = X @ np.array([1.0, -1.0, 0.5]) + 0.3 * rng.standard_normal(200)
        model = lr_fit(labeled(X, y))
        resid = y - predict(model, X)
        scale = max(1.0, float(np.max(np.abs(X.T @ y))))
        assert np.max(np.abs(X.T @ resid)) <= 1e-6 * scale

    def test_constant_target_with_intercept(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((50, 3))
        model = lr_fit(labeled(X, np.full(50, 7.25)), include_intercept=True)
        assert model.includes_intercept
        np.testing.assert_allclose(model.theta[:3], 0.0, atol=1e-8)
        assert model.theta[3] == pytest.approx(7.25, abs=1e-8)

    def test_never_worse_than_zero_model_on_train(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((80, 2))
        y = rng.standard_normal(80) + 0.5
        model = lr_fit(labeled(X, y))
        fit_mse = float(np.mean((y - predict(model, X)) ** 2))
        assert fit_mse <= float(np.mean(y**2)) + 1e-12

    def test_requires_targets(self):
        with pytest.raises(ParameterError):
            lr_fit(Dataset(features=np.ones((4, 2))))


class TestRankerModel:
    def test_score_is_linear(self):
        ranker = RankerModel(np.array([2.0, -1.0]))
        assert ranker.score(np.array([3.0, 4.0])) == pytest.approx(2.0)
        assert ranker.dim == 2

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"theta": np.ones((2, 2))},
            {"theta": np.array([])},
            {"theta": np.array([np.nan, 1.0])},
            {"theta": np.ones(2), "reg_strength": -0.5},
        ],
    )
    def test_rejects_bad_arguments(self, kwargs):
        with pytest.raises(ParameterError):
            RankerModel(**kwargs)


def separable_pairs(seed=4, n=80, d=3):
    rng = np.random.default_rng(seed)
    direction = np.array([1.0, -0.5, 2.0])[:d]
    W = rng.standard_normal((n, d))
    L = W - np.abs(rng.standard_normal((n, 1))) * direction - 0.2 * direction
    return PairwiseSet(W, L), direction


class TestRankerFit:
    def test_separable_data_reaches_zero_error(self):
        pairs, _ = separable_pairs()
        ranker = ranker_fit(pairs)
        assert ranking_error(ranker, pairs) == 0.0

    def test_loss_not_worse_than_zero_start(self):
        pairs, _ = separable_pairs(seed=5)
        ranker = ranker_fit(pairs)
        reg = ranker.reg_strength
        zero = _hinge_loss(np.zeros(pairs.dim), pairs.winners, pairs.losers, reg)
        final = _hinge_loss(ranker.theta, pairs.winners, pairs.losers, reg)
        assert final <= zero + 1e-12

    def test_swapping_pairs_negates_direction(self):
        pairs, _ = separable_pairs(seed=6)
        fwd = ranker_fit(pairs)
        rev = ranker_fit(PairwiseSet(pairs.losers, pairs.winners))
        np.testing.assert_allclose(rev.theta, -fwd.theta, atol=1e-5)

    def test_stronger_regularization_shrinks_the_fit(self):
        pairs, _ = separable_pairs(seed=7)
        norms = [float(np.linalg.norm(ranker_fit(pairs, reg=r).theta)) for r in (1e-4, 1.0, 100.0)]
        assert norms[0] > norms[1] > norms[2]

    def test_deterministic(self):
        pairs, _ = separable_pairs(seed=8)
        np.testing.assert_array_equal(ranker_fit(pairs).theta, ranker_fit(pairs).theta)

    def test_empty_pairs_rejected(self):
        with pytest.raises(EmptyDataError):
            ranker_fit(PairwiseSet(np.empty((0, 2)), np.empty((0, 2))))

    def test_bad_reg_rejected(self):
        pairs, _ = separable_pairs(seed=9)
        with pytest.raises(ParameterError):
            ranker_fit(pairs, reg=-1.0)


class TestRankingError:
    def test_counts_strict_inversions_only(self):
        pairs = PairwiseSet(np.array([[1.0], [0.0]]), np.array([[0.0], [1.0]]))
        ranker = RankerModel(np.array([1.0]))
        assert ranking_error(ranker, pairs) == 0.5

    def test_score_ties_count_as_correct(self):
        pairs = PairwiseSet(np.ones((5, 2)), np.ones((5, 2)))
        assert ranking_error(RankerModel(np.array([1.0, 1.0])), pairs) == 0.0

    def test_empty_pairs_rejected(self):
        with pytest.raises(EmptyDataError):
            ranking_error(RankerModel(np.ones(1)), PairwiseSet(np.empty((0, 1)), np.empty((0, 1))))


class TestRankPredict:
    UNIFORM = uniform_distribution(0.0, 1.0)

    def base_ten(self):
        # identity scorer over scores 1..10
        scores = np.arange(1.0, 11.0)
        return RankerModel(np.array([1.0])), Dataset(features=scores[:, None])

    def test_interior_quantile(self):
        # one unlabeled score above the test point: level (10 - 2)/10 = 0.8
        ranker, unlabeled = self.base_ten()
        assert rank_predict(ranker, unlabeled, self.UNIFORM, np.array([9.5])) == pytest.approx(0.8)

    def test_top_is_capped_below_one(self):
        ranker, unlabeled = self.base_ten()
        top = rank_predict(ranker, unlabeled, self.UNIFORM, np.array([99.0]))
        assert top == pytest.approx(0.9)

    def test_bottom_clamps_into_quantile_domain(self):
        ranker, unlabeled = self.base_ten()
        bottom = rank_predict(ranker, unlabeled, self.UNIFORM, np.array([-99.0]))
        assert bottom == pytest.approx(1.0 / 11.0)

    def test_monotone_in_test_score(self):
        rng = np.random.default_rng(11)
        ranker = RankerModel(np.array([1.0, -2.0]))
        unlabeled = Dataset(features=rng.standard_normal((40, 2)))
        x = rng.standard_normal((200, 2))
        preds = np.asarray(rank_predict(ranker, unlabeled, gaussian_distribution(0.0, 1.0), x))
        order = np.argsort(np.asarray(ranker.score(x)))
        assert np.all(np.diff(preds[order]) >= -1e-12)

    def test_invariant_under_increasing_score_maps(self):
        # scoring with 2r + 3 (via an appended constant feature) leaves the
        # rank-based quantile untouched
        rng = np.random.default_rng(12)
        U = rng.standard_normal((30, 2))
        x = rng.standard_normal((25, 2))
        theta = np.array([0.7, -1.1])
        ones_u = np.hstack([U, np.ones((30, 1))])
        ones_x = np.hstack([x, np.ones((25, 1))])
        base = rank_predict(
            RankerModel(theta), Dataset(features=U), self.UNIFORM, x
        )
        mapped = rank_predict(
            RankerModel(np.append(2.0 * theta, 3.0)),
            Dataset(features=ones_u),
            self.UNIFORM,
            ones_x,
        )
        np.testing.assert_allclose(mapped, base, atol=1e-12)

    def test_scalar_input_returns_float(self):
        ranker, unlabeled = self.base_ten()
        value = rank_predict(ranker, unlabeled, self.UNIFORM, np.array([5.5]))
        assert isinstance(value, float)
