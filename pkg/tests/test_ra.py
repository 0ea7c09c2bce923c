import numpy as np
import pytest

from uncoupled import (
    BERNOULLI_KL,
    SQUARED,
    Dataset,
    DegenerateVarianceError,
    LinearModel,
    PairwiseSet,
    ParameterError,
    RaTuning,
    RaVariances,
    RiskConfig,
    ShapeError,
    SyntheticSpec,
    err_objective,
    err_objective_empirical,
    estimate_variances,
    gaussian_distribution,
    generate_synthetic,
    optimal_lambda,
    pairwise_from_arrays,
    ra_empirical_risk,
    ra_fit,
    ra_risk_gradient,
    sample_pairwise_from_spec,
    solve_normal_equations,
    tune_weights,
    tune_weights_empirical,
    uniform_distribution,
)

UNIFORM_CASES = [(0.0, 1.0), (0.0, 2.0), (-1.0, 3.0)]


def uniform_coupling(n_u, n_r, seed, shift=0.0):
    """X ~ U(0,1) scalar features coupled exactly as Y = X + shift."""
    rng = np.random.default_rng(seed)
    xu = rng.random(n_u)
    x1, x2 = rng.random(n_r), rng.random(n_r)
    unlabeled = Dataset(features=xu[:, None])
    pairs = pairwise_from_arrays(x1[:, None], x1 + shift, x2[:, None], x2 + shift)
    return unlabeled, pairs


class TestErrObjective:
    @pytest.mark.parametrize("a,b", UNIFORM_CASES)
    def test_uniform_optimum_is_exact(self, a, b):
        assert err_objective(uniform_distribution(a, b), b / 2.0, a / 2.0) <= 1e-9

    def test_uniform_grid_value_at_origin(self):
        # residual is y itself; the quantile grid spans [0.01, 0.99] in 1001
        # steps, so the weighted sum is (0.98/1000) * sum(y_i) = 0.49049
        val = err_objective(uniform_distribution(0.0, 1.0), 0.0, 0.0)
        assert val == pytest.approx(0.49049, abs=1e-9)
        assert val == pytest.approx(0.49, abs=1e-3)  # the integral it discretizes

    def test_moving_off_optimum_increases_objective(self):
        dist = uniform_distribution(0.0, 1.0)
        base = err_objective(dist, 0.5, 0.0)
        assert err_objective(dist, 0.7, 0.0) > base
        assert err_objective(dist, 0.5, -0.2) > base

    def test_degenerate_quantile_range_rejected(self):
        dist = uniform_distribution(0.0, 1.0)
        with pytest.raises(ParameterError):
            err_objective(dist, 0.5, 0.0, RaTuning(quantile_lo=0.6, quantile_hi=0.4))


class TestTuneWeights:
    @pytest.mark.parametrize("a,b", UNIFORM_CASES)
    def test_recovers_uniform_optimum(self, a, b):
        cfg = tune_weights(uniform_distribution(a, b))
        assert cfg.w1 == pytest.approx(b / 2.0, abs=0.02)
        assert cfg.w2 == pytest.approx(a / 2.0, abs=0.02)
        assert cfg.lam == pytest.approx((cfg.w1 + cfg.w2) / 2.0, abs=1e-12)

    def test_symmetric_gaussian_weights_are_antisymmetric(self):
        cfg = tune_weights(gaussian_distribution(0.0, 1.0))
        assert cfg.w2 == pytest.approx(-cfg.w1, abs=0.02)
        assert abs(cfg.lam) <= 0.02

    def test_gaussian_weight_matches_dense_scan(self):
        # independent 1-d oracle: scan the antisymmetric slice w2 = -w1
        dist = gaussian_distribution(0.0, 1.0)
        grid = np.linspace(0.6, 0.9, 601)
        values = [err_objective(dist, c, -c) for c in grid]
        best = grid[int(np.argmin(values))]
        cfg = tune_weights(dist)
        assert cfg.w1 == pytest.approx(best, abs=0.005)

    def test_deterministic(self):
        dist = gaussian_distribution(1.0, 2.0)
        a, b = tune_weights(dist), tune_weights(dist)
        assert (a.w1, a.w2, a.lam) == (b.w1, b.w2, b.lam)


class TestEmpiricalObjective:
    def test_two_point_sample_at_origin(self):
        assert err_objective_empirical(np.array([0.0, 1.0]), 0.0, 0.0) == pytest.approx(0.5)

    def test_constant_sample_zeroed_by_half_weight(self):
        targets = np.full(4, 3.0)
        # empirical cdf is 1 at the common value, so w1 = c/2 kills the residual
        assert err_objective_empirical(targets, 1.5, 0.3) == pytest.approx(0.0, abs=1e-12)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(0)
        targets = rng.normal(0.0, 1.0, 300)
        shuffled = rng.permutation(targets)
        a = err_objective_empirical(targets, 0.4, -0.2)
        b = err_objective_empirical(shuffled, 0.4, -0.2)
        assert a == pytest.approx(b, rel=1e-12)

    def test_tuner_recovers_uniform_weights_from_sample(self):
        rng = np.random.default_rng(8)
        cfg = tune_weights_empirical(rng.random(20_000))
        assert cfg.w1 == pytest.approx(0.5, abs=0.05)
        assert cfg.w2 == pytest.approx(0.0, abs=0.05)
        assert cfg.lam == pytest.approx(0.25, abs=0.05)


class TestOptimalLambda:
    def test_hand_values(self):
        assert optimal_lambda(1.0, 0.0, RaVariances(1.0, 1.0)) == pytest.approx(1.0)
        assert optimal_lambda(0.5, -0.5, RaVariances(2.0, 2.0)) == pytest.approx(0.0)
        assert optimal_lambda(1.0, 1.0, RaVariances(3.0, 1.0)) == pytest.approx(2.0)

    def test_degenerate_variances_rejected(self):
        with pytest.raises(DegenerateVarianceError):
            optimal_lambda(0.5, 0.0, RaVariances(0.0, 0.0))

    def test_estimate_variances_hand_case(self):
        pairs = pairwise_from_arrays(
            np.array([[1.0], [2.0], [4.0]]),
            [9.0, 9.0, 9.0],
            np.array([[0.0], [1.0], [3.0]]),
            [0.0, 0.0, 0.0],
        )
        model = LinearModel(np.array([1.0]))
        v = estimate_variances(model, SQUARED, pairs)
        # phi' values are (2, 4, 8) and (0, 2, 6); both sample variances = 28/3
        assert v.sigma2_plus == pytest.approx(28.0 / 3.0, rel=1e-12)
        assert v.sigma2_minus == pytest.approx(28.0 / 3.0, rel=1e-12)

    def test_estimate_variances_needs_two_pairs(self):
        pairs = pairwise_from_arrays([[1.0]], [1.0], [[0.0]], [0.0])
        with pytest.raises(ParameterError):
            estimate_variances(LinearModel(np.array([1.0])), SQUARED, pairs)


class TestEmpiricalRisk:
    def test_hand_instance(self):
        # unlabeled h = (1, 3), lambda = 1/2:
        #   phi(h) - (h - lambda) phi'(h) = (1 - 1, 9 - 15) -> mean -3 -> +3
        # pair: winner h=2 (phi'=4) weight w1-lam/2=0, loser h=-1 (phi'=-2)
        #   weight w2-lam/2=1/2 -> term -(-1) = +1
        unlabeled = Dataset(features=np.array([[1.0], [3.0]]))
        pairs = pairwise_from_arrays([[2.0]], [1.0], [[-1.0]], [0.0])
        model = LinearModel(np.array([1.0]))
        cfg = RiskConfig(w1=0.25, w2=0.75, lam=0.5)
        assert ra_empirical_risk(model, SQUARED, unlabeled, pairs, cfg) == 4.0

    def test_zero_model_zero_risk(self):
        rng = np.random.default_rng(1)
        unlabeled = Dataset(features=rng.standard_normal((40, 3)))
        pairs = PairwiseSet(rng.standard_normal((9, 3)), rng.standard_normal((9, 3)))
        model = LinearModel(np.zeros(3))
        cfg = RiskConfig(0.4, -0.1, 0.6)
        # squared generator: phi(0) = phi'(0) = 0 annihilates every term
        assert ra_empirical_risk(model, SQUARED, unlabeled, pairs, cfg) == 0.0

    def test_empty_pairs_keep_unlabeled_term(self):
        unlabeled = Dataset(features=np.array([[1.0], [3.0]]))
        pairs = PairwiseSet(np.empty((0, 1)), np.empty((0, 1)))
        model = LinearModel(np.array([1.0]))
        cfg = RiskConfig(0.25, 0.75, 0.5)
        assert ra_empirical_risk(model, SQUARED, unlabeled, pairs, cfg) == 3.0

    @pytest.mark.parametrize("gen", [SQUARED, BERNOULLI_KL], ids=["squared", "kl"])
    def test_risk_is_affine_in_lambda(self, gen):
        rng = np.random.default_rng(7)
        if gen is SQUARED:
            unlabeled = Dataset(features=rng.standard_normal((30, 2)))
            pairs = PairwiseSet(rng.standard_normal((12, 2)), rng.standard_normal((12, 2)))
            theta = rng.standard_normal(2)
        else:
            unlabeled = Dataset(features=rng.uniform(0.1, 0.45, (30, 2)))
            pairs = PairwiseSet(rng.uniform(0.1, 0.45, (12, 2)), rng.uniform(0.1, 0.45, (12, 2)))
            theta = np.array([1.0, 1.0])
        model = LinearModel(theta)
        h_u = unlabeled.features @ theta
        h_w = pairs.winners @ theta
        h_l = pairs.losers @ theta
        slope = np.mean(gen.phi_prime(h_w) + gen.phi_prime(h_l)) / 2.0 - np.mean(
            gen.phi_prime(h_u)
        )
        r0 = ra_empirical_risk(model, gen, unlabeled, pairs, RiskConfig(0.3, -0.2, 0.0))
        r7 = ra_empirical_risk(model, gen, unlabeled, pairs, RiskConfig(0.3, -0.2, 0.7))
        assert r7 - r0 == pytest.approx(0.7 * slope, abs=1e-12)

    def test_lambda_shift_invariant_in_expectation(self):
        # the lambda slope averages to zero across resamples, so risks at two
        # lambda values agree within Monte-Carlo error (paired comparison)
        theta = np.array([1.0, 0.0])
        spec = SyntheticSpec(dim=2, noise_std=0.1, theta_true=theta, seed=0)
        model = LinearModel(theta)
        diffs = []
        for k in range(300):
            s = SyntheticSpec(dim=2, noise_std=0.1, theta_true=theta, seed=1000 + k)
            unlabeled = generate_synthetic(s, 400).without_targets()
            pairs = sample_pairwise_from_spec(s, 400)
            lo = ra_empirical_risk(model, SQUARED, unlabeled, pairs, RiskConfig(0.7, -0.7, -0.5))
            hi = ra_empirical_risk(model, SQUARED, unlabeled, pairs, RiskConfig(0.7, -0.7, 0.5))
            diffs.append(hi - lo)
        diffs = np.asarray(diffs)
        se = diffs.std(ddof=1) / np.sqrt(diffs.size)
        assert abs(diffs.mean()) <= 3.0 * se

    def test_convex_in_theta(self):
        rng = np.random.default_rng(3)
        unlabeled = Dataset(features=rng.standard_normal((50, 3)))
        pairs = PairwiseSet(rng.standard_normal((20, 3)), rng.standard_normal((20, 3)))
        cfg = RiskConfig(0.6, -0.3, 0.2)

        def risk(theta):
            return ra_empirical_risk(LinearModel(theta), SQUARED, unlabeled, pairs, cfg)

        for _ in range(100):
            a = rng.standard_normal(3)
            b = rng.standard_normal(3)
            mid = risk((a + b) / 2.0)
            assert mid <= (risk(a) + risk(b)) / 2.0 + 1e-12


def finite_difference_gradient(f, theta, step=1e-6):
    grad = np.empty_like(theta)
    for i in range(theta.size):
        up, down = theta.copy(), theta.copy()
        up[i] += step
        down[i] -= step
        grad[i] = (f(up) - f(down)) / (2.0 * step)
    return grad


class TestRiskGradient:
    @pytest.mark.parametrize("gen", [SQUARED, BERNOULLI_KL], ids=["squared", "kl"])
    def test_matches_finite_differences(self, gen):
        rng = np.random.default_rng(17)
        for _ in range(10):
            if gen is SQUARED:
                unlabeled = Dataset(features=rng.standard_normal((25, 3)))
                pairs = PairwiseSet(rng.standard_normal((10, 3)), rng.standard_normal((10, 3)))
                theta = rng.standard_normal(3)
            else:
                # keep every score in the open unit interval required by KL
                unlabeled = Dataset(features=rng.uniform(0.1, 0.3, (25, 3)))
                pairs = PairwiseSet(rng.uniform(0.1, 0.3, (10, 3)), rng.uniform(0.1, 0.3, (10, 3)))
                theta = rng.uniform(0.5, 1.0, 3)
            cfg = RiskConfig(*rng.uniform(-0.8, 0.8, 2), rng.uniform(-0.5, 0.5))
            model = LinearModel(theta)
            grad = ra_risk_gradient(model, gen, unlabeled, pairs, cfg)
            fd = finite_difference_gradient(
                lambda t: ra_empirical_risk(LinearModel(t), gen, unlabeled, pairs, cfg),
                theta,
            )
            scale = max(1.0, float(np.max(np.abs(fd))))
            assert np.max(np.abs(grad - fd)) / scale < 1e-5


class TestRaFit:
    def test_uniform_coupling_recovers_theta(self):
        unlabeled, pairs = uniform_coupling(100_000, 5000, seed=0)
        cfg = tune_weights(uniform_distribution(0.0, 1.0))
        model = ra_fit(SQUARED, unlabeled, pairs, cfg)
        assert model.theta[0] == pytest.approx(1.0, abs=0.05)

    def test_intercept_recovers_affine_shift(self):
        unlabeled, pairs = uniform_coupling(100_000, 5000, seed=1, shift=2.0)
        cfg = tune_weights(uniform_distribution(2.0, 3.0))
        model = ra_fit(SQUARED, unlabeled, pairs, cfg, include_intercept=True)
        assert model.theta[0] == pytest.approx(1.0, abs=0.05)
        assert model.theta[1] == pytest.approx(2.0, abs=0.05)

    def test_closed_form_matches_gradient_descent(self):
        unlabeled, pairs = uniform_coupling(2000, 400, seed=2)
        cfg = RiskConfig(0.5, 0.0, 0.25)
        closed = ra_fit(SQUARED, unlabeled, pairs, cfg, method="closed_form")
        gd = ra_fit(SQUARED, unlabeled, pairs, cfg, method="gradient")
        assert np.max(np.abs(closed.theta - gd.theta)) < 1e-5

    def test_zero_weights_give_zero_model(self):
        unlabeled, pairs = uniform_coupling(500, 50, seed=3)
        model = ra_fit(SQUARED, unlabeled, pairs, RiskConfig(0.0, 0.0, 0.0))
        np.testing.assert_allclose(model.theta, 0.0, atol=1e-9)

    def test_dim_mismatch_rejected(self):
        unlabeled = Dataset(features=np.ones((5, 2)))
        pairs = PairwiseSet(np.ones((3, 1)), np.zeros((3, 1)))
        with pytest.raises(ShapeError):
            ra_fit(SQUARED, unlabeled, pairs, RiskConfig(0.5, 0.0, 0.25))

    def test_closed_form_requires_squared_generator(self):
        unlabeled = Dataset(features=np.full((6, 1), 0.2))
        pairs = PairwiseSet(np.full((3, 1), 0.25), np.full((3, 1), 0.15))
        with pytest.raises(ParameterError):
            ra_fit(BERNOULLI_KL, unlabeled, pairs, RiskConfig(0.5, 0.0, 0.25), method="closed_form")

    def test_fit_deterministic(self):
        unlabeled, pairs = uniform_coupling(3000, 300, seed=4)
        cfg = RiskConfig(0.5, 0.0, 0.25)
        a = ra_fit(SQUARED, unlabeled, pairs, cfg)
        b = ra_fit(SQUARED, unlabeled, pairs, cfg)
        np.testing.assert_array_equal(a.theta, b.theta)


class TestNormalEquations:
    def test_solves_well_conditioned_system(self):
        G = np.array([[2.0, 0.5], [0.5, 1.0]])
        rhs = np.array([1.0, 2.0])
        np.testing.assert_allclose(solve_normal_equations(G, rhs) , np.linalg.solve(G, rhs))

    def test_collinear_system_falls_back_to_ridge(self):
        # rank-1 matrix: the plain solve is untrustworthy; ridge keeps the
        # solution bounded instead of exploding along the null space
        G = np.outer([1.0, 1.0], [1.0, 1.0])
        theta = solve_normal_equations(G, np.array([1.0, 1.0]))
        assert np.all(np.isfinite(theta))
        assert np.linalg.norm(theta) < 10.0


class TestTuningConfig:
    def test_rejects_bad_grid(self):
        with pytest.raises(ParameterError):
            RaTuning(n_split=0)
        with pytest.raises(ParameterError):
            RaTuning(grid_points_per_axis=1)
        with pytest.raises(ParameterError):
            RaVariances(-1.0, 2.0)
