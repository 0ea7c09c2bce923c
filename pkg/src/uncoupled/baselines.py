"""Reference methods: supervised least squares and a rank-then-quantile
baseline built on a pairwise ranker.

The ranker scores points linearly and is trained on comparisons with a
squared hinge; predictions for a test point count how many unlabeled points
outrank it and read the matching quantile of the target distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    Dataset,
    EmptyDataError,
    LinearModel,
    ParameterError,
    PairwiseSet,
    _freeze,
    predict,
)
from .distributions import TargetDistribution
from .optimize import SolverOptions, minimize_gd
from .risk_approx import solve_normal_equations

_DEFAULT_RANK_REG = 1e-4


def lr_fit(data: Dataset, *, include_intercept: bool = False) -> LinearModel:
    """Ordinary least squares on a labeled dataset (normal equations with a
    tiny-ridge retry on singular Gram matrices)."""
    if data.targets is None:
        raise ParameterError("lr_fit needs a dataset with targets")
    X = data.features
    if include_intercept:
        X = np.hstack([X, np.ones((X.shape[0], 1))])
    n = X.shape[0]
    G = X.T @ X / n
    rhs = X.T @ data.targets / n
    theta = solve_normal_equations(G, rhs)
    return LinearModel(theta=theta, includes_intercept=include_intercept)


@dataclass(frozen=True)
class RankerModel:
    """Linear scoring function trained on pairwise comparisons."""

    theta: np.ndarray = field()
    reg_strength: float = _DEFAULT_RANK_REG

    def __post_init__(self):
        th = _freeze(self.theta)
        if th.ndim != 1 or th.size == 0:
            raise ParameterError("ranker theta must be a non-empty 1-d vector")
        if not np.all(np.isfinite(th)):
            raise ParameterError("ranker theta must be finite")
        if not (np.isfinite(self.reg_strength) and self.reg_strength >= 0.0):
            raise ParameterError("reg_strength must be finite and >= 0")
        object.__setattr__(self, "theta", th)

    @property
    def dim(self) -> int:
        return self.theta.size

    def score(self, x) -> float | np.ndarray:
        return predict(LinearModel(self.theta), x)


def _hinge_loss(theta: np.ndarray, W: np.ndarray, L: np.ndarray, reg: float) -> float:
    margin = (W - L) @ theta
    viol = np.maximum(0.0, 1.0 - margin)
    return float(np.mean(viol**2) + reg * theta @ theta)


def _hinge_grad(theta: np.ndarray, W: np.ndarray, L: np.ndarray, reg: float) -> np.ndarray:
    D = W - L
    margin = D @ theta
    viol = np.maximum(0.0, 1.0 - margin)
    return -2.0 * (D.T @ viol) / D.shape[0] + 2.0 * reg * theta


def ranker_fit(
    pairs: PairwiseSet,
    reg: float = _DEFAULT_RANK_REG,
    solver: SolverOptions | None = None,
) -> RankerModel:
    """Squared-hinge ranking fit: mean over comparisons of
    max(0, 1 - (score(x+) - score(x-)))^2 plus reg * ||theta||^2,
    minimized by gradient descent from zero."""
    if pairs.n_pairs < 1:
        raise EmptyDataError("ranker_fit needs at least one comparison")
    if not (np.isfinite(reg) and reg >= 0.0):
        raise ParameterError("reg must be finite and >= 0")
    W, L = pairs.winners, pairs.losers
    opts = solver or SolverOptions()
    x0 = opts.init if opts.init is not None else np.zeros(pairs.dim)
    result = minimize_gd(
        lambda th: _hinge_loss(th, W, L, reg),
        lambda th: _hinge_grad(th, W, L, reg),
        x0,
        opts,
    )
    return RankerModel(theta=result.theta, reg_strength=float(reg))


def ranking_error(ranker: RankerModel, pairs: PairwiseSet) -> float:
    """Fraction of comparisons the scorer gets strictly wrong (score ties
    count as correct)."""
    if pairs.n_pairs < 1:
        raise EmptyDataError("ranking_error needs at least one comparison")
    sp = predict(LinearModel(ranker.theta), pairs.winners)
    sm = predict(LinearModel(ranker.theta), pairs.losers)
    return float(np.mean(sp < sm))


def rank_predict(
    ranker: RankerModel,
    unlabeled: Dataset,
    dist: TargetDistribution,
    x_test,
) -> float | np.ndarray:
    """Quantile read-off: rank the test score among the unlabeled scores and
    evaluate the target quantile function there.

    With n' = 1 + #{unlabeled points scoring strictly above the test point},
    the plug-in level is q = (n_U - n') / n_U, clamped to
    [1/(n_U + 1), n_U/(n_U + 1)] to stay inside the quantile domain.
    """
    base = np.sort(np.asarray(ranker.score(unlabeled.features), dtype=float))
    n_u = base.size
    s = ranker.score(x_test)
    scalar = np.isscalar(s)
    sv = np.atleast_1d(np.asarray(s, dtype=float))
    # count of base scores strictly greater than each test score
    n_above = n_u - np.searchsorted(base, sv, side="right")
    q = (n_u - (1 + n_above)) / n_u
    q = np.clip(q, 1.0 / (n_u + 1), n_u / (n_u + 1.0))
    out = np.asarray(dist.inv_cdf(q), dtype=float)
    return float(out[0]) if scalar else out
