"""Target-distribution abstraction: analytic (uniform, Gaussian), kernel
density estimates with cross-validated bandwidth, and empirical CDFs.

All three callables of a TargetDistribution are vectorized over numpy
arrays.  Quantile arguments are clamped into [1e-9, 1 - 1e-9] before
inversion so that unbounded supports never produce infinities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp, ndtr
from scipy.stats import norm

from .core import DomainError, ParameterError, ShapeError

_QUANTILE_CLAMP = 1e-9
_SQRT_2PI = float(np.sqrt(2.0 * np.pi))


@dataclass(frozen=True, eq=False)
class TargetDistribution:
    """pdf / cdf / inverse-cdf triple with a finite working support window."""

    pdf: Callable[[np.ndarray], np.ndarray]
    cdf: Callable[[np.ndarray], np.ndarray]
    inv_cdf: Callable[[np.ndarray], np.ndarray]
    support_bounds: tuple[float, float]
    name: str = ""


def _clamp_quantiles(u) -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0) or not np.all(np.isfinite(arr)):
        raise DomainError("inverse-cdf argument must lie strictly inside (0, 1)")
    return np.clip(arr, _QUANTILE_CLAMP, 1.0 - _QUANTILE_CLAMP)


def _scalarize(f):
    """Return float for scalar input, ndarray otherwise."""

    def wrapped(y):
        arr = np.asarray(y, dtype=float)
        out = f(arr)
        if arr.ndim == 0:
            return float(out)
        return out

    return wrapped


def gaussian_distribution(mean: float, std: float) -> TargetDistribution:
    if not (std > 0.0 and np.isfinite(std) and np.isfinite(mean)):
        raise ParameterError(f"need finite mean and std > 0, got {mean!r}, {std!r}")
    dist = norm(loc=mean, scale=std)

    def inv(u):
        return dist.ppf(_clamp_quantiles(u))

    return TargetDistribution(
        pdf=_scalarize(dist.pdf),
        cdf=_scalarize(dist.cdf),
        inv_cdf=_scalarize(inv),
        support_bounds=(mean - 10.0 * std, mean + 10.0 * std),
        name=f"gaussian(mean={mean:g}, std={std:g})",
    )


def uniform_distribution(a: float, b: float) -> TargetDistribution:
    if not (b > a and np.isfinite(a) and np.isfinite(b)):
        raise ParameterError(f"need finite a < b, got a={a!r}, b={b!r}")
    width = b - a

    def pdf(y):
        return np.where((y >= a) & (y <= b), 1.0 / width, 0.0)

    def cdf(y):
        return np.clip((y - a) / width, 0.0, 1.0)

    def inv(u):
        return a + _clamp_quantiles(u) * width

    return TargetDistribution(
        pdf=_scalarize(pdf),
        cdf=_scalarize(cdf),
        inv_cdf=_scalarize(inv),
        support_bounds=(a, b),
        name=f"uniform({a:g}, {b:g})",
    )


# ---------------------------------------------------------------------------
# kernel density estimation


@dataclass(frozen=True, eq=False)
class KdeModel:
    """Gaussian-kernel density model: sample points (stored sorted) plus a
    single positive bandwidth."""

    sample_points: np.ndarray
    bandwidth: float

    def __post_init__(self):
        pts = np.sort(np.asarray(self.sample_points, dtype=float).ravel())
        if pts.size < 1:
            raise ParameterError("KDE needs at least one sample point")
        if not np.all(np.isfinite(pts)):
            raise ParameterError("KDE sample points contain non-finite entries")
        if not (self.bandwidth > 0.0 and np.isfinite(self.bandwidth)):
            raise ParameterError(f"bandwidth must be positive, got {self.bandwidth!r}")
        pts.flags.writeable = False
        object.__setattr__(self, "sample_points", pts)


def silverman_bandwidth(values: np.ndarray) -> float:
    """1.06 * sample std * n^(-1/5)."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 2:
        raise ParameterError("need >= 2 values for a bandwidth rule")
    s = float(np.std(v, ddof=1))
    if not s > 0.0:
        raise ParameterError("degenerate sample (zero spread) has no usable bandwidth")
    return 1.06 * s * v.size ** (-0.2)


def _chunked(n: int, block: int):
    for start in range(0, n, block):
        yield start, min(start + block, n)


def _kde_log_pdf(query: np.ndarray, pts: np.ndarray, h: float) -> np.ndarray:
    """Log density of the KDE at query points, numerically stable."""
    n = pts.size
    out = np.empty(query.size)
    block = max(1, 2_000_000 // max(n, 1))
    for lo, hi in _chunked(query.size, block):
        z = (query[lo:hi, None] - pts[None, :]) / h
        out[lo:hi] = logsumexp(-0.5 * z * z, axis=1)
    return out - np.log(n * h * _SQRT_2PI)


def fit_kde(targets, bandwidth_grid=None) -> KdeModel:
    """Pick a bandwidth by 5-fold cross-validated log-likelihood.

    Folds are assigned by sorted-order index modulo 5, which is both
    deterministic and invariant under permutations of the input.  The default
    grid is 20 log-spaced bandwidths between h_silverman/10 and
    h_silverman*10.  Ties prefer the smallest bandwidth.
    """
    v = np.sort(np.asarray(targets, dtype=float).ravel())
    if v.size == 0:
        raise ParameterError("empty targets")
    if not np.all(np.isfinite(v)):
        raise ParameterError("targets contain non-finite entries")
    if v.size < 5:
        raise ParameterError(f"need >= 5 targets for 5-fold selection, got {v.size}")
    if bandwidth_grid is None:
        h0 = silverman_bandwidth(v)
        grid = np.geomspace(h0 / 10.0, h0 * 10.0, 20)
    else:
        grid = np.asarray(bandwidth_grid, dtype=float).ravel()
        if grid.size == 0 or np.any(~np.isfinite(grid)) or np.any(grid <= 0.0):
            raise ParameterError("bandwidth grid must be nonempty and positive")

    fold_of = np.arange(v.size) % 5
    scores = np.full(grid.size, -np.inf)
    for k, h in enumerate(grid):
        total = 0.0
        for f in range(5):
            train = v[fold_of != f]
            val = v[fold_of == f]
            total += float(np.sum(_kde_log_pdf(val, train, h)))
        scores[k] = total
    best = int(np.argmax(scores))
    return KdeModel(sample_points=v, bandwidth=float(grid[best]))


def kde_distribution(model: KdeModel) -> TargetDistribution:
    """Wrap a KdeModel as a TargetDistribution; the inverse CDF is found by
    bisection on [min - 5h, max + 5h] to absolute tolerance 1e-8."""
    pts = model.sample_points
    h = model.bandwidth
    n = pts.size
    lo = float(pts[0] - 5.0 * h)
    hi = float(pts[-1] + 5.0 * h)

    def pdf(y):
        flat = np.ravel(y)
        out = np.exp(_kde_log_pdf(flat, pts, h))
        return out.reshape(np.shape(y))

    def cdf(y):
        flat = np.ravel(y)
        out = np.empty(flat.size)
        block = max(1, 2_000_000 // n)
        for a, b in _chunked(flat.size, block):
            z = (flat[a:b, None] - pts[None, :]) / h
            out[a:b] = ndtr(z).mean(axis=1)
        return out.reshape(np.shape(y))

    def inv(u):
        q = _clamp_quantiles(u)
        flat = np.ravel(q).astype(float)
        a = np.full(flat.shape, lo)
        b = np.full(flat.shape, hi)
        # ~60 halvings push the bracket below 1e-8 for any reasonable range
        steps = int(np.ceil(np.log2(max((hi - lo) / 1e-8, 2.0)))) + 2
        for _ in range(steps):
            mid = 0.5 * (a + b)
            too_low = cdf(mid) < flat
            a = np.where(too_low, mid, a)
            b = np.where(too_low, b, mid)
        out = 0.5 * (a + b)
        if np.ndim(u) == 0:
            return float(out[0])
        return out.reshape(np.shape(u))

    return TargetDistribution(
        pdf=_scalarize(pdf),
        cdf=_scalarize(cdf),
        inv_cdf=inv,
        support_bounds=(lo, hi),
        name=f"kde(n={n}, h={h:g})",
    )


# ---------------------------------------------------------------------------
# empirical CDFs


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Step-function CDF of a finite sample; values are stored sorted."""

    sorted_values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.sorted_values, dtype=float).ravel()
        if v.size == 0:
            raise ParameterError("empirical CDF needs at least one value")
        if not np.all(np.isfinite(v)):
            raise ParameterError("values contain non-finite entries")
        if np.any(np.diff(v) < 0.0):
            raise ParameterError("values must be sorted ascending")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "sorted_values", v)

    @classmethod
    def from_values(cls, values) -> "EmpiricalCdf":
        return cls(sorted_values=np.sort(np.asarray(values, dtype=float).ravel()))

    @property
    def n(self) -> int:
        return self.sorted_values.size


def empirical_cdf_eval(ecdf: EmpiricalCdf, y) -> float | np.ndarray:
    """Fraction of sample values <= y (right-continuous step function)."""
    arr = np.asarray(y, dtype=float)
    out = np.searchsorted(ecdf.sorted_values, arr, side="right") / ecdf.n
    if arr.ndim == 0:
        return float(out)
    return out


def empirical_distribution(values) -> TargetDistribution:
    """Continuous (piecewise-linear) distribution interpolating the empirical
    CDF through Hazen plotting positions, giving a genuine pdf/cdf/inverse
    triple.  Duplicate values are merged.  Needs >= 2 distinct values."""
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size < 2:
        raise ParameterError("need >= 2 values")
    if not np.all(np.isfinite(v)):
        raise ParameterError("values contain non-finite entries")
    uniq, counts = np.unique(v, return_counts=True)
    if uniq.size < 2:
        raise ParameterError("need >= 2 distinct values")
    n = v.size
    cum = np.cumsum(counts)
    positions = (cum - 0.5 * counts) / n
    # Linear ramps over a small data-scaled pad carry the cdf to exactly 0
    # and 1, so every quantile in (0, 1) is invertible (the raw plotting
    # positions only span [0.5/n, 1 - 0.5/n]).
    pad = (uniq[-1] - uniq[0]) / n
    knots = np.concatenate(([uniq[0] - pad], uniq, [uniq[-1] + pad]))
    levels = np.concatenate(([0.0], positions, [1.0]))
    slopes = np.diff(levels) / np.diff(knots)

    def cdf(y):
        return np.interp(y, knots, levels)

    def pdf(y):
        arr = np.asarray(y, dtype=float)
        idx = np.searchsorted(knots, arr, side="right") - 1
        inside = (idx >= 0) & (idx < slopes.size)
        safe = np.clip(idx, 0, slopes.size - 1)
        return np.where(inside, slopes[safe], 0.0)

    def inv(u):
        return np.interp(_clamp_quantiles(u), levels, knots)

    return TargetDistribution(
        pdf=_scalarize(pdf),
        cdf=_scalarize(cdf),
        inv_cdf=_scalarize(inv),
        support_bounds=(float(knots[0]), float(knots[-1])),
        name=f"empirical(n={n})",
    )
