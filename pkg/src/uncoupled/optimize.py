"""Full-batch gradient descent with Armijo backtracking line search.

Deliberately plain: every risk here is smooth and low-dimensional, so a
halving line search with a warm-started initial step is fast and has no
tuning knobs worth exposing beyond tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DivergenceError, ParameterError


@dataclass(frozen=True)
class SolverOptions:
    max_iter: int = 10_000
    grad_tol: float = 1e-8
    armijo: float = 1e-4
    shrink: float = 0.5
    init: np.ndarray | None = None

    def __post_init__(self):
        if self.max_iter < 1:
            raise ParameterError("max_iter must be >= 1")
        if not (self.grad_tol > 0.0):
            raise ParameterError("grad_tol must be positive")
        if not (0.0 < self.armijo < 1.0):
            raise ParameterError("armijo must lie in (0, 1)")
        if not (0.0 < self.shrink < 1.0):
            raise ParameterError("shrink must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class GdResult:
    theta: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    converged: bool


def minimize_gd(fun, grad, x0, options: SolverOptions | None = None) -> GdResult:
    opts = options or SolverOptions()
    x = np.array(x0, dtype=float)
    f = float(fun(x))
    if not np.isfinite(f):
        raise DivergenceError("objective is non-finite at the starting point")
    g = np.asarray(grad(x), dtype=float)
    step = 1.0
    it = 0
    for it in range(1, opts.max_iter + 1):
        if not np.all(np.isfinite(g)):
            raise DivergenceError("gradient became non-finite")
        gnorm = float(np.linalg.norm(g))
        if gnorm <= opts.grad_tol:
            return GdResult(x, f, gnorm, it - 1, True)
        t = min(1.0, step / opts.shrink)  # warm start: try one size up first
        decrease = opts.armijo * gnorm * gnorm
        while True:
            trial = x - t * g
            f_trial = float(fun(trial))
            if np.isnan(f_trial):
                raise DivergenceError("objective became non-finite during line search")
            if f_trial <= f - t * decrease:
                break
            t *= opts.shrink
            if t < 1e-20:
                # step has collapsed to rounding level; nothing left to gain
                return GdResult(x, f, gnorm, it - 1, False)
        x = trial
        f = f_trial
        step = t
        g = np.asarray(grad(x), dtype=float)
    gnorm = float(np.linalg.norm(g))
    return GdResult(x, f, gnorm, opts.max_iter, gnorm <= opts.grad_tol)
