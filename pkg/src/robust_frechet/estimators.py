"""Fréchet-mean estimators: empirical, trimmed minimax and median-of-means.

Functional entry points take a backend and a sample in the backend's
native format.  ``EmpiricalFrechetMean``, ``TrimmedFrechetMean`` and
``MedianOfMeansFrechetMean`` wrap them as scikit-learn estimators whose
``transform`` returns distances to the fitted mean.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._solvers import (
    EstimatorResult,
    SolverConfig,
    euclidean_saddle_value,
    solve_alternating,
    solve_euclidean,
    solve_grid,
)
from ._validation import check_probability
from .exceptions import ConvergenceError, InvalidArgumentError
from .spaces import Euclidean, SqrtLine, make_space
from .trimming import TrimConfig

__all__ = [
    "EmpiricalFrechetMean",
    "EstimatorResult",
    "MedianOfMeansFrechetMean",
    "SolverConfig",
    "TrimmedFrechetMean",
    "empirical_frechet_mean",
    "euclidean_saddle_value",
    "mom_block_count",
    "mom_frechet_mean",
    "trimmed_frechet_mean",
    "trimmed_frechet_mean_grid",
]


def empirical_frechet_mean(space, sample, weights=None):
    """Minimizer of ``b -> sum_i w_i d^2(x_i, b)``.

    Closed form for Euclidean data, Newton iterations for ``l^p``, the
    barycenter fixed point for Gaussians and the lowest median on the
    square-root line.  Raises ``ConvergenceError`` carrying the last
    iterate when the backend solver stops early.
    """
    X = space.check_sample(sample)
    estimate, info = space.frechet_mean(X, weights)
    objective = float(np.mean(space.sq_dists(X, estimate)))
    result = EstimatorResult(
        estimate, info["iterations"], objective, None, info["converged"], dict(info)
    )
    if not info["converged"]:
        raise ConvergenceError(
            f"{space.name} Fréchet mean did not converge (residual {info['residual']:.3g})",
            result=result,
            residual=info["residual"],
        )
    return result


def _sqrt_line_grid(X):
    xs = np.unique(X)
    return np.concatenate([xs, 0.5 * (xs[1:] + xs[:-1])])


def trimmed_frechet_mean_grid(space, sample, t, grid):
    """Exact discrete saddle point ``argmin_{b in grid} max_{a in grid}`` of the
    trimmed objective.  Lowest grid index wins ties."""
    X = space.check_sample(sample)
    G = space.check_sample(grid)
    n = space.n_points(X)
    TrimConfig(n, t=t)
    return solve_grid(space, X, int(t), G)


def _starts(space, X, cfg):
    n = space.n_points(X)
    starts = []
    for name in cfg.starts:
        try:
            if name == "empirical":
                starts.append(empirical_frechet_mean(space, X).estimate)
            elif name == "mom" and n >= 4:
                k = min(n // 2, max(2, int(round(math.sqrt(n)))))
                starts.append(mom_frechet_mean(space, X, n_blocks=k).estimate)
            elif name == "medoid":
                sub = np.arange(n) if n <= 200 else np.linspace(0, n - 1, 200).astype(int)
                S = space.take(X, sub)
                D = space.pairwise_sq_dists(S, S)
                starts.append(space.point(S, int(np.argmin(D.sum(axis=0)))))
        except ConvergenceError as err:
            if err.result is not None:
                starts.append(err.result.estimate)
    if not starts:
        starts.append(space.point(X, 0))
    return starts


def trimmed_frechet_mean(space, sample, trim=None, cfg=None):
    """Trimmed minimax estimator ``argmin_b sup_a T_t(d^2(b, .) - d^2(a, .))``.

    ``trim`` is a ``TrimConfig`` (default: ``epsilon=0``, ``delta=0.05``)
    or a bare trim count.  The solver is picked by backend unless
    ``cfg.solver`` says otherwise: cutting planes on the exact convex
    reformulation for Euclidean data, exhaustive search over the sample
    and midpoints on the square-root line, alternating best response
    elsewhere.
    """
    cfg = SolverConfig() if cfg is None else cfg
    X = space.check_sample(sample)
    n = space.n_points(X)
    if trim is None:
        trim = TrimConfig(n)
    elif not isinstance(trim, TrimConfig):
        trim = TrimConfig(n, t=int(trim))
    if trim.n != n:
        raise InvalidArgumentError(f"TrimConfig is for n={trim.n}, sample has {n} points")
    t = trim.t
    solver = cfg.solver
    if solver == "auto":
        if isinstance(space, Euclidean):
            solver = "lp"
        elif isinstance(space, SqrtLine):
            solver = "grid"
        else:
            solver = "alternating"
    if solver == "lp":
        if not isinstance(space, Euclidean):
            raise InvalidArgumentError("the cutting-plane solver needs Euclidean data")
        result = solve_euclidean(X, t, cfg)
    elif solver == "grid":
        if isinstance(space, SqrtLine):
            grid = _sqrt_line_grid(X)
        else:
            grid = X
        result = solve_grid(space, X, t, grid)
    else:
        result = solve_alternating(space, X, t, cfg, _starts(space, X, cfg))
    result.diagnostics["t"] = t
    if not result.converged and cfg.raise_on_failure:
        raise ConvergenceError(
            "trimmed minimax solver hit its iteration limit", result=result
        )
    return result


def mom_block_count(delta):
    """``k = ceil(8 ln(1/delta))`` blocks."""
    delta = check_probability(delta, "delta")
    return math.ceil(8.0 * math.log(1.0 / delta) - 1e-9)


def mom_frechet_mean(space, sample, delta=None, n_blocks=None):
    """Median-of-means over ``k`` contiguous blocks of ``floor(n/k)`` points.

    Each block is reduced to its empirical Fréchet mean ``Y_j``; the result
    is the ``Y_j`` whose ``(floor(k/2)+1)``-th smallest distance to the
    block means (itself included) is smallest.  ``delta`` must lie in
    ``(exp(-n/16), 1/2)``; passing ``n_blocks`` skips that check.
    """
    X = space.check_sample(sample)
    n = space.n_points(X)
    if n_blocks is None:
        if delta is None:
            raise InvalidArgumentError("pass delta or n_blocks")
        delta = check_probability(delta, "delta", hi=0.5)
        if delta <= math.exp(-n / 16.0):
            raise InvalidArgumentError(
                f"delta={delta} must exceed exp(-n/16)={math.exp(-n / 16.0):.3g} for n={n}"
            )
        k = mom_block_count(delta)
    else:
        k = int(n_blocks)
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"need 1 <= k <= n, got k={k}, n={n}")
    ell = n // k
    blocks = []
    iterations = 0
    for j in range(k):
        res = empirical_frechet_mean(space, space.take(X, np.arange(j * ell, (j + 1) * ell)))
        blocks.append(res.estimate)
        iterations += res.iterations
    Y = space.stack(blocks)
    D = np.sqrt(space.pairwise_sq_dists(Y, Y))
    r = k // 2
    radii = np.sort(D, axis=1)[:, r]
    best = int(np.argmin(radii))
    diagnostics = {
        "method": "mom",
        "n_blocks": k,
        "block_size": ell,
        "block_means": blocks,
        "radii": radii,
    }
    return EstimatorResult(blocks[best], iterations, float(radii[best]), None, True, diagnostics)


# -- scikit-learn wrappers ---------------------------------------------------------


class _FrechetMeanBase(TransformerMixin, BaseEstimator):
    def _space(self):
        return make_space(self.space, **(self.space_params or {}))

    def transform(self, X):
        """Distances from each point of ``X`` to the fitted mean, shape ``(n, 1)``."""
        check_is_fitted(self, "estimate_")
        space = self._space()
        X = space.check_sample(X)
        return np.sqrt(space.sq_dists(X, self.estimate_))[:, None]

    def score(self, X, y=None):
        """Negative mean squared distance to the fitted mean."""
        return -float(np.mean(self.transform(X) ** 2))

    def _store(self, result, space, X):
        self.result_ = result
        self.estimate_ = result.estimate
        self.n_iter_ = result.iterations
        if space.is_vector_space:
            self.n_features_in_ = X.shape[1]
        return self


class EmpiricalFrechetMean(_FrechetMeanBase):
    """Empirical Fréchet mean.

    Parameters
    ----------
    space : str or MetricSpace, default="euclidean"
    space_params : dict, optional
        Keyword arguments for the backend when ``space`` is a name.
    """

    def __init__(self, space="euclidean", space_params=None):
        self.space = space
        self.space_params = space_params

    def fit(self, X, y=None):
        space = self._space()
        X = space.check_sample(X)
        return self._store(empirical_frechet_mean(space, X), space, X)


class TrimmedFrechetMean(_FrechetMeanBase):
    """Trimmed minimax Fréchet-mean estimator.

    Parameters
    ----------
    space : str or MetricSpace, default="euclidean"
    epsilon : float, default=0.0
        Assumed contamination fraction.
    delta : float, default=0.05
        Confidence parameter used to derive the trim count.
    t : int, optional
        Explicit trim count; overrides ``epsilon``/``delta``.
    solver_config : SolverConfig, optional
    space_params : dict, optional
    """

    def __init__(
        self, space="euclidean", epsilon=0.0, delta=0.05, t=None, solver_config=None,
        space_params=None,
    ):
        self.space = space
        self.epsilon = epsilon
        self.delta = delta
        self.t = t
        self.solver_config = solver_config
        self.space_params = space_params

    def fit(self, X, y=None):
        space = self._space()
        X = space.check_sample(X)
        trim = TrimConfig(space.n_points(X), self.epsilon, self.delta, self.t)
        self.t_ = trim.t
        return self._store(trimmed_frechet_mean(space, X, trim, self.solver_config), space, X)


class MedianOfMeansFrechetMean(_FrechetMeanBase):
    """Median-of-means Fréchet-mean estimator.

    Parameters
    ----------
    space : str or MetricSpace, default="euclidean"
    delta : float, default=0.05
    n_blocks : int, optional
        Explicit number of blocks; overrides ``delta``.
    space_params : dict, optional
    """

    def __init__(self, space="euclidean", delta=0.05, n_blocks=None, space_params=None):
        self.space = space
        self.delta = delta
        self.n_blocks = n_blocks
        self.space_params = space_params

    def fit(self, X, y=None):
        space = self._space()
        X = space.check_sample(X)
        result = mom_frechet_mean(space, X, self.delta, self.n_blocks)
        self.n_blocks_ = result.diagnostics["n_blocks"]
        return self._store(result, space, X)

