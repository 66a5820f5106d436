"""Robust Fréchet-mean estimation in metric spaces.

Backends live in :mod:`robust_frechet.spaces`; estimators (empirical,
trimmed minimax, median-of-means) in :mod:`robust_frechet.estimators`;
error-radius formulas in :mod:`robust_frechet.bounds`; sample generators in
:mod:`robust_frechet.datagen`; the simulation CLI in :mod:`robust_frechet.sim`.
"""

from . import bounds, datagen
from ._solvers import EstimatorResult, SolverConfig
from .estimators import (
    EmpiricalFrechetMean,
    MedianOfMeansFrechetMean,
    TrimmedFrechetMean,
    empirical_frechet_mean,
    mom_frechet_mean,
    trimmed_frechet_mean,
    trimmed_frechet_mean_grid,
)
from .exceptions import (
    CapabilityError,
    ConvergenceError,
    DegenerateInputError,
    FrechetError,
    HypothesisViolationError,
    InvalidArgumentError,
)
from .spaces import (
    BuresWasserstein,
    Euclidean,
    Gaussian,
    GaussianSample,
    LpSpace,
    MetricSpace,
    SqrtLine,
    make_space,
)
from .trimming import TrimConfig, trim_count, trimmed_mean

__version__ = "0.1.0"

__all__ = [
    "BuresWasserstein",
    "CapabilityError",
    "ConvergenceError",
    "DegenerateInputError",
    "EmpiricalFrechetMean",
    "EstimatorResult",
    "Euclidean",
    "FrechetError",
    "Gaussian",
    "GaussianSample",
    "HypothesisViolationError",
    "InvalidArgumentError",
    "LpSpace",
    "MedianOfMeansFrechetMean",
    "MetricSpace",
    "SolverConfig",
    "SqrtLine",
    "TrimConfig",
    "TrimmedFrechetMean",
    "bounds",
    "datagen",
    "empirical_frechet_mean",
    "make_space",
    "mom_frechet_mean",
    "trim_count",
    "trimmed_frechet_mean",
    "trimmed_frechet_mean_grid",
    "trimmed_mean",
]
