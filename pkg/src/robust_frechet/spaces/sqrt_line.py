"""The real line with the snowflake metric ``d(x, y) = sqrt(|x - y|)``.

Fréchet means under this metric are exactly the medians.  The backend is
distance-only: there is no log map, so estimators fall back to exhaustive
search over candidate points.
"""

import numpy as np

from .._validation import check_weights
from ..exceptions import InvalidArgumentError
from .base import MetricSpace


class SqrtLine(MetricSpace):
    name = "sqrt_line"

    def check_point(self, x):
        arr = np.asarray(x, dtype=float)
        if arr.size != 1 or not np.isfinite(arr).all():
            raise InvalidArgumentError(f"sqrt-line points are finite scalars, got {x!r}")
        return float(arr.reshape(()))

    def check_sample(self, X):
        arr = np.asarray(X, dtype=float)
        if arr.ndim == 2 and arr.shape[1] == 1:
            arr = arr[:, 0]
        if arr.ndim != 1 or arr.shape[0] == 0:
            raise InvalidArgumentError(f"sqrt-line samples are non-empty 1-D arrays, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise InvalidArgumentError("sample contains non-finite values")
        return arr

    def stack(self, points):
        return np.array([self.check_point(p) for p in points])

    def point_scale(self, x):
        return abs(float(x))

    def distance(self, x, y):
        return float(np.sqrt(abs(self.check_point(x) - self.check_point(y))))

    def sq_dists(self, X, y):
        return np.abs(X - y)

    def pairwise_sq_dists(self, X, Y):
        return np.abs(X[:, None] - Y[None, :])

    def frechet_mean(self, X, weights=None):
        """Lowest weighted median (the smallest minimizer of sum w_i |x_i - b|)."""
        X = self.check_sample(X)
        w = check_weights(weights, X.shape[0])
        order = np.argsort(X, kind="stable")
        cum = np.cumsum(w[order])
        k = int(np.searchsorted(cum, 0.5 - 1e-12))
        return float(X[order[k]]), {"iterations": 0, "residual": 0.0, "converged": True}
