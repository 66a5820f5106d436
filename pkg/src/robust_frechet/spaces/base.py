"""Metric-space backend contract.

A backend knows how to validate its points and samples, compute distances
(one at a time and vectorized against a sample), and, when it has one, a
log map into a tangent space with an inner product.  Samples are kept in
the backend's native batch format (a 2-D array for vector spaces, a
``GaussianSample`` for Bures-Wasserstein) so that distance profiles can be
computed in bulk.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..exceptions import CapabilityError, DegenerateInputError, InvalidArgumentError

HUGGING_DEGENERACY_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Element of the tangent space at ``base``.

    For vector spaces only ``vector`` is set.  For Bures-Wasserstein the
    tangent vector is the affine map ``z -> matrix @ (z - base.mean) + vector``.
    """

    base: object
    vector: np.ndarray
    matrix: Optional[np.ndarray] = None

    def _check_compatible(self, other):
        if not same_point(self.base, other.base):
            raise InvalidArgumentError("tangent vectors live at different base points")

    def __sub__(self, other):
        self._check_compatible(other)
        matrix = None if self.matrix is None else self.matrix - other.matrix
        return TangentVector(self.base, self.vector - other.vector, matrix)


def same_point(x, y):
    """Exact equality of two point payloads of any backend."""
    if x is y:
        return True
    if hasattr(x, "mean") and hasattr(x, "cov"):
        return (
            hasattr(y, "cov")
            and np.array_equal(x.mean, y.mean)
            and np.array_equal(x.cov, y.cov)
        )
    return np.array_equal(np.asarray(x), np.asarray(y))


class MetricSpace:
    """Base class for metric-space backends.

    Subclasses implement ``check_point``, ``check_sample``, ``distance`` and
    ``sq_dists``.  Backends with a tangent structure also implement
    ``log_map``, ``tangent_inner``, ``exp_map`` and ``frechet_mean``.
    """

    name = "abstract"
    has_log_map = False
    is_vector_space = False

    # -- points and samples -------------------------------------------------
    def check_point(self, x):
        raise NotImplementedError

    def check_sample(self, X):
        raise NotImplementedError

    def n_points(self, X):
        return len(X)

    def take(self, X, idx):
        return X[np.asarray(idx)]

    def point(self, X, i):
        return X[i]

    def stack(self, points):
        return np.stack([self.check_point(p) for p in points])

    def point_scale(self, x):
        """Size of ``x`` used to make tolerances relative."""
        return float(np.linalg.norm(np.asarray(x, dtype=float)))

    # -- metric ---------------------------------------------------------------
    def distance(self, x, y):
        raise NotImplementedError

    def sq_dists(self, X, y):
        """Vector of ``d^2(x_i, y)`` for every point of the sample ``X``."""
        raise NotImplementedError

    def pairwise_sq_dists(self, X, Y):
        """Matrix ``D[i, j] = d^2(X_i, Y_j)``."""
        cols = [self.sq_dists(X, self.point(Y, j)) for j in range(self.n_points(Y))]
        return np.stack(cols, axis=1)

    # -- tangent structure ----------------------------------------------------
    def _no_log(self):
        raise CapabilityError(f"the {self.name} backend has no log map")

    def log_map(self, base, x):
        self._no_log()

    def exp_map(self, base, v):
        self._no_log()

    def tangent_inner(self, base, u, v):
        self._no_log()

    def tangent_norm(self, base, u):
        return float(np.sqrt(max(self.tangent_inner(base, u, u), 0.0)))

    def descend(self, b, X, weights, step):
        """Move ``b`` along ``-(step/2) * grad_b sum_i w_i d^2(b, x_i)``.

        ``step = 1`` lands on the weighted mean in flat space and performs one
        fixed-point sweep in curved backends.
        """
        self._no_log()

    def frechet_mean(self, X, weights=None):
        """Weighted empirical Fréchet mean; returns ``(point, info_dict)``."""
        raise CapabilityError(f"the {self.name} backend has no closed-form Fréchet mean")

    def perturb(self, x, scale, rng):
        self._no_log()

    def _check_same_base(self, base, u, v):
        if not (same_point(u.base, base) and same_point(v.base, base)):
            raise InvalidArgumentError("tangent vectors must share the given base point")

    def __repr__(self):
        return f"{type(self).__name__}()"


def hugging(space, mu, x, y):
    """Hugging function ``1 - (|log x - log y|^2 - d^2(x, y)) / d^2(mu, y)``.

    Equals 1 in flat space; lower bounds act as a strong-convexity modulus
    for ``d^2`` around ``mu``.
    """
    if not space.has_log_map:
        space.log_map(mu, x)
    mu, x, y = space.check_point(mu), space.check_point(x), space.check_point(y)
    d_mu_y = space.distance(mu, y)
    scale = max(1.0, space.point_scale(mu), space.point_scale(y))
    if d_mu_y <= HUGGING_DEGENERACY_RTOL * scale:
        raise DegenerateInputError("hugging function undefined: y coincides with mu")
    diff = space.log_map(mu, x) - space.log_map(mu, y)
    gap = space.tangent_inner(mu, diff, diff) - space.distance(x, y) ** 2
    return 1.0 - gap / d_mu_y**2


def strong_convexity_residual(space, mu, x, y, k_min):
    """``d^2(x,y) - d^2(x,mu) - (k_min d^2(mu,y) - 2 <log_mu x, log_mu y>)``.

    Nonnegative whenever ``k_min`` lower-bounds the hugging function at the
    triple; identically 0 in flat space with ``k_min = 1``.
    """
    mu, x, y = space.check_point(mu), space.check_point(x), space.check_point(y)
    inner = space.tangent_inner(mu, space.log_map(mu, x), space.log_map(mu, y))
    lhs = space.distance(x, y) ** 2 - space.distance(x, mu) ** 2
    rhs = k_min * space.distance(mu, y) ** 2 - 2.0 * inner
    return lhs - rhs
