"""Flat Euclidean backend."""

import numpy as np

from .._validation import check_matrix_sample, check_vector, check_weights
from ..exceptions import InvalidArgumentError
from .base import MetricSpace, TangentVector


class Euclidean(MetricSpace):
    """``R^m`` with the Euclidean norm.  ``m=None`` infers the dimension from data."""

    name = "euclidean"
    has_log_map = True
    is_vector_space = True

    def __init__(self, m=None):
        self.m = m

    def __repr__(self):
        return f"Euclidean(m={self.m})"

    def check_point(self, x):
        return check_vector(x, self.m)

    def check_sample(self, X):
        return check_matrix_sample(X, self.m)

    def distance(self, x, y):
        x, y = self.check_point(x), self.check_point(y)
        if x.shape != y.shape:
            raise_dim(x, y)
        return float(np.linalg.norm(x - y))

    def sq_dists(self, X, y):
        diff = X - y
        return np.einsum("ij,ij->i", diff, diff)

    def pairwise_sq_dists(self, X, Y):
        diff = X[:, None, :] - Y[None, :, :]
        return np.einsum("ijk,ijk->ij", diff, diff)

    def log_map(self, base, x):
        base, x = self.check_point(base), self.check_point(x)
        if base.shape != x.shape:
            raise_dim(base, x)
        return TangentVector(base, x - base)

    def exp_map(self, base, v):
        return self.check_point(base) + v.vector

    def tangent_inner(self, base, u, v):
        self._check_same_base(base, u, v)
        return float(u.vector @ v.vector)

    def descend(self, b, X, weights, step):
        return b + step * (weights @ X - b)

    def frechet_mean(self, X, weights=None):
        X = self.check_sample(X)
        w = check_weights(weights, X.shape[0])
        return w @ X, {"iterations": 0, "residual": 0.0, "converged": True}

    def perturb(self, x, scale, rng):
        return x + scale * rng.standard_normal(x.shape)


def raise_dim(x, y):
    raise InvalidArgumentError(f"dimension mismatch: {x.shape} vs {y.shape}")
