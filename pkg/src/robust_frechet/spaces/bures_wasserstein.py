"""Gaussian measures under the 2-Wasserstein metric.

A point is ``N(mean, cov)`` with ``cov`` symmetric positive definite.  The
distance, optimal transport maps and barycenters all have closed forms or
fixed-point characterizations in terms of matrix square roots, which are
computed by symmetric eigendecomposition throughout.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .._validation import check_spd, check_vector, check_weights
from ..exceptions import ConvergenceError, InvalidArgumentError
from .base import MetricSpace, TangentVector

#: Eigenvalues below this fraction of the largest are clamped in square roots.
EIG_CLAMP = 1e-14


def _freeze(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Gaussian:
    """``N(mean, cov)``; ``cov`` is symmetrized and checked for positive definiteness."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = check_vector(self.mean, name="mean")
        cov = check_spd(np.atleast_2d(np.asarray(self.cov, dtype=float)), name="cov")
        if cov.ndim != 2 or cov.shape != (mean.size, mean.size):
            raise InvalidArgumentError(
                f"cov has shape {cov.shape}, expected {(mean.size, mean.size)}"
            )
        object.__setattr__(self, "mean", _freeze(mean))
        object.__setattr__(self, "cov", _freeze(cov))

    @property
    def dim(self):
        return self.mean.size

    def __repr__(self):
        return f"Gaussian(mean={self.mean.tolist()}, cov={self.cov.tolist()})"


@dataclass(frozen=True, eq=False)
class GaussianSample:
    """A batch of Gaussians stored as stacked ``means (n, m)`` and ``covs (n, m, m)``."""

    means: np.ndarray
    covs: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        if means.ndim == 1:
            means = means[:, None]
        covs = np.asarray(self.covs, dtype=float)
        if covs.ndim == 1:
            covs = covs[:, None, None]
        if means.ndim != 2 or means.shape[0] == 0:
            raise InvalidArgumentError(f"means must be a non-empty (n, m) array, got {means.shape}")
        n, m = means.shape
        if covs.shape != (n, m, m):
            raise InvalidArgumentError(f"covs has shape {covs.shape}, expected {(n, m, m)}")
        if not np.all(np.isfinite(means)):
            raise InvalidArgumentError("means contain non-finite values")
        object.__setattr__(self, "means", _freeze(means))
        object.__setattr__(self, "covs", _freeze(check_spd(covs, name="covs")))

    @classmethod
    def from_points(cls, points):
        points = list(points)
        if not points:
            raise InvalidArgumentError("sample is empty")
        return cls(np.stack([g.mean for g in points]), np.stack([g.cov for g in points]))

    @property
    def dim(self):
        return self.means.shape[1]

    def __len__(self):
        return self.means.shape[0]

    def __getitem__(self, i):
        if isinstance(i, (int, np.integer)):
            return Gaussian(self.means[i], self.covs[i])
        return GaussianSample(self.means[i], self.covs[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))


def _sqrt_eig(M, power=0.5):
    """``M^power`` for symmetric PSD ``M`` (or a stack), clamping tiny eigenvalues."""
    w, Q = np.linalg.eigh(M)
    floor = EIG_CLAMP * np.max(w, axis=-1, keepdims=True)
    w = np.maximum(w, np.maximum(floor, 0.0))
    if power < 0:
        w = np.maximum(w, np.finfo(float).tiny)
    R = (Q * w[..., None, :] ** power) @ np.swapaxes(Q, -1, -2)
    return 0.5 * (R + np.swapaxes(R, -1, -2))


def _trace_sqrt(M):
    """``trace(M^(1/2))`` for a stack of symmetric PSD matrices."""
    w = np.linalg.eigvalsh(0.5 * (M + np.swapaxes(M, -1, -2)))
    floor = EIG_CLAMP * np.max(w, axis=-1, keepdims=True)
    return np.sqrt(np.maximum(w, np.maximum(floor, 0.0))).sum(axis=-1)


def spd_sqrt(V):
    """Principal square root of an SPD matrix.

    >>> spd_sqrt(np.diag([4.0, 9.0]))
    array([[2., 0.],
           [0., 3.]])
    """
    return _sqrt_eig(check_spd(V))


def _as_gaussian(g):
    if isinstance(g, Gaussian):
        return g
    if isinstance(g, tuple) and len(g) == 2:
        return Gaussian(*g)
    raise InvalidArgumentError(f"expected a Gaussian or a (mean, cov) pair, got {type(g).__name__}")


def _check_pair(g1, g2):
    g1, g2 = _as_gaussian(g1), _as_gaussian(g2)
    if g1.dim != g2.dim:
        raise InvalidArgumentError(f"dimension mismatch: {g1.dim} vs {g2.dim}")
    return g1, g2


def w2_squared(g1, g2):
    """``|a - b|^2 + tr(V + W - 2 (V^1/2 W V^1/2)^1/2)``, clipped at 0."""
    g1, g2 = _check_pair(g1, g2)
    S = _sqrt_eig(g1.cov)
    cross = _trace_sqrt(S @ g2.cov @ S)
    diff = g1.mean - g2.mean
    value = diff @ diff + np.trace(g1.cov) + np.trace(g2.cov) - 2.0 * cross
    return max(float(value), 0.0)


def w2_distance(g1, g2):
    """2-Wasserstein distance between two Gaussians."""
    return float(np.sqrt(w2_squared(g1, g2)))


def w2_squared_batch(sample, g):
    """``W_2^2(sample_i, g)`` for every Gaussian in ``sample``."""
    S = _sqrt_eig(g.cov)
    cross = _trace_sqrt(S @ sample.covs @ S)
    diff = sample.means - g.mean
    value = (
        np.einsum("ij,ij->i", diff, diff)
        + np.trace(sample.covs, axis1=1, axis2=2)
        + np.trace(g.cov)
        - 2.0 * cross
    )
    return np.maximum(value, 0.0)


class TransportMap(NamedTuple):
    """The affine map ``x -> matrix @ (x - source_mean) + target_mean``."""

    matrix: np.ndarray
    source_mean: np.ndarray
    target_mean: np.ndarray

    def __call__(self, x):
        return (np.asarray(x, dtype=float) - self.source_mean) @ self.matrix.T + self.target_mean


def _transport_matrix(V, W):
    S = _sqrt_eig(V)
    S_inv = _sqrt_eig(V, power=-0.5)
    T = S_inv @ _sqrt_eig(S @ W @ S) @ S_inv
    return 0.5 * (T + T.T)


def transport_map(g1, g2):
    """Optimal transport map pushing ``g1`` forward to ``g2``.

    The linear part ``V^-1/2 (V^1/2 W V^1/2)^1/2 V^-1/2`` is symmetric
    positive definite and satisfies ``T V T = W``.
    """
    g1, g2 = _check_pair(g1, g2)
    return TransportMap(_transport_matrix(g1.cov, g2.cov), g1.mean.copy(), g2.mean.copy())


class BarycenterInfo(NamedTuple):
    iterations: int
    residual: float
    converged: bool
    residual_history: tuple


def _fixed_point_map(V, covs, w):
    S = _sqrt_eig(V)
    roots = _sqrt_eig(S @ covs @ S)
    F = np.einsum("i,ijk->jk", w, roots)
    return 0.5 * (F + F.T)


def barycenter_fixed_point(samples, weights=None, tol=1e-10, max_iter=500):
    """Weighted 2-Wasserstein barycenter of Gaussians.

    Iterates ``V <- sum_i w_i (V^1/2 V_i V^1/2)^1/2`` from ``V_0 = sum_i w_i V_i``
    until the residual ``|V - sum_i w_i (V^1/2 V_i V^1/2)^1/2|_F`` is at most
    ``tol``.  The returned covariance is the last iterate whose residual was
    measured, so ``info.residual`` certifies it.  The mean is the weighted
    average of the means.

    Raises ``ConvergenceError`` (carrying the last iterate and its residual)
    when ``max_iter`` sweeps do not reach ``tol``.
    """
    if not isinstance(samples, GaussianSample):
        samples = GaussianSample.from_points(_as_gaussian(g) for g in samples)
    w = check_weights(weights, len(samples))
    if tol <= 0:
        raise InvalidArgumentError(f"tol must be positive, got {tol}")
    mean = w @ samples.means
    V = np.einsum("i,ijk->jk", w, samples.covs)
    history = []
    for it in range(1, max_iter + 1):
        F = _fixed_point_map(V, samples.covs, w)
        residual = float(np.linalg.norm(V - F))
        history.append(residual)
        if residual <= tol:
            info = BarycenterInfo(it, residual, True, tuple(history))
            return Gaussian(mean, V), info
        V = F
    info = BarycenterInfo(max_iter, history[-1], False, tuple(history))
    raise ConvergenceError(
        f"barycenter fixed point did not reach tol={tol} in {max_iter} iterations",
        result=(Gaussian(mean, V), info),
        residual=history[-1],
    )


def hugging_lower_bound_kappa(kappa0, kappa1):
    """``1 - kappa + 1/kappa`` with ``kappa = kappa1 / kappa0``.

    Positive exactly when ``kappa`` is below the golden ratio.
    """
    if not (0 < kappa0 <= kappa1):
        raise InvalidArgumentError(f"need 0 < kappa0 <= kappa1, got {kappa0}, {kappa1}")
    kappa = kappa1 / kappa0
    return 1.0 - kappa + 1.0 / kappa


class ExtendibleBound(NamedTuple):
    k_min: float
    lambda_in: float
    lambda_out: float


def hugging_lower_bound_extendible(alpha, beta):
    """Hugging bound ``1 + alpha - beta`` for transport potentials that are
    ``alpha``-strongly convex and ``beta``-smooth.

    Also returns the extension parameters ``lambda_in = 1/(beta - 1)`` and
    ``lambda_out = alpha/(1 - alpha)``, infinite at ``beta = 1`` and
    ``alpha = 1`` respectively.
    """
    if not (0 < alpha <= 1 <= beta):
        raise InvalidArgumentError(f"need 0 < alpha <= 1 <= beta, got {alpha}, {beta}")
    lambda_in = np.inf if beta == 1 else 1.0 / (beta - 1.0)
    lambda_out = np.inf if alpha == 1 else alpha / (1.0 - alpha)
    return ExtendibleBound(1.0 + alpha - beta, lambda_in, lambda_out)


class BuresWasserstein(MetricSpace):
    """Gaussian backend.  Samples are ``GaussianSample`` batches; points are ``Gaussian``."""

    name = "bures_wasserstein"
    has_log_map = True

    def __init__(self, m=None, tol=1e-10, max_iter=500):
        self.m = m
        self.tol = tol
        self.max_iter = max_iter

    def __repr__(self):
        return f"BuresWasserstein(m={self.m})"

    def check_point(self, x):
        g = _as_gaussian(x)
        if self.m is not None and g.dim != self.m:
            raise InvalidArgumentError(f"Gaussian has dimension {g.dim}, expected {self.m}")
        return g

    def check_sample(self, X):
        if isinstance(X, tuple) and len(X) == 2 and not isinstance(X[0], Gaussian):
            X = GaussianSample(*X)
        elif not isinstance(X, GaussianSample):
            X = GaussianSample.from_points(_as_gaussian(g) for g in X)
        if self.m is not None and X.dim != self.m:
            raise InvalidArgumentError(f"sample has dimension {X.dim}, expected {self.m}")
        return X

    def take(self, X, idx):
        return X[np.asarray(idx)]

    def stack(self, points):
        return GaussianSample.from_points(self.check_point(p) for p in points)

    def point_scale(self, x):
        return float(np.sqrt(x.mean @ x.mean + np.trace(x.cov)))

    def distance(self, x, y):
        return w2_distance(self.check_point(x), self.check_point(y))

    def sq_dists(self, X, y):
        return w2_squared_batch(X, y)

    def log_map(self, base, x):
        """Transport map to ``x`` minus the identity, as an affine tangent vector."""
        base, x = _check_pair(self.check_point(base), self.check_point(x))
        T = _transport_matrix(base.cov, x.cov)
        return TangentVector(base, x.mean - base.mean, T - np.eye(base.dim))

    def exp_map(self, base, v):
        base = self.check_point(base)
        M = np.eye(base.dim) + v.matrix
        return Gaussian(base.mean + v.vector, M @ base.cov @ M.T)

    def tangent_inner(self, base, u, v):
        """``tr(A V B^T) + <c, e>`` for ``u = (A, c)``, ``v = (B, e)`` at ``N(a, V)``."""
        self._check_same_base(base, u, v)
        return float(np.trace(u.matrix @ base.cov @ v.matrix.T) + u.vector @ v.vector)

    def descend(self, b, X, weights, step):
        """Push ``b`` forward by ``(1 - step) I + step * sum_i w_i T_i``.

        ``T_i`` is the optimal map from ``b`` to ``X_i``; ``step = 1`` is one
        sweep of the barycenter fixed-point iteration in transport form.
        """
        S = _sqrt_eig(b.cov)
        S_inv = _sqrt_eig(b.cov, power=-0.5)
        active = weights > 0
        roots = _sqrt_eig(S @ X.covs[active] @ S)
        T_bar = S_inv @ np.einsum("i,ijk->jk", weights[active], roots) @ S_inv
        M = (1.0 - step) * np.eye(b.dim) + step * 0.5 * (T_bar + T_bar.T)
        mean = (1.0 - step) * b.mean + step * (weights @ X.means)
        cov = M @ b.cov @ M
        return Gaussian(mean, 0.5 * (cov + cov.T))

    def frechet_mean(self, X, weights=None):
        X = self.check_sample(X)
        g, info = barycenter_fixed_point(X, weights, tol=self.tol, max_iter=self.max_iter)
        return g, {"iterations": info.iterations, "residual": info.residual, "converged": True}

    def perturb(self, x, scale, rng):
        m = x.dim
        S = rng.standard_normal((m, m))
        w, Q = np.linalg.eigh(scale * 0.5 * (S + S.T))
        E = (Q * np.exp(0.5 * w)) @ Q.T
        cov = E @ x.cov @ E
        return Gaussian(x.mean + scale * rng.standard_normal(m), 0.5 * (cov + cov.T))
