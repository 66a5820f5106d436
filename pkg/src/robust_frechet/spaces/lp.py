"""``R^m`` with the ``l^p`` norm, ``1 < p <= 2``.

The squared norm is ``2(p-1)``-strongly convex, its gradient ``g_p`` maps
into the dual ``l^q`` (``q = p/(p-1)``) with ``|g_p(x)|_q = 2|x|_p``, and
these facts drive both the backend and the residual diagnostics below.
"""

from dataclasses import dataclass

import numpy as np

from .._validation import check_matrix_sample, check_vector, check_weights
from ..exceptions import InvalidArgumentError
from .base import MetricSpace, TangentVector


def _check_p(p, lo=1.0, hi=2.0):
    p = float(p)
    if not (lo < p <= hi):
        raise InvalidArgumentError(f"p must lie in ({lo}, {hi}], got {p}")
    return p


def dual_exponent(p):
    p = float(p)
    if p <= 1.0:
        raise InvalidArgumentError(f"p must exceed 1, got {p}")
    return p / (p - 1.0)


@dataclass(frozen=True)
class LpSpec:
    m: int
    p: float

    def __post_init__(self):
        _check_p(self.p)
        if int(self.m) < 1:
            raise InvalidArgumentError(f"m must be positive, got {self.m}")

    @property
    def q(self):
        return dual_exponent(self.p)


def lp_norm(x, p):
    """``(sum |x_l|^p)^(1/p)`` along the last axis, rescaled to avoid overflow."""
    if float(p) < 1.0:
        raise InvalidArgumentError(f"p must be >= 1, got {p}")
    a = np.abs(np.asarray(x, dtype=float))
    s = a.max(axis=-1, initial=0.0)
    safe = np.where(s > 0, s, 1.0)
    r = a / safe[..., None] if a.ndim > 1 else a / safe
    out = s * np.sum(r**p, axis=-1) ** (1.0 / p)
    return float(out) if np.ndim(out) == 0 else out


def lp_subgradient(x, p):
    """Gradient of ``|x|_p^2``: ``2 |x|_p^(2-p) (|x_l|^(p-1) sign x_l)_l``.

    Works row-wise on 2-D input.  Rows (and coordinates) equal to zero map
    to zero.  The same formula with ``q`` in place of ``p`` gives the
    gradient of the dual squared norm.
    """
    a = np.asarray(x, dtype=float)
    p = float(p)
    norm = np.asarray(lp_norm(a, p))
    safe = np.where(norm > 0, norm, 1.0)
    # Normalize first so |x_l / |x||^(p-1) stays in [0, 1].
    u = a / (safe[..., None] if a.ndim > 1 else safe)
    g = 2.0 * np.sign(u) * np.abs(u) ** (p - 1.0)
    g = g * (safe[..., None] if a.ndim > 1 else safe)
    zero = norm == 0
    if a.ndim > 1:
        g[zero] = 0.0
    elif zero:
        g = np.zeros_like(a)
    return g


def strong_convexity_constant(p):
    """Optimal modulus ``C = 2(p-1)`` of ``|.|_p^2``."""
    return 2.0 * (_check_p(p) - 1.0)


def uniform_convexity_residual(x, y, p):
    """``|y|^2 - |x|^2 - <g_p(x), y - x> - (C/2)|x - y|^2`` with ``C = 2(p-1)``; >= 0."""
    p = _check_p(p)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return (
        lp_norm(y, p) ** 2
        - lp_norm(x, p) ** 2
        - np.sum(lp_subgradient(x, p) * (y - x), axis=-1)
        - (p - 1.0) * lp_norm(x - y, p) ** 2
    )


def dual_smoothness_residual(xstar, ystar, p):
    """Smoothness slack of the dual squared norm ``|.|_q^2``; >= 0.

    Returns ``|x*|_q^2 + <y* - x*, x> + (2/C)|y* - x*|_q^2 - |y*|_q^2`` where
    ``x = g_q(x*)`` and ``2/C = 1/(p-1) = q-1``.
    """
    p = _check_p(p)
    q = dual_exponent(p)
    xs, ys = np.asarray(xstar, dtype=float), np.asarray(ystar, dtype=float)
    x = lp_subgradient(xs, q)
    return (
        lp_norm(xs, q) ** 2
        + np.sum((ys - xs) * x, axis=-1)
        + (q - 1.0) * lp_norm(ys - xs, q) ** 2
        - lp_norm(ys, q) ** 2
    )


def default_directions(m, r, n_random=64, seed=0):
    """Coordinate axes, the all-ones vector and ``n_random`` Gaussian directions,
    each scaled to unit ``l^r`` norm."""
    rng = np.random.default_rng(seed)
    Z = np.vstack([np.eye(m), np.ones((1, m)), rng.standard_normal((n_random, m))])
    return Z / lp_norm(Z, r)[:, None]


def _directions(directions, m, r):
    if directions is None:
        return default_directions(m, r)
    Z = np.atleast_2d(np.asarray(directions, dtype=float))
    if Z.shape[0] == 0 or Z.shape[1] != m:
        raise InvalidArgumentError(f"directions must be a non-empty (k, {m}) array")
    norms = lp_norm(Z, r)
    if np.any(norms == 0):
        raise InvalidArgumentError("directions must be nonzero")
    return Z / norms[:, None]


def nu_alpha_empirical(sample, mu, p, alpha, directions=None):
    """Empirical ``nu_alpha = max_z (mean_i |<g_p(X_i - mu), z>|^alpha)^(1/alpha)``.

    The maximum runs over ``directions`` rescaled to unit ``l^p`` norm.
    ``alpha = 2`` gives the local variance ``sigma_w``.
    """
    X = check_matrix_sample(sample, name="sample")
    mu = check_vector(mu, X.shape[1], name="mu")
    p = _check_p(p)
    if alpha < 1:
        raise InvalidArgumentError(f"alpha must be >= 1, got {alpha}")
    Z = _directions(directions, X.shape[1], p)
    proj = lp_subgradient(X - mu, p) @ Z.T
    moments = np.mean(np.abs(proj) ** alpha, axis=0) ** (1.0 / alpha)
    return float(moments.max())


def sigma_wm_empirical(sample, mu, q, directions=None):
    """Empirical ``sigma_{w,m}^2 = max_z mean_i <X_i - mu, z>^2`` over unit-``l^q`` directions.

    Returns the squared quantity (a second moment, not its root).
    """
    X = check_matrix_sample(sample, name="sample")
    mu = check_vector(mu, X.shape[1], name="mu")
    if float(q) < 2.0:
        raise InvalidArgumentError(f"dual exponent q must be >= 2, got {q}")
    Z = _directions(directions, X.shape[1], q)
    proj = (X - mu) @ Z.T
    return float(np.mean(proj**2, axis=0).max())


class LpSpace(MetricSpace):
    """``l^p`` backend.  ``log_map`` is plain vector difference; the tangent
    "inner product" is the polarization of ``|.|_p``, which is not bilinear
    unless ``p = 2``."""

    name = "lp"
    has_log_map = True
    is_vector_space = True

    def __init__(self, p=1.5, m=None, tol=1e-10, max_iter=500):
        self.p = p
        self.m = m
        self.tol = tol
        self.max_iter = max_iter

    def __repr__(self):
        return f"LpSpace(p={self.p}, m={self.m})"

    @property
    def q(self):
        return dual_exponent(self.p)

    def check_point(self, x):
        return check_vector(x, self.m)

    def check_sample(self, X):
        _check_p(self.p)
        return check_matrix_sample(X, self.m)

    def point_scale(self, x):
        return lp_norm(x, self.p)

    def distance(self, x, y):
        x, y = self.check_point(x), self.check_point(y)
        if x.shape != y.shape:
            raise InvalidArgumentError(f"dimension mismatch: {x.shape} vs {y.shape}")
        return lp_norm(x - y, self.p)

    def sq_dists(self, X, y):
        return lp_norm(X - y, self.p) ** 2

    def log_map(self, base, x):
        base, x = self.check_point(base), self.check_point(x)
        if base.shape != x.shape:
            raise InvalidArgumentError(f"dimension mismatch: {base.shape} vs {x.shape}")
        return TangentVector(base, x - base)

    def exp_map(self, base, v):
        return self.check_point(base) + v.vector

    def tangent_inner(self, base, u, v):
        self._check_same_base(base, u, v)
        nu, nv = lp_norm(u.vector, self.p), lp_norm(v.vector, self.p)
        nd = lp_norm(u.vector - v.vector, self.p)
        return 0.5 * (nu**2 + nv**2 - nd**2)

    def gradient(self, b, X, weights):
        """Gradient of ``b -> sum_i w_i |b - x_i|_p^2``."""
        return weights @ lp_subgradient(b - X, self.p)

    def descend(self, b, X, weights, step):
        return b - 0.5 * step * self.gradient(b, X, weights)

    def frechet_mean(self, X, weights=None):
        """Minimize ``sum_i w_i |x_i - b|_p^2`` by safeguarded Newton steps.

        The problem is solved for the offset from the weighted average, in
        units of the data spread, so the result is translation equivariant.
        When the Newton step fails the sufficient-decrease test, a step with
        secant (majorizing) curvature is tried, then backtracking.

        For ``p`` near 1 the gradient is only Holder continuous and optimal
        coordinates often coincide with data coordinates, so the gradient
        norm cannot fall much below ``eps^(p-1)``.  The solve therefore also
        counts as converged once steps shrink below ``1e-12`` of the spread.
        ``info['residual']`` is the dual norm of the final gradient in spread
        units.
        """
        X = self.check_sample(X)
        w = check_weights(weights, X.shape[0])
        p = _check_p(self.p)
        center = w @ X
        Y = X - center
        spread = float(np.sqrt(w @ lp_norm(Y, p) ** 2))
        if spread == 0.0:
            return center, {"iterations": 0, "residual": 0.0, "converged": True}
        Ys = Y / spread

        def fun(z):
            diff = z - Ys
            return w @ lp_norm(diff, p) ** 2, w @ lp_subgradient(diff, p)

        z = np.zeros(X.shape[1])
        val, grad = fun(z)
        residual = lp_norm(grad, self.q)
        converged = residual <= self.tol
        iterations = 0
        while not converged and iterations < self.max_iter:
            iterations += 1
            slope = 0.0
            for secant in (False, True):
                direction = -np.linalg.solve(self._hessian(z - Ys, w, secant), grad)
                slope = grad @ direction
                step = 1.0
                val_new, grad_new = fun(z + direction)
                if val_new <= val + 1e-4 * slope:
                    break
            else:
                while step > 1e-16:
                    step *= 0.5
                    val_new, grad_new = fun(z + step * direction)
                    if val_new <= val + 1e-4 * step * slope:
                        break
                else:
                    converged = True
                    break
            move = step * lp_norm(direction, p)
            z, val, grad = z + step * direction, val_new, grad_new
            residual = lp_norm(grad, self.q)
            converged = residual <= self.tol or move <= 1e-12
        info = {"iterations": iterations, "residual": float(residual), "converged": bool(converged)}
        return center + spread * z, info

    def _hessian(self, diff, w, secant=False):
        """Hessian of ``z -> sum_i w_i |z - y_i|_p^2`` at ``diff = z - y``.

        ``secant=True`` drops the ``p - 1`` factor on the diagonal, which
        turns the exact curvature into the one of a quadratic majorizer.
        """
        p = float(self.p)
        norm = lp_norm(diff, p)
        keep = norm > 0
        diff, norm, w = diff[keep], norm[keep], w[keep]
        u = np.abs(diff) / norm[:, None]
        if p < 2:
            curv = np.minimum(np.maximum(u, 1e-300) ** (p - 2.0), 1e200)
        else:
            curv = np.ones_like(u)
        factor = 1.0 if secant else p - 1.0
        s = np.sign(diff) * u ** (p - 1.0)
        return np.diag(2.0 * factor * (w @ curv)) + 2.0 * (2.0 - p) * (s * w[:, None]).T @ s

    def perturb(self, x, scale, rng):
        return x + scale * rng.standard_normal(x.shape)
