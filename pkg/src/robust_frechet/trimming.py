"""Trimmed means of real-valued functions over a sample.

``trimmed_mean`` drops the ``t`` smallest and ``t`` largest values and
averages the rest.  ``trimmed_objective`` applies it to the per-point
differences ``d^2(b, x_i) - d^2(a, x_i)``, which is the quantity the
minimax Fréchet-mean estimator optimizes.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_probability
from .exceptions import InvalidArgumentError

#: p values at which nu_p is evaluated when no grid is supplied; 8 stands in for p = inf.
DEFAULT_P_GRID = (1.0, 1.5, 2.0, 3.0, 4.0, 8.0)

# Absorbs representation error so that e.g. ceil(0.05 * 100) == 5.
_ROUND_SLACK = 1e-9


def _floor(x):
    return math.floor(x + _ROUND_SLACK)


def _ceil(x):
    return math.ceil(x - _ROUND_SLACK)


def contaminated_count(n, epsilon):
    """Largest number of points an epsilon-adversary may replace: floor(epsilon * n)."""
    return _floor(epsilon * n)


def trim_count(n, epsilon, delta):
    """Trim level ``t = floor(eps n) + max(ceil(ln(2/delta)), ceil(min(eps, 1/2 - eps) n / 2))``.

    Callers must still check ``2 t < n`` before trimming.
    """
    n = int(n)
    if n < 1:
        raise InvalidArgumentError(f"n must be positive, got {n}")
    epsilon = check_probability(epsilon, "epsilon", lo_open=False, hi=0.5)
    delta = check_probability(delta, "delta")
    spread = min(epsilon, 0.5 - epsilon) / 2.0 * n
    return contaminated_count(n, epsilon) + max(_ceil(math.log(2.0 / delta)), _ceil(spread))


@dataclass(frozen=True)
class TrimConfig:
    """Sample size, contamination level, confidence and trim count.

    ``t`` defaults to :func:`trim_count`; ``2 t < n`` is enforced.
    """

    n: int
    epsilon: float = 0.0
    delta: float = 0.05
    t: int = field(default=None)

    def __post_init__(self):
        if int(self.n) < 1:
            raise InvalidArgumentError(f"n must be positive, got {self.n}")
        check_probability(self.epsilon, "epsilon", lo_open=False, hi=0.5)
        check_probability(self.delta, "delta")
        t = trim_count(self.n, self.epsilon, self.delta) if self.t is None else int(self.t)
        if t < 0:
            raise InvalidArgumentError(f"t must be nonnegative, got {t}")
        if 2 * t >= self.n:
            raise InvalidArgumentError(
                f"trim count t={t} is infeasible for n={self.n} (need 2t < n)"
            )
        object.__setattr__(self, "t", t)


def _check_t(n, t):
    t = int(t)
    if t < 0 or 2 * t >= n:
        raise InvalidArgumentError(f"need 0 <= 2t < n, got t={t}, n={n}")
    return t


def trimmed_mean(values, t):
    """Mean of the order statistics ``t+1, ..., n-t`` of ``values``.

    The kept values are selected with a partial sort and summed with
    ``math.fsum`` so the result is independent of input order.

    >>> trimmed_mean([0, 1, 2, 3, 100], 1)
    2.0
    """
    a = np.asarray(values, dtype=float).ravel()
    n = a.shape[0]
    if n == 0:
        raise InvalidArgumentError("values is empty")
    t = _check_t(n, t)
    if t == 0:
        return math.fsum(a) / n
    part = np.partition(a, (t, n - t - 1))
    return math.fsum(part[t : n - t]) / (n - 2 * t)


def trimmed_mean_rows(values, t):
    """Vectorized trimmed mean along the last axis (plain ``np.sum`` accumulation)."""
    a = np.asarray(values, dtype=float)
    n = a.shape[-1]
    t = _check_t(n, t)
    if t == 0:
        return a.mean(axis=-1)
    part = np.partition(a, (t, n - t - 1), axis=-1)
    return part[..., t : n - t].sum(axis=-1) / (n - 2 * t)


def kept_indices(values, t):
    """Indices of the ``n - 2t`` middle order statistics (lowest index wins ties)."""
    a = np.asarray(values, dtype=float)
    n = a.shape[-1]
    t = _check_t(n, t)
    order = np.argsort(a, kind="stable")
    return np.sort(order[t : n - t])


def trimmed_objective(space, sample, t, b, a):
    """Trimmed mean of ``d^2(b, x_i) - d^2(a, x_i)`` over the sample.

    Trimming acts on the differences, not on the two squared-distance
    profiles separately.  Swapping ``a`` and ``b`` flips the sign exactly.
    """
    X = space.check_sample(sample)
    diffs = space.sq_dists(X, space.check_point(b)) - space.sq_dists(X, space.check_point(a))
    return trimmed_mean(diffs, t)


def _epsilon_quotient(epsilon):
    # eps / min(eps, 1/2 - eps) is 0/0 at eps = 0; the uncontaminated case uses 0.
    if epsilon == 0.0:
        return 0.0
    return epsilon / min(epsilon, 0.5 - epsilon)


def c_epsilon(epsilon, base):
    """``base * (1 + eps / min(eps, 1/2 - eps))`` with the quotient set to 0 at eps = 0."""
    epsilon = check_probability(epsilon, "epsilon", lo_open=False, hi=0.5)
    return base * (1.0 + _epsilon_quotient(epsilon))


def _check_nu(nu):
    if not nu:
        raise InvalidArgumentError("nu must contain at least one (p, nu_p) entry")
    out = {}
    for p, v in nu.items():
        p, v = float(p), float(v)
        if p < 1 or v < 0 or math.isnan(v):
            raise InvalidArgumentError(f"invalid nu entry p={p}, nu_p={v}")
        out[p] = v
    return out


def epsilon_moment_term(nu, epsilon):
    """``min_p nu_p * eps^(1 - 1/p)`` over the supplied p values (0 when eps = 0)."""
    nu = _check_nu(nu)
    if epsilon == 0.0:
        return 0.0
    return min(v * epsilon ** (1.0 - 1.0 / p) for p, v in nu.items())


def trimmed_concentration_bound(V_n, nu, n, delta, epsilon):
    """Uniform deviation bound for trimmed means over a function class.

    Evaluates ``C_eps (8 V_n + min_{p<=2} nu_p (ln(3/delta)/n)^(1-1/p)
    + min_p nu_p eps^(1-1/p))`` with ``C_eps = 384 (1 + eps/min(eps, 1/2-eps))``.
    The infima run over the keys of ``nu`` only.
    """
    nu = _check_nu(nu)
    if V_n < 0:
        raise InvalidArgumentError(f"V_n must be nonnegative, got {V_n}")
    # Only log(3/delta) > 0 is needed, so delta may exceed 1 here.
    delta = check_probability(delta, "delta", hi=3.0)
    low = {p: v for p, v in nu.items() if p <= 2.0}
    if not low:
        raise InvalidArgumentError("nu needs at least one entry with p in [1, 2]")
    rate = math.log(3.0 / delta) / n
    confidence_term = min(v * rate ** (1.0 - 1.0 / p) for p, v in low.items())
    return c_epsilon(epsilon, 384.0) * (
        8.0 * V_n + confidence_term + epsilon_moment_term(nu, epsilon)
    )
