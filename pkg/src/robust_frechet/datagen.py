"""Sample generators and contamination adversaries for simulations.

Vector families (``gaussian``, ``student_t``, ``pareto_symmetric``) draw
i.i.d. coordinates around ``mean`` and return ``(n, m)`` arrays; they serve
the Euclidean, ``l^p`` and square-root-line backends.  ``gaussian_bw``
draws Gaussian measures with means ``N(mean, mean_scale^2 I)`` and
covariances ``Q diag(u) Q^T`` for Haar-random ``Q`` and ``u`` uniform on
``[kappa0, kappa1]``, returned as a :class:`GaussianSample`.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import check_probability
from .exceptions import InvalidArgumentError
from .spaces.bures_wasserstein import Gaussian, GaussianSample
from .trimming import contaminated_count

VECTOR_FAMILIES = ("gaussian", "student_t", "pareto_symmetric")
FAMILIES = VECTOR_FAMILIES + ("gaussian_bw",)
STRATEGIES = ("far_point", "cluster", "replace_with")


def _as_rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


@dataclass(frozen=True)
class DistributionSpec:
    """Law of one observation.

    ``dof`` (Student-t) and ``tail_index`` (symmetric Pareto) must exceed 2
    so that second moments exist.  ``scale`` multiplies the centered draw;
    ``mean`` is a scalar (broadcast) or a length-``m`` vector.
    """

    family: str = "gaussian"
    m: int = 1
    mean: object = 0.0
    scale: float = 1.0
    dof: Optional[float] = None
    tail_index: Optional[float] = None
    kappa0: float = 1.0
    kappa1: float = 1.0
    mean_scale: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidArgumentError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if int(self.m) < 1:
            raise InvalidArgumentError(f"m must be positive, got {self.m}")
        if not self.scale >= 0 or not self.mean_scale >= 0:
            raise InvalidArgumentError("scale and mean_scale must be nonnegative")
        if self.family == "student_t" and not (self.dof is not None and self.dof > 2):
            raise InvalidArgumentError(f"student_t needs dof > 2, got {self.dof}")
        if self.family == "pareto_symmetric" and not (
            self.tail_index is not None and self.tail_index > 2
        ):
            raise InvalidArgumentError(f"pareto_symmetric needs tail_index > 2, got {self.tail_index}")
        if self.family == "gaussian_bw" and not 0 < self.kappa0 <= self.kappa1:
            raise InvalidArgumentError(
                f"need 0 < kappa0 <= kappa1, got [{self.kappa0}, {self.kappa1}]"
            )
        mean = np.broadcast_to(np.asarray(self.mean, dtype=float), (int(self.m),)).copy()
        if not np.isfinite(mean).all():
            raise InvalidArgumentError("mean must be finite")
        mean.setflags(write=False)
        object.__setattr__(self, "mean", mean)

    @property
    def space(self):
        return "bures_wasserstein" if self.family == "gaussian_bw" else "euclidean"

    def coordinate_variance(self):
        """Variance of one coordinate of a vector family."""
        if self.family == "gaussian":
            v = 1.0
        elif self.family == "student_t":
            v = self.dof / (self.dof - 2.0)
        elif self.family == "pareto_symmetric":
            v = self.tail_index / (self.tail_index - 2.0)
        else:
            raise InvalidArgumentError("coordinate_variance is defined for vector families only")
        return self.scale**2 * v


def haar_orthogonal(m, size, rng):
    """``size`` Haar-distributed orthogonal ``m x m`` matrices (QR of Gaussians, sign-corrected)."""
    Q, R = np.linalg.qr(rng.standard_normal((size, m, m)))
    signs = np.sign(np.diagonal(R, axis1=1, axis2=2))
    signs[signs == 0] = 1.0
    return Q * signs[:, None, :]


def sample(dist, n, rng):
    """``n`` i.i.d. draws from ``dist``."""
    n = int(n)
    if n < 1:
        raise InvalidArgumentError(f"n must be positive, got {n}")
    rng = _as_rng(rng)
    m = dist.m
    if dist.family == "gaussian":
        Z = rng.standard_normal((n, m))
    elif dist.family == "student_t":
        Z = rng.standard_t(dist.dof, (n, m))
    elif dist.family == "pareto_symmetric":
        # numpy's pareto is the Lomax law; shifting by 1 gives Pareto with minimum 1.
        Z = (rng.pareto(dist.tail_index, (n, m)) + 1.0) * rng.choice([-1.0, 1.0], (n, m))
    else:
        means = dist.mean + dist.mean_scale * rng.standard_normal((n, m))
        Q = haar_orthogonal(m, n, rng)
        u = rng.uniform(dist.kappa0, dist.kappa1, (n, m))
        covs = (Q * u[:, None, :]) @ np.swapaxes(Q, 1, 2)
        return GaussianSample(means, 0.5 * (covs + np.swapaxes(covs, 1, 2)))
    return dist.mean + dist.scale * Z


def _mean_sqrt_uniform(k0, k1):
    if k1 == k0:
        return math.sqrt(k0)
    return (2.0 / 3.0) * (k1**1.5 - k0**1.5) / (k1 - k0)


def true_mean(dist):
    """Population Fréchet mean.

    Vector families are symmetric about ``mean``.  For ``gaussian_bw``,
    rotation invariance forces the barycenter covariance to be ``c I``, and
    the fixed-point equation gives ``c = (E sqrt(u))^2``.
    """
    if dist.family != "gaussian_bw":
        return np.array(dist.mean)
    c = _mean_sqrt_uniform(dist.kappa0, dist.kappa1) ** 2
    return Gaussian(np.array(dist.mean), c * np.eye(dist.m))


def population_global_variance(dist):
    """``E d^2(X, mu)`` for the population mean ``mu``.

    For ``gaussian_bw`` this is ``m (mean_scale^2 + E u - (E sqrt(u))^2)``.
    """
    if dist.family != "gaussian_bw":
        return dist.m * dist.coordinate_variance()
    k0, k1 = dist.kappa0, dist.kappa1
    return dist.m * (dist.mean_scale**2 + 0.5 * (k0 + k1) - _mean_sqrt_uniform(k0, k1) ** 2)


def euclidean_variance_proxies(source):
    """``(trace, top eigenvalue)`` of the covariance.

    ``source`` is a :class:`DistributionSpec` of a vector family (population
    values) or an ``(n, m)`` sample with ``n >= 2`` (empirical covariance).
    """
    if isinstance(source, DistributionSpec):
        v = source.coordinate_variance()
        return source.m * v, v
    X = np.asarray(source, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 2:
        raise InvalidArgumentError(f"need an (n, m) sample with n >= 2, got shape {X.shape}")
    C = np.atleast_2d(np.cov(X, rowvar=False))
    eig = np.linalg.eigvalsh(C)
    return float(np.trace(C)), float(max(eig[-1], 0.0))


@dataclass(frozen=True)
class ContaminationSpec:
    """An epsilon-adversary.

    ``far_point`` sends every corrupted point to one location at distance
    ``magnitude`` from the clean empirical mean, along a random direction.
    ``cluster`` scatters them as ``center + spread * N(0, I)``.
    ``replace_with`` sets them all to ``point``.  For Gaussian samples the
    recipes act on the means and corrupted covariances are the identity,
    except ``replace_with`` which takes a Gaussian or a ``(mean, cov)`` pair.
    """

    epsilon: float = 0.0
    strategy: str = "far_point"
    magnitude: float = 1e6
    center: object = None
    spread: float = 1.0
    point: object = None
    stream: str = "contamination"

    def __post_init__(self):
        check_probability(self.epsilon, "epsilon", lo_open=False, hi=0.5)
        if self.strategy not in STRATEGIES:
            raise InvalidArgumentError(
                f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}"
            )
        if self.strategy == "replace_with" and self.point is None:
            raise InvalidArgumentError("replace_with needs a point")
        if not self.spread >= 0 or not math.isfinite(self.magnitude):
            raise InvalidArgumentError("spread must be nonnegative and magnitude finite")


def _unit_vector(m, rng):
    v = rng.standard_normal(m)
    return v / np.linalg.norm(v)


def _replacement_vectors(X, spec, k, rng):
    m = X.shape[1]
    if spec.strategy == "far_point":
        target = X.mean(axis=0) + spec.magnitude * _unit_vector(m, rng)
        return np.tile(target, (k, 1))
    if spec.strategy == "cluster":
        center = np.zeros(m) if spec.center is None else np.broadcast_to(spec.center, (m,))
        return center + spec.spread * rng.standard_normal((k, m))
    return np.tile(np.broadcast_to(np.asarray(spec.point, dtype=float), (m,)), (k, 1))


def _replacement_gaussians(S, spec, k, rng):
    m = S.dim
    if spec.strategy == "replace_with":
        g = spec.point if isinstance(spec.point, Gaussian) else Gaussian(*spec.point)
        return np.tile(g.mean, (k, 1)), np.tile(g.cov, (k, 1, 1))
    means = _replacement_vectors(S.means, spec, k, rng)
    return means, np.tile(np.eye(m), (k, 1, 1))


def contaminate(data, spec, rng, return_indices=False):
    """Replace exactly ``floor(epsilon n)`` uniformly chosen points.

    ``data`` is an array of vectors (or scalars) or a :class:`GaussianSample`;
    it is not modified.  With ``return_indices`` the replaced positions are
    returned too, sorted.
    """
    rng = _as_rng(rng)
    is_gauss = isinstance(data, GaussianSample)
    n = len(data)
    k = contaminated_count(n, spec.epsilon)
    idx = np.sort(rng.choice(n, size=k, replace=False)) if k else np.array([], dtype=int)
    if is_gauss:
        means, covs = np.array(data.means), np.array(data.covs)
        if k:
            means[idx], covs[idx] = _replacement_gaussians(data, spec, k, rng)
        out = GaussianSample(means, covs)
    else:
        arr = np.array(data, dtype=float)
        flat = arr.ndim == 1
        X = arr[:, None] if flat else arr
        if k:
            X[idx] = _replacement_vectors(X, spec, k, rng)
        out = X[:, 0] if flat else X
    return (out, idx) if return_indices else out
