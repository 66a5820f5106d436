"""Closed-form error radii for the estimators.

The constants (928, 23, 8) are far too loose to predict errors
quantitatively; these evaluators exist to overlay the predicted shapes
(rates in ``n``, ``epsilon`` and ``delta``) on simulation output.  The
sub-Gaussian bounds carry an unspecified absolute constant, exposed as
``abs_const_C`` (default 1), so only their scaling is meaningful.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from ._validation import check_probability
from .exceptions import HypothesisViolationError, InvalidArgumentError
from .spaces.bures_wasserstein import hugging_lower_bound_extendible, hugging_lower_bound_kappa
from .trimming import c_epsilon, contaminated_count, epsilon_moment_term

GEODESIC_BASE = 928.0
# The formulas only need log(3/delta) > 0, so evaluators accept delta < 3.
DELTA_MAX = 3.0
BANACH_VARIANCE_FACTOR = 23.0
MOM_FACTOR = 8.0


@dataclass(frozen=True)
class BoundInputs:
    """Parameters shared by the radius evaluators.

    The curvature modulus is taken from ``k_min`` if given, else from
    ``(alpha, beta)``, else from ``(kappa0, kappa1)``.  ``C_X`` is the
    strong-convexity constant used by :func:`radius_banach`.
    """

    n: int
    delta: float
    epsilon: float = 0.0
    global_variance: float = 0.0
    sigma_w: float = 0.0
    nu: dict = field(default_factory=dict)
    k_min: Optional[float] = None
    C_X: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    kappa0: Optional[float] = None
    kappa1: Optional[float] = None
    subgaussian_L: float = 1.0
    abs_const_C: float = 1.0

    def __post_init__(self):
        if int(self.n) < 1:
            raise InvalidArgumentError(f"n must be positive, got {self.n}")
        check_probability(self.delta, "delta", hi=DELTA_MAX)
        check_probability(self.epsilon, "epsilon", lo_open=False, hi=0.5)
        for name in ("global_variance", "sigma_w", "subgaussian_L", "abs_const_C"):
            value = getattr(self, name)
            if not value >= 0:
                raise InvalidArgumentError(f"{name} must be nonnegative, got {value}")
        for p, v in self.nu.items():
            if float(p) < 1 or not float(v) >= 0:
                raise InvalidArgumentError(f"invalid nu entry p={p}, nu_p={v}")

    def resolved_k_min(self):
        if self.k_min is not None:
            return float(self.k_min)
        if self.alpha is not None and self.beta is not None:
            return hugging_lower_bound_extendible(self.alpha, self.beta).k_min
        if self.kappa0 is not None and self.kappa1 is not None:
            return hugging_lower_bound_kappa(self.kappa0, self.kappa1)
        raise InvalidArgumentError("need k_min, (alpha, beta) or (kappa0, kappa1)")


def c_epsilon_geodesic(epsilon):
    """``928 (1 + eps / min(eps, 1/2 - eps))``; the quotient is 0 at ``eps = 0``."""
    return c_epsilon(epsilon, GEODESIC_BASE)


def _positive_k_min(inp):
    k_min = inp.resolved_k_min()
    if not k_min > 0:
        raise InvalidArgumentError(f"k_min must be positive, got {k_min}")
    return k_min


def _epsilon_term(inp):
    """``min_p nu_p eps^(1 - 1/p)`` with ``sigma_w`` standing in for ``nu_2``."""
    nu = {2.0: inp.sigma_w}
    for p, v in inp.nu.items():
        p = float(p)
        nu[p] = min(nu[p], float(v)) if p in nu else float(v)
    return epsilon_moment_term(nu, inp.epsilon)


def _confidence_term(inp):
    return math.sqrt(inp.sigma_w**2 * math.log(3.0 / inp.delta) / inp.n)


def _check_trim(inp):
    n, eps = inp.n, inp.epsilon
    spread = min(eps, 0.5 - eps) / 2.0 * n
    t = contaminated_count(n, eps) + max(
        math.ceil(math.log(2.0 / inp.delta) - 1e-9), math.ceil(spread - 1e-9), 0
    )
    if 2 * t >= n:
        raise InvalidArgumentError(f"no admissible trim count: t={t} needs 2t < n={n}")


def radius_geodesic(inp):
    """Trimmed-estimator radius in a geodesic space with hugging bound ``k_min``:
    ``(C_eps/k_min) (8 sqrt(E d^2/n) + sqrt(sigma_w^2 ln(3/delta)/n) + eps-term)``."""
    k_min = _positive_k_min(inp)
    _check_trim(inp)
    return (c_epsilon_geodesic(inp.epsilon) / k_min) * (
        8.0 * math.sqrt(inp.global_variance / inp.n) + _confidence_term(inp) + _epsilon_term(inp)
    )


def radius_geodesic_subgaussian(inp):
    """Empirical-mean radius for ``L``-sub-Gaussian data (shape only):
    ``(L C/k_min) (sqrt(E d^2/n) + sqrt(sigma_w^2 ln(3/delta)/n))``.

    Requires ``delta >= exp(-n)``.
    """
    k_min = _positive_k_min(inp)
    if inp.delta < math.exp(-inp.n):
        raise HypothesisViolationError(
            f"delta={inp.delta} is below exp(-n)={math.exp(-inp.n):.3g}"
        )
    return (inp.subgaussian_L * inp.abs_const_C / k_min) * (
        math.sqrt(inp.global_variance / inp.n) + _confidence_term(inp)
    )


def radius_banach(inp):
    """Trimmed-estimator radius in a Banach space of power type 2 with constant ``C_X``:
    ``(C_eps/C_X) (23 sqrt(E|X-mu|^2/(C_X n)) + sqrt(sigma_w^2 ln(3/delta)/n) + eps-term)``."""
    if inp.C_X is None or not inp.C_X > 0:
        raise InvalidArgumentError(f"C_X must be positive, got {inp.C_X}")
    _check_trim(inp)
    return (c_epsilon_geodesic(inp.epsilon) / inp.C_X) * (
        BANACH_VARIANCE_FACTOR * math.sqrt(inp.global_variance / (inp.C_X * inp.n))
        + _confidence_term(inp)
        + _epsilon_term(inp)
    )


def radius_mom(R_ell):
    """Median-of-means radius ``8 R(ell)`` given the block-mean error level ``R(ell)``."""
    if not R_ell >= 0:
        raise InvalidArgumentError(f"R_ell must be nonnegative, got {R_ell}")
    return MOM_FACTOR * R_ell


class MomBlocks(NamedTuple):
    k: int
    ell: int


def mom_block_size(n, delta):
    """``k = ceil(8 ln(1/delta))`` blocks of ``ell = floor(n/k)`` points."""
    delta = check_probability(delta, "delta")
    k = math.ceil(8.0 * math.log(1.0 / delta) - 1e-9)
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"need 1 <= k <= n, got k={k}, n={n}")
    return MomBlocks(k, n // k)


def epsilon_term_subgaussian(L, epsilon, sigma_w, abs_const_C=1.0):
    """``C L eps sqrt(ln(3/eps)) sigma_w`` (0 at ``eps = 0``; shape only)."""
    epsilon = check_probability(epsilon, "epsilon", lo_open=False, hi=0.5)
    if epsilon == 0.0:
        return 0.0
    return abs_const_C * L * epsilon * math.sqrt(math.log(3.0 / epsilon)) * sigma_w


def bound_table(inp, R_ell=None):
    """Every evaluator that applies to ``inp``, keyed by name.

    Evaluators whose inputs are missing or whose hypotheses fail map to the
    error message instead of a number.
    """
    rows = {"c_epsilon_geodesic": lambda: c_epsilon_geodesic(inp.epsilon)}
    rows["radius_geodesic"] = lambda: radius_geodesic(inp)
    rows["radius_geodesic_subgaussian"] = lambda: radius_geodesic_subgaussian(inp)
    rows["radius_banach"] = lambda: radius_banach(inp)
    rows["epsilon_term_subgaussian"] = lambda: epsilon_term_subgaussian(
        inp.subgaussian_L, inp.epsilon, inp.sigma_w, inp.abs_const_C
    )
    rows["mom_blocks"] = lambda: tuple(mom_block_size(inp.n, inp.delta))
    if R_ell is not None:
        rows["radius_mom"] = lambda: radius_mom(R_ell)
    out = {}
    for name, fn in rows.items():
        try:
            out[name] = fn()
        except (InvalidArgumentError, HypothesisViolationError) as err:
            out[name] = f"n/a ({err})"
    return out
