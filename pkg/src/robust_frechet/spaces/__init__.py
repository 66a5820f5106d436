"""Metric-space backends."""

from ..exceptions import InvalidArgumentError
from .base import MetricSpace, TangentVector, hugging, same_point, strong_convexity_residual
from .bures_wasserstein import (
    BuresWasserstein,
    Gaussian,
    GaussianSample,
    TransportMap,
    barycenter_fixed_point,
    hugging_lower_bound_extendible,
    hugging_lower_bound_kappa,
    spd_sqrt,
    transport_map,
    w2_distance,
)
from .euclidean import Euclidean
from .lp import (
    LpSpace,
    LpSpec,
    dual_smoothness_residual,
    lp_norm,
    lp_subgradient,
    nu_alpha_empirical,
    sigma_wm_empirical,
    strong_convexity_constant,
    uniform_convexity_residual,
)
from .sqrt_line import SqrtLine

_REGISTRY = {
    "euclidean": Euclidean,
    "lp": LpSpace,
    "bures_wasserstein": BuresWasserstein,
    "bw": BuresWasserstein,
    "sqrt_line": SqrtLine,
}


def make_space(name, **params):
    """Instantiate a backend by name (``euclidean``, ``lp``, ``bures_wasserstein``/``bw``, ``sqrt_line``)."""
    if isinstance(name, MetricSpace):
        return name
    try:
        cls = _REGISTRY[name]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown space {name!r}; expected one of {sorted(_REGISTRY)}"
        ) from None
    return cls(**params)


__all__ = [
    "BuresWasserstein",
    "Euclidean",
    "Gaussian",
    "GaussianSample",
    "LpSpace",
    "LpSpec",
    "MetricSpace",
    "SqrtLine",
    "TangentVector",
    "TransportMap",
    "barycenter_fixed_point",
    "dual_smoothness_residual",
    "hugging",
    "hugging_lower_bound_extendible",
    "hugging_lower_bound_kappa",
    "lp_norm",
    "lp_subgradient",
    "make_space",
    "nu_alpha_empirical",
    "same_point",
    "sigma_wm_empirical",
    "spd_sqrt",
    "strong_convexity_constant",
    "strong_convexity_residual",
    "transport_map",
    "uniform_convexity_residual",
    "w2_distance",
]
