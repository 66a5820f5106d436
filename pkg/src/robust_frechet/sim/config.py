"""Experiment configuration files.

A config is a TOML document::

    seed = 7
    trials = 50
    estimators = ["empirical", "trimmed", "mom"]
    out = "results.csv"

    [space]
    name = "euclidean"        # euclidean | lp | bures_wasserstein | sqrt_line
    # p = 1.5                 # lp only

    [distribution]
    family = "student_t"      # gaussian | student_t | pareto_symmetric | gaussian_bw
    dof = 2.5

    [contamination]
    strategy = "far_point"
    magnitude = 1e6

    [sweep]
    n = [250, 500, 1000]
    epsilon = [0.0, 0.05]
    delta = [0.05]
    m = [16]

    [solver]                  # optional SolverConfig overrides
    max_iter = 300

    [bounds]                  # optional overlay parameters
    abs_const_C = 1.0

Unknown keys anywhere are errors.  An estimator name may carry a
``_clean`` suffix, which runs it on the uncontaminated sample.
"""

import dataclasses
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .._solvers import SolverConfig
from ..datagen import ContaminationSpec, DistributionSpec
from ..exceptions import FrechetError

ESTIMATORS = ("empirical", "trimmed", "mom")
SPACES = ("euclidean", "lp", "bures_wasserstein", "sqrt_line")


class ConfigError(FrechetError, ValueError):
    """Malformed or inconsistent experiment configuration."""


_TOP_KEYS = {"seed", "trials", "estimators", "out", "space", "distribution",
             "contamination", "sweep", "solver", "bounds"}
_SPACE_KEYS = {"name", "p"}
_DIST_KEYS = {f.name for f in dataclasses.fields(DistributionSpec)} - {"m"}
_CONTAM_KEYS = {f.name for f in dataclasses.fields(ContaminationSpec)} - {"epsilon"}
_SWEEP_KEYS = {"n", "epsilon", "delta", "m"}
_SOLVER_KEYS = {f.name for f in dataclasses.fields(SolverConfig)}
_BOUND_KEYS = {"k_min", "C_X", "abs_const_C", "subgaussian_L"}


def _check_keys(table, allowed, where):
    if not isinstance(table, dict):
        raise ConfigError(f"{where}: expected a table, got {type(table).__name__}")
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {unknown}; allowed: {sorted(allowed)}")


def base_estimator(name):
    return name[: -len("_clean")] if name.endswith("_clean") else name


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    space: str
    space_params: dict
    distribution: dict
    contamination: dict
    estimators: tuple
    n: tuple
    epsilon: tuple
    delta: tuple
    m: tuple
    trials: int = 1
    seed: int = 0
    out: str = None
    solver: dict = dataclasses.field(default_factory=dict)
    bounds: dict = dataclasses.field(default_factory=dict)

    def distribution_spec(self, m):
        return DistributionSpec(m=m, **self.distribution)

    def contamination_spec(self, epsilon):
        return ContaminationSpec(epsilon=epsilon, **self.contamination)

    def solver_config(self):
        return SolverConfig(**self.solver)

    def with_overrides(self, seed=None, out=None):
        changes = {}
        if seed is not None:
            changes["seed"] = int(seed)
        if out is not None:
            changes["out"] = str(out)
        return dataclasses.replace(self, **changes)


def _axis(sweep, key, kind):
    values = sweep.get(key)
    if values is None:
        raise ConfigError(f"sweep.{key}: missing")
    if not isinstance(values, list):
        values = [values]
    if not values:
        raise ConfigError(f"sweep.{key}: must be non-empty")
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"sweep.{key}: expected numbers, got {v!r}")
        if kind is int and v != int(v):
            raise ConfigError(f"sweep.{key}: expected integers, got {v!r}")
        out.append(kind(v))
    return tuple(out)


def parse_config(doc):
    """Validate a decoded TOML document and build an :class:`ExperimentConfig`."""
    _check_keys(doc, _TOP_KEYS, "config")
    for key in ("space", "distribution", "sweep"):
        if key not in doc:
            raise ConfigError(f"config: missing [{key}] table")
    space = doc["space"]
    _check_keys(space, _SPACE_KEYS, "space")
    name = space.get("name")
    if name not in SPACES:
        raise ConfigError(f"space.name: expected one of {SPACES}, got {name!r}")
    space_params = {k: v for k, v in space.items() if k != "name"}
    if "p" in space_params and name != "lp":
        raise ConfigError("space.p: only valid for the lp space")

    dist = doc["distribution"]
    _check_keys(dist, _DIST_KEYS, "distribution")
    contam = doc.get("contamination", {})
    _check_keys(contam, _CONTAM_KEYS, "contamination")
    sweep = doc["sweep"]
    _check_keys(sweep, _SWEEP_KEYS, "sweep")
    solver = doc.get("solver", {})
    _check_keys(solver, _SOLVER_KEYS, "solver")
    if "starts" in solver:
        solver = dict(solver, starts=tuple(solver["starts"]))
    bounds = doc.get("bounds", {})
    _check_keys(bounds, _BOUND_KEYS, "bounds")

    estimators = doc.get("estimators", ["empirical", "trimmed"])
    if isinstance(estimators, str):
        estimators = [estimators]
    if not estimators:
        raise ConfigError("estimators: must be non-empty")
    for e in estimators:
        if not isinstance(e, str) or base_estimator(e) not in ESTIMATORS:
            raise ConfigError(f"estimators: unknown estimator {e!r}; expected {ESTIMATORS}")

    trials = doc.get("trials", 1)
    seed = doc.get("seed", 0)
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
        raise ConfigError(f"trials: expected a positive integer, got {trials!r}")
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed: expected a nonnegative integer, got {seed!r}")

    cfg = ExperimentConfig(
        space=name,
        space_params=space_params,
        distribution=dict(dist),
        contamination=dict(contam),
        estimators=tuple(estimators),
        n=_axis(sweep, "n", int),
        epsilon=_axis(sweep, "epsilon", float) if "epsilon" in sweep else (0.0,),
        delta=_axis(sweep, "delta", float) if "delta" in sweep else (0.05,),
        m=_axis(sweep, "m", int) if "m" in sweep else (1,),
        trials=trials,
        seed=seed,
        out=doc.get("out"),
        solver=dict(solver),
        bounds=dict(bounds),
    )
    _check_consistency(cfg)
    return cfg


def _check_consistency(cfg):
    try:
        for m in cfg.m:
            dist = cfg.distribution_spec(m)
            if (dist.family == "gaussian_bw") != (cfg.space == "bures_wasserstein"):
                raise ConfigError(
                    f"distribution.family {dist.family!r} does not produce {cfg.space} samples"
                )
        if cfg.space == "sqrt_line" and cfg.m != (1,):
            raise ConfigError("sweep.m: the sqrt_line space is one-dimensional")
        for eps in cfg.epsilon:
            cfg.contamination_spec(eps)
        cfg.solver_config()
    except ConfigError:
        raise
    except (FrechetError, TypeError, ValueError) as err:
        raise ConfigError(str(err)) from None


def load_config(path):
    """Read and validate a config file.  Raises :class:`ConfigError`;
    TOML syntax errors report the line and column."""
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as err:
            raise ConfigError(f"{path}: {err}") from None
    return parse_config(doc)
