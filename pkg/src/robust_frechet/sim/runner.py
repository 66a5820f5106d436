"""Monte-Carlo sweeps: one CSV row per (cell, trial, estimator).

Seeds are derived as ``cell_seed = hash64(seed, n, bits(eps), bits(delta),
m, estimator)`` and ``trial_seed = hash64(cell_seed, trial)``; the trial
seed drives data generation, contamination and solver multi-starts, so a
row depends on nothing but its coordinates.  Work units run on a process
pool and rows are written in task order, so results do not depend on the
worker count.
"""

import concurrent.futures
import csv
import datetime
import io
import math
import os
import time
from dataclasses import dataclass, replace

import numpy as np

from .. import bounds as B
from .._rng import hash64
from ..datagen import contaminate, population_global_variance, sample, true_mean
from ..estimators import empirical_frechet_mean, mom_frechet_mean, trimmed_frechet_mean
from ..exceptions import ConvergenceError, FrechetError
from ..spaces import make_space
from ..spaces.bures_wasserstein import _sqrt_eig
from ..spaces.lp import nu_alpha_empirical, strong_convexity_constant
from ..trimming import TrimConfig
from .config import base_estimator

HEADER = (
    "space,family,m,n,epsilon,delta,estimator,trial,seed,error,"
    "runtime_ms,status,iterations,theory_radius"
).split(",")
THREADS_ENV = "ROBUST_FRECHET_THREADS"

# Monte-Carlo size for variance proxies that have no closed form.
_PROXY_DRAWS = 20000


@dataclass(frozen=True)
class Task:
    position: int
    m: int
    n: int
    epsilon: float
    delta: float
    estimator: str
    trial: int

    def cell(self):
        return (self.m, self.n, self.epsilon, self.delta, self.estimator)


def tasks(cfg):
    """All work units in output order: ``m, n, epsilon, delta, estimator, trial``."""
    out = []
    for m in cfg.m:
        for n in cfg.n:
            for eps in cfg.epsilon:
                for delta in cfg.delta:
                    for est in cfg.estimators:
                        for trial in range(cfg.trials):
                            out.append(Task(len(out), m, n, eps, delta, est, trial))
    return out


def cell_seed(master, task):
    return hash64(master, task.n, float(task.epsilon), float(task.delta), task.m, task.estimator)


def trial_seed(master, task):
    return hash64(cell_seed(master, task), task.trial)


def fmt(x):
    """CSV number formatting: integers verbatim, floats with 17 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


# -- theory overlay ---------------------------------------------------------------

_proxy_cache = {}


def _tangent_proxies(cfg, m):
    """``(global variance, sigma_w)`` at the population mean.

    Euclidean families use closed forms.  The ``l^p`` and Bures-Wasserstein
    values come from a fixed-seed Monte-Carlo sample.
    """
    key = (cfg.space, tuple(sorted(cfg.space_params.items())), repr(cfg.distribution), m)
    if key in _proxy_cache:
        return _proxy_cache[key]
    dist = cfg.distribution_spec(m)
    mu = true_mean(dist)
    if cfg.space in ("euclidean", "sqrt_line"):
        result = (population_global_variance(dist), math.sqrt(dist.coordinate_variance()))
    elif cfg.space == "lp":
        space = make_space("lp", **cfg.space_params)
        X = sample(dist, _PROXY_DRAWS, hash64(0, "proxies", m))
        glob = float(np.mean(space.sq_dists(X, mu)))
        result = (glob, nu_alpha_empirical(X, mu, space.p, 2.0))
    else:
        # At N(a, cI) the tangent vector of N(x, S) embeds isometrically as
        # (x - a, S^(1/2) - sqrt(c) I) with the Frobenius product.
        S = sample(dist, _PROXY_DRAWS, hash64(0, "proxies", m))
        roots = _sqrt_eig(S.covs).reshape(len(S), -1)
        emb = np.hstack([S.means - mu.mean, roots - roots.mean(axis=0)])
        top = float(np.linalg.eigvalsh(np.cov(emb, rowvar=False))[-1])
        result = (population_global_variance(dist), math.sqrt(max(top, 0.0)))
    _proxy_cache[key] = result
    return result


def theory_radius(cfg, task, n_blocks=None):
    """Predicted error radius for the row, or NaN when no evaluator applies.

    Trimmed: the geodesic (Euclidean, Bures-Wasserstein) or Banach
    (``l^p``) radius.  Empirical: the sub-Gaussian radius, only for Gaussian
    families.  Median-of-means: ``8 sqrt(E d^2 / ell)`` in Euclidean space,
    which bounds ``8 R(ell)`` by Jensen's inequality.
    """
    if cfg.space == "sqrt_line":
        return math.nan
    dist = cfg.distribution_spec(task.m)
    glob, sigma_w = _tangent_proxies(cfg, task.m)
    extra = dict(cfg.bounds)
    if cfg.space == "bures_wasserstein":
        extra.setdefault("kappa0", dist.kappa0)
        extra.setdefault("kappa1", dist.kappa1)
    elif cfg.space == "euclidean":
        extra.setdefault("k_min", 1.0)
    elif cfg.space == "lp":
        extra.setdefault("C_X", strong_convexity_constant(cfg.space_params.get("p", 1.5)))
    est = base_estimator(task.estimator)
    eps = 0.0 if task.estimator.endswith("_clean") else task.epsilon
    try:
        inp = B.BoundInputs(task.n, task.delta, eps, glob, sigma_w, **extra)
        if est == "trimmed":
            return B.radius_banach(inp) if cfg.space == "lp" else B.radius_geodesic(inp)
        if est == "empirical":
            if dist.family not in ("gaussian", "gaussian_bw") or cfg.space == "lp":
                return math.nan
            return B.radius_geodesic_subgaussian(inp)
        if cfg.space == "euclidean" and n_blocks:
            return B.radius_mom(math.sqrt(glob / (task.n // n_blocks)))
    except FrechetError:
        pass
    return math.nan


# -- one trial ---------------------------------------------------------------------


def _run_estimator(space, data, task, cfg, seed):
    est = base_estimator(task.estimator)
    if est == "empirical":
        return empirical_frechet_mean(space, data)
    if est == "mom":
        return mom_frechet_mean(space, data, task.delta)
    eps = 0.0 if task.estimator.endswith("_clean") else task.epsilon
    solver_cfg = replace(cfg.solver_config(), seed=seed)
    trim = TrimConfig(space.n_points(data), eps, task.delta)
    return trimmed_frechet_mean(space, data, trim, solver_cfg)


def simulate(cfg, task):
    """Generate data for ``task`` and run its estimator.

    Returns ``(result, error, status, seed)``.  ``status`` is ``ok``,
    ``not_converged`` (error of the best iterate) or ``failed`` (error NaN).
    """
    seed = trial_seed(cfg.seed, task)
    rng = np.random.default_rng(seed)
    space = make_space(cfg.space, **cfg.space_params)
    dist = cfg.distribution_spec(task.m)
    clean = sample(dist, task.n, rng)
    corrupted = contaminate(clean, cfg.contamination_spec(task.epsilon), rng)
    data = clean if task.estimator.endswith("_clean") else corrupted
    if cfg.space == "sqrt_line":
        data = np.asarray(data)[:, 0]
    mu = true_mean(dist)
    if cfg.space == "sqrt_line":
        mu = float(mu[0])
    try:
        result = _run_estimator(space, data, task, cfg, seed)
        status = "ok" if result.converged else "not_converged"
    except ConvergenceError as err:
        result, status = err.result, "not_converged"
    except FrechetError:
        return None, math.nan, "failed", seed
    if result is None:
        return None, math.nan, "failed", seed
    return result, space.distance(result.estimate, mu), status, seed


def run_task(cfg, task, timestamps=True):
    """One CSV row (a list of strings) for ``task``."""
    start = time.perf_counter()
    result, error, status, seed = simulate(cfg, task)
    elapsed = (time.perf_counter() - start) * 1000.0 if timestamps else 0.0
    n_blocks = result.diagnostics.get("n_blocks") if result is not None else None
    row = [
        cfg.space,
        cfg.distribution.get("family", "gaussian"),
        task.m,
        task.n,
        float(task.epsilon),
        float(task.delta),
        task.estimator,
        task.trial,
        seed,
        float(error),
        float(elapsed),
        status,
        result.iterations if result is not None else 0,
        float(theory_radius(cfg, task, n_blocks)),
    ]
    return [fmt(v) for v in row]


def _run_chunk(args):
    cfg, chunk, timestamps = args
    return [run_task(cfg, t, timestamps) for t in chunk]


def resolve_threads(threads=None):
    if threads is None:
        threads = os.environ.get(THREADS_ENV, "1")
    try:
        threads = int(threads)
    except ValueError:
        raise ValueError(f"thread count must be an integer, got {threads!r}") from None
    return max(1, threads)


def execute(cfg, todo, threads=1, timestamps=True):
    """Run ``todo`` and yield ``(task, row)`` in task order."""
    if threads <= 1 or len(todo) <= 1:
        for task in todo:
            yield task, run_task(cfg, task, timestamps)
        return
    # Chunk by cell so a worker reuses its per-process caches.
    chunks, current = [], []
    for task in todo:
        if current and current[-1].cell() != task.cell():
            chunks.append(current)
            current = []
        current.append(task)
    if current:
        chunks.append(current)
    with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
        jobs = ((cfg, chunk, timestamps) for chunk in chunks)
        for chunk, rows in zip(chunks, pool.map(_run_chunk, jobs)):
            yield from zip(chunk, rows)


def _row_key(row):
    # (m, n, epsilon, delta, estimator, trial) as written.
    return tuple(row[2:8])


def _task_key(task):
    return (
        fmt(task.m), fmt(task.n), fmt(float(task.epsilon)), fmt(float(task.delta)),
        task.estimator, fmt(task.trial),
    )


def _read_existing(path):
    """Rows of a previous run keyed by coordinates; empty if absent or unreadable."""
    if not os.path.exists(path):
        return {}
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(lines)
    if next(reader, None) != HEADER:
        return {}
    return {_row_key(row): row for row in reader if len(row) == len(HEADER)}


def sweep(cfg, out, threads=1, timestamps=True, resume=False):
    """Run every cell and write the CSV to ``out``.

    With ``resume``, cells whose trials are all present in an existing
    ``out`` with status ``ok`` are kept verbatim and the rest are
    recomputed.  Returns the list of row lists (without header).
    """
    todo = tasks(cfg)
    keep = {}
    if resume:
        existing = _read_existing(out)
        by_cell = {}
        for task in todo:
            by_cell.setdefault(task.cell(), []).append(task)
        for cell_tasks in by_cell.values():
            rows = [existing.get(_task_key(t)) for t in cell_tasks]
            if all(r is not None and r[11] == "ok" for r in rows):
                keep.update({t.position: r for t, r in zip(cell_tasks, rows)})
    rows = dict(keep)
    for task, row in execute(cfg, [t for t in todo if t.position not in keep], threads, timestamps):
        rows[task.position] = row
    ordered = [rows[t.position] for t in todo]
    buf = io.StringIO()
    if timestamps:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        buf.write(f"# generated {stamp}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    writer.writerows(ordered)
    tmp = f"{out}.tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(buf.getvalue())
    os.replace(tmp, out)
    return ordered


def read_results(path):
    """Load a sweep CSV as a list of dicts with numeric columns converted."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    ints = ("m", "n", "trial", "seed", "iterations")
    floats = ("epsilon", "delta", "error", "runtime_ms", "theory_radius")
    for row in rows:
        for k in ints:
            row[k] = int(row[k])
        for k in floats:
            row[k] = float(row[k])
    return rows
