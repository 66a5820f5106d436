"""Numerical machinery behind the trimmed minimax estimator.

Three solvers compute ``argmin_b psi(b)`` with
``psi(b) = sup_a T_t(d^2(b, .) - d^2(a, .))``:

* ``solve_euclidean``: exact reformulation for flat space.  Writing the
  adversary as ``a = b + s v`` with ``|v| = 1`` and maximizing over ``s``
  gives ``psi(b) = phi(b)_+^2`` where
  ``phi(b) = max_v T_t(<v, X - b>)``, a maximum of affine functions of
  ``b``.  ``phi`` is minimized by a cutting-plane linear program whose
  cuts come from a direction-separation oracle (exact for ``m <= 2``).
* ``solve_alternating``: best-response iteration for any backend with a
  ``descend`` step, using a growing finite set of adversary candidates.
* ``solve_grid``: exhaustive min-max over a finite candidate set.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from ._rng import stream
from .exceptions import InvalidArgumentError
from .trimming import trimmed_mean_rows


@dataclass
class SolverConfig:
    """Tuning knobs for the minimax solvers.

    ``max_iter`` bounds cutting-plane rounds (Euclidean) or outer descent
    steps per start (alternating).  ``tol`` is the optimality gap, relative
    to the data scale, at which a solve counts as converged.
    """

    max_iter: int = 300
    tol: float = 1e-9
    seed: int = 0
    n_candidates: int = 32
    n_directions: int = 32
    subsample: int = 512
    ascent_steps: int = 25
    inner_steps: int = 2
    step0: float = 1.0
    step_decay: float = 10.0
    patience: int = 10
    starts: tuple = ("empirical", "mom", "medoid")
    solver: str = "auto"
    raise_on_failure: bool = False
    max_trace: int = 1000

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidArgumentError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1 or self.patience < 1:
            raise InvalidArgumentError("max_iter and patience must be positive")
        if self.solver not in ("auto", "lp", "alternating", "grid"):
            raise InvalidArgumentError(f"unknown solver {self.solver!r}")
        unknown = set(self.starts) - {"empirical", "mom", "medoid"}
        if unknown or not self.starts:
            raise InvalidArgumentError(f"invalid starts {self.starts!r}")


@dataclass
class EstimatorResult:
    """Estimate plus solver diagnostics.

    ``final_objective`` is the saddle value ``psi(estimate)`` for the
    trimmed estimator, the mean squared distance for the empirical mean,
    and the covering radius for median-of-means.
    """

    estimate: object
    iterations: int = 0
    final_objective: float = 0.0
    adversary_trace: list = None
    converged: bool = True
    diagnostics: dict = field(default_factory=dict)


# -- Euclidean cutting-plane solver --------------------------------------------


def _kept_rows(P, t):
    """Row indices of the middle ``n - 2t`` entries of every column of ``P``."""
    n = P.shape[0]
    if t == 0:
        return np.broadcast_to(np.arange(n)[:, None], P.shape)
    idx = np.argpartition(P, (t, n - t - 1), axis=0)
    return idx[t : n - t]


def direction_values(Z, V, t):
    """``T_t(<v, Z_i>)`` for every row ``v`` of ``V``."""
    return trimmed_mean_rows(V @ Z.T, t)


def _normalize_rows(V):
    norms = np.linalg.norm(V, axis=1)
    ok = norms > 0
    return V[ok] / norms[ok, None]


def _ascend_directions(Z, V, t, steps):
    """Fixed-point ascent ``v <- normalize(mean of Z over the kept set of <v, Z>)``.

    Returns the best direction seen along each path and its value.
    """
    n = Z.shape[0]
    best_v = V.copy()
    best_g = np.full(V.shape[0], -np.inf)
    stale = 0
    for _ in range(steps + 1):
        P = V @ Z.T
        part = np.partition(P, (t, n - t - 1), axis=1) if t else P
        g = part[:, t : n - t].sum(axis=1) / (n - 2 * t)
        better = (g > best_g + 1e-15 * np.abs(g)) | np.isinf(best_g)
        best_v[better], best_g[better] = V[better], g[better]
        stale = 0 if better.any() else stale + 1
        if stale >= 3:
            break
        if t:
            mask = (P >= part[:, [t]]) & (P <= part[:, [n - t - 1]])
            S = (mask @ Z) / mask.sum(axis=1, keepdims=True)
        else:
            S = np.broadcast_to(Z.mean(axis=0), V.shape)
        norms = np.linalg.norm(S, axis=1, keepdims=True)
        V = np.where(norms > 0, S / np.maximum(norms, np.finfo(float).tiny), V)
    return best_v, best_g


def _sweep_2d(Z, t):
    """Exact ``max_v T_t(<v, Z>)`` over unit ``v`` in the plane.

    The order of the projections only changes at angles where two points
    project equally; between consecutive such angles the trimmed mean is
    ``<v, s_K>`` for a fixed kept set ``K`` and is maximized either at an
    endpoint or at ``v = s_K / |s_K|``.
    """
    n = Z.shape[0]
    i, j = np.triu_indices(n, 1)
    d = Z[i] - Z[j]
    d = d[np.hypot(d[:, 0], d[:, 1]) > 0]
    base = np.arctan2(d[:, 1], d[:, 0]) + 0.5 * np.pi
    crit = np.unique(np.mod(np.concatenate([base, base + np.pi, [0.0]]), 2 * np.pi))
    nxt = np.append(crit[1:], crit[0] + 2 * np.pi)
    mids = 0.5 * (crit + nxt)
    U_mid = np.column_stack([np.cos(mids), np.sin(mids)])
    kept = _kept_rows(Z @ U_mid.T, t)
    S = Z[kept].mean(axis=0)
    ang = np.mod(np.arctan2(S[:, 1], S[:, 0]) - crit, 2 * np.pi)
    inside = (ang > 0) & (ang < nxt - crit) & (np.hypot(S[:, 0], S[:, 1]) > 0)
    U_crit = np.column_stack([np.cos(crit), np.sin(crit)])
    cands = np.vstack([U_crit, _normalize_rows(S[inside])]) if inside.any() else U_crit
    g = direction_values(Z, cands, t)
    k = int(np.argmax(g))
    return cands[k], float(g[k])


class _Separator:
    """Finds directions ``v`` maximizing ``T_t(<v, Y - b>)``.

    For ``m <= 2`` the search is exact.  Otherwise fixed-point ascent runs
    from many starts on a fixed subsample (at most ``cfg.subsample`` rows,
    with the trim count scaled to match), and the best directions are then
    refined on the full data.  Returned values are always exact, but for
    ``m > 2`` the maximizing direction may be missed, so ``phi`` can be
    underestimated.  Set ``cfg.subsample`` above ``n`` to search on all rows.
    """

    def __init__(self, Y, t, cfg):
        self.Y, self.t, self.cfg = Y, t, cfg
        self.n, self.m = Y.shape
        self.rng = stream(cfg.seed, "separation")
        if self.n > cfg.subsample:
            self.sub = np.sort(self.rng.choice(self.n, size=cfg.subsample, replace=False))
            self.t_sub = int(round(t * cfg.subsample / self.n))
        else:
            self.sub = None

    def __call__(self, b, active):
        Z = self.Y - b
        if self.m == 1:
            V = np.array([[1.0], [-1.0]])
            g = direction_values(Z, V, self.t)
            return V, g
        if self.m == 2:
            v, g = _sweep_2d(Z, self.t)
            return v[None, :], np.array([g])
        k = self.cfg.n_directions
        rows = self.rng.choice(self.n, size=min(self.n, k), replace=False)
        active = active[-4 * self.m :]
        starts = [
            active,
            active + 0.1 * self.rng.standard_normal(active.shape),
            Z[rows],
            self.rng.standard_normal((k, self.m)),
            Z.mean(axis=0, keepdims=True),
        ]
        V = _normalize_rows(np.vstack([s for s in starts if s.size]))
        if self.sub is None:
            return _ascend_directions(Z, V, self.t, self.cfg.ascent_steps)
        V, g = _ascend_directions(Z[self.sub], V, self.t_sub, self.cfg.ascent_steps)
        top = np.argsort(-g, kind="stable")[: 2 * self.m]
        V_top, _ = _ascend_directions(Z, V[top], self.t, 3)
        V = np.vstack([V, V_top])
        return V, direction_values(Z, V, self.t)


def _solve_lp(V, H, center=None, radius=None):
    """``min s`` subject to ``H_j - <V_j, b> <= s`` and, optionally,
    ``|b - center|_inf <= radius``; returns ``(b, s)``."""
    k, m = V.shape
    c = np.zeros(m + 1)
    c[-1] = 1.0
    A = np.hstack([-V, -np.ones((k, 1))])
    if center is None:
        bounds = [(None, None)] * (m + 1)
    else:
        bounds = [(ci - radius, ci + radius) for ci in center] + [(None, None)]
    res = linprog(
        c,
        A_ub=A,
        b_ub=-H,
        bounds=bounds,
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise InvalidArgumentError(f"cutting-plane LP failed: {res.message}")
    return res.x[:m], float(res.x[-1])


def _polish(V, H, b, s):
    """Solve the active constraints exactly when they pin down ``(b, s)``."""
    slack = s - (H - V @ b)
    active = slack <= 1e-8 * max(1.0, abs(s))
    if active.sum() < V.shape[1] + 1:
        return b
    A = np.hstack([V[active], np.ones((active.sum(), 1))])
    if np.linalg.matrix_rank(A) < V.shape[1] + 1:
        return b
    sol = np.linalg.lstsq(A, H[active], rcond=None)[0]
    return sol[:-1]


def _unique_directions(V, existing, tol=1e-12):
    keep = []
    for v in V:
        if existing.size and np.max(existing @ v) > 1.0 - tol:
            continue
        if any(float(u @ v) > 1.0 - tol for u in keep):
            continue
        keep.append(v)
    return np.array(keep).reshape(-1, V.shape[1])


def solve_euclidean(X, t, cfg):
    """Minimize ``phi(b) = max_v T_t(<v, X - b>)`` by box-stabilized cutting planes.

    Each round solves the cutting-plane LP inside an infinity-norm box
    around the best point so far, evaluates ``phi`` at the LP solution with
    the separation oracle and adds the violated directions as cuts.  The box
    doubles after a successful step that hit its boundary.  The solve stops
    once the model predicts less than ``tol`` improvement, which by
    convexity bounds the suboptimality of the center.

    Data are centered at the coordinatewise median and scaled by the median
    distance to it, which makes the result translation equivariant and the
    tolerances scale free.
    """
    n, m = X.shape
    ref = np.median(X, axis=0)
    Y = X - ref
    norms = np.linalg.norm(Y, axis=1)
    scale = float(np.median(norms)) or float(norms.max())
    if scale == 0.0:
        return EstimatorResult(ref, 0, 0.0, [], True, {"method": "lp", "gap": 0.0})
    Y = Y / scale
    V = np.vstack([np.eye(m), -np.eye(m)])
    H = direction_values(Y, V, t)
    separate = _Separator(Y, t, cfg)

    def evaluate(b):
        active = V[H - V @ b >= np.max(H - V @ b) - 1e-9]
        cand, g = separate(b, active)
        return cand, g, max(float(g.max()), float(np.max(H - V @ b)))

    center, _ = _solve_lp(V, H)
    center = _polish(V, H, center, float(np.max(H - V @ center)))
    cand, g, upper = evaluate(center)
    probe = center
    radius = 0.5
    trace, converged, it = [], False, 0
    for it in range(1, cfg.max_iter + 1):
        new = _unique_directions(_normalize_rows(cand[g > np.max(H - V @ probe) + cfg.tol]), V)
        if new.size:
            V = np.vstack([V, new])
            H = np.append(H, direction_values(Y, new, t))
        # Cuts found later can show the center was underestimated.
        upper = max(upper, float(np.max(H - V @ center)))
        b, model = _solve_lp(V, H, center, radius)
        predicted = upper - model
        if predicted <= cfg.tol:
            converged = True
            break
        cand, g, value = evaluate(b)
        probe = b
        if len(trace) < cfg.max_trace:
            k = int(np.argmax(g))
            trace.append((ref + scale * (b + value * cand[k]), (scale * max(value, 0.0)) ** 2))
        if upper - value >= 0.1 * predicted:
            on_edge = np.max(np.abs(b - center)) >= radius * (1 - 1e-9)
            center, upper = b, value
            if on_edge:
                radius *= 2.0
    lower = max(_solve_lp(V, H)[1], 0.0)
    b_pol = _polish(V, H, center, upper)
    if not np.array_equal(b_pol, center):
        _, _, value = evaluate(b_pol)
        if value <= upper:
            center, upper = b_pol, value
    phi = max(upper, 0.0)
    diagnostics = {
        "method": "lp",
        "lower_bound": (scale * lower) ** 2,
        "gap": scale * (phi - lower),
        "n_cuts": int(V.shape[0]),
        "exact_separation": m <= 2,
        "subsampled": separate.sub is not None,
    }
    return EstimatorResult(ref + scale * center, it, (scale * phi) ** 2, trace, converged, diagnostics)


def euclidean_saddle_value(X, t, b, seed=0):
    """``psi(b)`` for Euclidean data: exact for ``m <= 2``, a lower estimate otherwise."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    cfg = SolverConfig(seed=seed)
    Z = X - np.asarray(b, dtype=float).reshape(1, -1)
    sep = _Separator(X, t, cfg)
    m = X.shape[1]
    active = np.vstack([np.eye(m), -np.eye(m)])
    _, g = sep(np.asarray(b, dtype=float).reshape(-1), active)
    if m > 2:
        g = np.append(g, direction_values(Z, active, t))
    return max(float(g.max()), 0.0) ** 2


# -- alternating best response -------------------------------------------------


class _Candidates:
    """Growing set of adversary points with cached distance profiles."""

    def __init__(self, space, X):
        self.space, self.X = space, X
        self.points, self.rows = [], []

    def add(self, a, D=None):
        self.points.append(a)
        self.rows.append(self.space.sq_dists(self.X, a) if D is None else D)

    def matrix(self):
        return np.asarray(self.rows)


def _kept_weights(diff, t):
    n = diff.shape[0]
    order = np.argsort(diff, kind="stable")
    w = np.zeros(n)
    w[order[t : n - t]] = 1.0 / (n - 2 * t)
    return w


def _trimmed(diff, t):
    return float(trimmed_mean_rows(diff, t))


class _Alternating:
    def __init__(self, space, X, t, cfg, scale):
        self.space, self.X, self.t, self.cfg = space, X, t, cfg
        self.scale = scale
        self.cands = _Candidates(space, X)
        self.rng = stream(cfg.seed, "alternating")
        self.trace = []

    def psi(self, Db):
        A = self.cands.matrix()
        vals = trimmed_mean_rows(Db[None, :] - A, self.t)
        j = int(np.argmax(vals))
        return float(vals[j]), j

    def refine(self, Db, j, value):
        """Local ascent for the adversary: move ``a`` toward the Fréchet mean of its kept set."""
        a, Da = self.cands.points[j], self.cands.rows[j]
        for _ in range(self.cfg.inner_steps):
            w = _kept_weights(Db - Da, self.t)
            step, improved = 1.0, False
            for _ in range(4):
                a_new = self.space.descend(a, self.X, w, step)
                D_new = self.space.sq_dists(self.X, a_new)
                v_new = _trimmed(Db - D_new, self.t)
                if v_new > value:
                    a, Da, value, improved = a_new, D_new, v_new, True
                    self.cands.add(a, Da)
                    break
                step *= 0.5
            if not improved:
                break
        return a, Da, value

    def run(self, b):
        cfg = self.cfg
        Db = self.space.sq_dists(self.X, b)
        self.cands.add(b, Db)
        best = (np.inf, b)
        stall, it, converged = 0, 0, False
        for it in range(1, cfg.max_iter + 1):
            value, j = self.psi(Db)
            a, Da, value = self.refine(Db, j, value)
            if len(self.trace) < cfg.max_trace:
                self.trace.append((a, value))
            if value < best[0] - cfg.tol * self.scale**2:
                best, stall = (value, b), 0
            else:
                stall += 1
                if stall >= cfg.patience:
                    converged = True
                    break
            if it % 5 == 0:
                self.cands.add(self.space.perturb(a, 0.05 * self.scale, self.rng))
            step = cfg.step0 / (1.0 + it / cfg.step_decay)
            b = self.space.descend(b, self.X, _kept_weights(Db - Da, self.t), step)
            Db = self.space.sq_dists(self.X, b)
            self.cands.add(b, Db)
        return best[1], it, converged


def solve_alternating(space, X, t, cfg, starts):
    """Alternating best response from each start; the finalists are re-scored
    against the full candidate set accumulated across all starts."""
    n = space.n_points(X)
    rng = stream(cfg.seed, "candidates")
    D0 = space.sq_dists(X, starts[0])
    scale = float(np.sqrt(np.median(D0))) or float(np.sqrt(D0.max())) or 1.0
    solver = _Alternating(space, X, t, cfg, scale)
    for i in rng.choice(n, size=min(n, cfg.n_candidates), replace=False):
        solver.cands.add(space.point(X, int(i)))
    finalists, total_iter, all_converged = [], 0, True
    for b0 in starts:
        b, iters, conv = solver.run(b0)
        finalists.append(b)
        total_iter += iters
        all_converged &= conv
    scores = []
    for b in finalists:
        Db = space.sq_dists(X, b)
        value, j = solver.psi(Db)
        _, _, value = solver.refine(Db, j, value)
        scores.append(value)
    k = int(np.argmin(scores))
    diagnostics = {
        "method": "alternating",
        "start_scores": scores,
        "n_candidates": len(solver.cands.points),
    }
    return EstimatorResult(
        finalists[k], total_iter, scores[k], solver.trace, all_converged, diagnostics
    )


# -- exhaustive grid -------------------------------------------------------------


def solve_grid(space, X, t, grid, chunk=64):
    """Exact ``min_{b in grid} max_{a in grid} T_t(d^2(b, .) - d^2(a, .))``.

    Ties are broken toward the lowest grid index.
    """
    D = space.pairwise_sq_dists(X, grid).T  # (g, n)
    g = D.shape[0]
    psi = np.empty(g)
    arg = np.empty(g, dtype=int)
    for start in range(0, g, chunk):
        block = D[start : start + chunk]
        vals = trimmed_mean_rows(block[:, None, :] - D[None, :, :], t)
        arg[start : start + chunk] = np.argmax(vals, axis=1)
        psi[start : start + chunk] = vals.max(axis=1)
    k = int(np.argmin(psi))
    adversary = space.point(grid, int(arg[k]))
    return EstimatorResult(
        space.point(grid, k),
        g,
        float(psi[k]),
        [(adversary, float(psi[k]))],
        True,
        {"method": "grid", "grid_size": g, "psi": psi},
    )
