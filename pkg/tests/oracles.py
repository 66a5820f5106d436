"""Independent reference computations shared by the estimator tests."""

import numpy as np

from robust_frechet.spaces import Euclidean
from robust_frechet.trimming import trimmed_mean_rows


def box_grid(X, per_axis, margin=0.5):
    """Regular grid over the bounding box of ``X`` padded by ``margin`` times its width."""
    X = np.asarray(X, dtype=float)
    lo, hi = X.min(axis=0), X.max(axis=0)
    pad = margin * np.maximum(hi - lo, 1e-3)
    axes = [np.linspace(l - p, h + p, per_axis) for l, h, p in zip(lo, hi, pad)]
    mesh = np.meshgrid(*axes, indexing="ij")
    G = np.column_stack([g.ravel() for g in mesh])
    spacing = max(float(a[1] - a[0]) for a in axes)
    return G, spacing


def adversary_value(X, t, b, A):
    """``max_{a in A} T_t(|b - x|^2 - |a - x|^2)`` by direct evaluation."""
    X = np.asarray(X, dtype=float)
    Db = np.sum((X - b) ** 2, axis=1)
    DA = np.sum((X[None, :, :] - A[:, None, :]) ** 2, axis=2)
    return float(trimmed_mean_rows(Db[None, :] - DA, t).max())


def grid_slack(X, G, spacing):
    """Lipschitz slack for replacing a continuous point by its nearest grid point.

    ``a -> T_t(|b-x|^2 - |a-x|^2)`` is ``2 D``-Lipschitz on the grid box,
    where ``D`` bounds ``|a - x|``; the nearest grid point is within
    ``spacing sqrt(m) / 2``.
    """
    m = G.shape[1]
    D = np.max(np.linalg.norm(G[:, None, :] - np.asarray(X)[None, :, :], axis=2))
    r = spacing * np.sqrt(m) / 2
    return 2 * D * r + r**2


def euclidean_space():
    return Euclidean()
