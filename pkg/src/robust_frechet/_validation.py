"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

import numpy as np

from .exceptions import InvalidArgumentError

SPD_RTOL = 1e-10


def check_vector(x, dim=None, name="x"):
    """Return ``x`` as a finite 1-D float array, optionally of length ``dim``."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InvalidArgumentError(f"{name} must be a vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise InvalidArgumentError(f"{name} has dimension {arr.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} contains non-finite values")
    return arr


def check_matrix_sample(X, dim=None, name="X"):
    """Return ``X`` as a finite (n, m) float array with n >= 1."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim in (None, 1) else arr.reshape(1, -1)
    if arr.ndim != 2:
        raise InvalidArgumentError(f"{name} must be 2-D (n_samples, dim), got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise InvalidArgumentError(f"{name} is empty")
    if dim is not None and arr.shape[1] != dim:
        raise InvalidArgumentError(f"{name} has dimension {arr.shape[1]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} contains non-finite values")
    return arr


def check_spd(V, name="cov"):
    """Symmetrize ``V`` and verify it is positive definite.

    Accepts ``V`` when the smallest eigenvalue of ``(V + V.T) / 2`` exceeds
    ``SPD_RTOL * max(1, largest eigenvalue)``.  Works on stacks of matrices.
    """
    arr = np.asarray(V, dtype=float)
    if arr.ndim < 2 or arr.shape[-1] != arr.shape[-2]:
        raise InvalidArgumentError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} contains non-finite values")
    sym = 0.5 * (arr + np.swapaxes(arr, -1, -2))
    w = np.linalg.eigvalsh(sym)
    lo = w[..., 0]
    hi = w[..., -1]
    if np.any(lo <= SPD_RTOL * np.maximum(1.0, hi)):
        raise InvalidArgumentError(f"{name} is not symmetric positive definite")
    return sym


def check_probability(x, name, lo_open=True, hi_open=True, lo=0.0, hi=1.0):
    x = float(x)
    ok_lo = x > lo if lo_open else x >= lo
    ok_hi = x < hi if hi_open else x <= hi
    if not (ok_lo and ok_hi and np.isfinite(x)):
        lb = "(" if lo_open else "["
        rb = ")" if hi_open else "]"
        raise InvalidArgumentError(f"{name}={x} outside {lb}{lo}, {hi}{rb}")
    return x


def check_weights(weights, n):
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise InvalidArgumentError(f"weights must have shape ({n},), got {w.shape}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InvalidArgumentError("weights must be finite and nonnegative")
    total = w.sum()
    if abs(total - 1.0) > 1e-9:
        raise InvalidArgumentError(f"weights must sum to 1, got {total!r}")
    return w
