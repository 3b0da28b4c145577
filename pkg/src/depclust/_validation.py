"""Input validation helpers shared by the estimators and functions."""

import numpy as np
from sklearn.utils.validation import check_array

ASYMMETRY_TOL = 1e-9


def check_series(X, min_series=1, min_obs=1):
    """Validate an N x T panel (rows are series, columns are time)."""
    X = check_array(X, dtype=np.float64, ensure_2d=True, ensure_min_samples=min_series,
                    ensure_min_features=min_obs)
    return X


def check_vector(x, name="x", min_len=1):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {x.shape}")
    if x.size < min_len:
        raise ValueError(f"{name} needs at least {min_len} observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains NaN or infinite values")
    return x


def check_pair(x, y, min_len=1):
    x = check_vector(x, "x", min_len)
    y = check_vector(y, "y", min_len)
    if x.shape != y.shape:
        raise ValueError(f"x and y must have equal length, got {x.size} and {y.size}")
    return x, y


def _symmetrize(M):
    M = check_array(M, dtype=np.float64, ensure_2d=True, ensure_min_samples=1,
                    ensure_min_features=1)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    asym = np.max(np.abs(M - M.T)) if M.size else 0.0
    if asym > ASYMMETRY_TOL:
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3g})")
    return (M + M.T) / 2.0


def check_correlation(C, tol=1e-9):
    """Return a symmetrized copy of ``C`` with an exact unit diagonal.

    Entries must lie in [-1, 1] up to ``tol``; they are clipped into range.
    """
    C = _symmetrize(C)
    if np.any(np.abs(np.diag(C) - 1.0) > tol):
        raise ValueError("correlation matrix must have a unit diagonal")
    if np.any(np.abs(C) > 1.0 + tol):
        raise ValueError("correlation entries must lie in [-1, 1]")
    C = np.clip(C, -1.0, 1.0)
    np.fill_diagonal(C, 1.0)
    return C


def check_distance(D, tol=1e-9, bounded=True):
    """Return a symmetrized copy of ``D`` with an exact zero diagonal.

    ``bounded`` enforces the [0, 1] range of correlation-derived distances;
    generic dissimilarities only need to be non-negative.
    """
    D = _symmetrize(D)
    if np.any(np.abs(np.diag(D)) > tol):
        raise ValueError("distance matrix must have a zero diagonal")
    if np.any(D < -tol):
        raise ValueError("distances must be non-negative")
    if bounded and np.any(D > 1.0 + tol):
        raise ValueError("distances must lie in [0, 1]")
    D = np.clip(D, 0.0, 1.0 if bounded else None)
    np.fill_diagonal(D, 0.0)
    return D


def check_probability(value, name):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return float(value)
