"""Pearson, Spearman and Kendall estimators and correlation distances."""

from enum import Enum

import numba
import numpy as np

from ._validation import check_correlation, check_pair, check_series


class CorrelationKind(str, Enum):
    PEARSON = "pearson"
    SPEARMAN = "spearman"
    KENDALL = "kendall"


class UndefinedCorrelationError(ValueError):
    """Raised when a coefficient is undefined, e.g. a constant series."""


def pearson(x, y):
    """Sample Pearson correlation of two equal-length vectors."""
    x, y = check_pair(x, y, min_len=2)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = np.dot(xc, xc)
    syy = np.dot(yc, yc)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("Pearson correlation undefined: zero variance")
    r = np.dot(xc, yc) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


def midranks(x):
    """Ranks 1..T of ``x``, tied values sharing their average rank."""
    x = np.asarray(x, dtype=np.float64)
    return _twice_midranks(x) / 2.0


def _twice_midranks(x):
    # doubled midranks are integers, which keeps rank sums exact
    order = np.argsort(x, kind="stable")
    xs = x[order]
    t = x.size
    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    ends = np.r_[starts[1:], t]
    doubled = np.empty(t, dtype=np.int64)
    doubled[order] = np.repeat(starts + ends + 1, ends - starts)
    return doubled


def _spearman_from_doubled(rx2, ry2):
    t = rx2.shape[-1]
    d = rx2 - ry2
    ssd4 = int(np.dot(d, d))  # 4 * sum of squared rank differences, exact
    return 1.0 - 6.0 * (ssd4 / 4.0) / (t * (t * t - 1.0))


def spearman(x, y):
    """Spearman's rho as ``1 - 6 sum(d^2) / (T (T^2 - 1))`` on midranks."""
    x, y = check_pair(x, y, min_len=2)
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise UndefinedCorrelationError("Spearman correlation undefined: constant series")
    return _spearman_from_doubled(_twice_midranks(x), _twice_midranks(y))


@numba.njit(cache=True)
def _count_inversions(a, buf):
    # bottom-up merge sort; counts pairs i < j with a[i] > a[j] (ties not counted)
    n = a.size
    inv = 0
    width = 1
    src = a
    dst = buf
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i = lo
            j = mid
            k = lo
            while i < mid and j < hi:
                if src[i] <= src[j]:
                    dst[k] = src[i]
                    i += 1
                else:
                    dst[k] = src[j]
                    inv += mid - i
                    j += 1
                k += 1
            while i < mid:
                dst[k] = src[i]
                i += 1
                k += 1
            while j < hi:
                dst[k] = src[j]
                j += 1
                k += 1
        src, dst = dst, src
        width *= 2
    return inv


@numba.njit(cache=True)
def _tied_pairs(sorted_vals):
    total = 0
    run = 1
    for i in range(1, sorted_vals.size):
        if sorted_vals[i] == sorted_vals[i - 1]:
            run += 1
        else:
            total += run * (run - 1) // 2
            run = 1
    return total + run * (run - 1) // 2


def kendall_numerator(x, y):
    """Integer ``sum_{i<j} sign((x_i - x_j)(y_i - y_j))`` in O(T log T)."""
    x, y = check_pair(x, y, min_len=1)
    t = x.size
    order = np.lexsort((y, x))
    xs = x[order]
    ys = y[order]
    x_ties = _tied_pairs(xs)
    # pairs tied in both coordinates are consecutive after the lexsort
    xy_ties = 0
    same = (xs[1:] == xs[:-1]) & (ys[1:] == ys[:-1])
    if same.any():
        starts = np.flatnonzero(np.r_[True, ~same])
        runs = np.diff(np.r_[starts, t])
        xy_ties = int(np.sum(runs * (runs - 1) // 2))
    ys = np.ascontiguousarray(ys)
    y_ties = _tied_pairs(np.sort(y))
    discordant = _count_inversions(ys.copy(), np.empty_like(ys))
    n0 = t * (t - 1) // 2
    return int(n0 - x_ties - y_ties + xy_ties - 2 * discordant)


def kendall(x, y):
    """Kendall's tau-a: the pairwise sign sum divided by ``C(T, 2)``."""
    x, y = check_pair(x, y, min_len=2)
    t = x.size
    return kendall_numerator(x, y) / (t * (t - 1) / 2)


_PAIRWISE = {
    CorrelationKind.PEARSON: pearson,
    CorrelationKind.SPEARMAN: spearman,
    CorrelationKind.KENDALL: kendall,
}


def _pearson_matrix(X):
    Xc = X - X.mean(axis=1, keepdims=True)
    ss = np.einsum("ij,ij->i", Xc, Xc)
    bad = np.flatnonzero(ss == 0.0)
    if bad.size:
        raise UndefinedCorrelationError(f"Pearson correlation undefined: series {bad[0]} is constant")
    Z = Xc / np.sqrt(ss)[:, None]
    return Z @ Z.T


def _spearman_matrix(X):
    for i, row in enumerate(X):
        if np.all(row == row[0]):
            raise UndefinedCorrelationError(f"Spearman correlation undefined: series {i} is constant")
    R2 = np.stack([_twice_midranks(row) for row in X])
    t = X.shape[1]
    sq = np.einsum("ij,ij->i", R2, R2)
    ssd4 = sq[:, None] + sq[None, :] - 2 * (R2 @ R2.T)
    return 1.0 - 6.0 * (ssd4 / 4.0) / (t * (t * t - 1.0))


def _kendall_matrix(X):
    n, t = X.shape
    C = np.eye(n)
    denom = t * (t - 1) / 2
    for i in range(n):
        for j in range(i + 1, n):
            C[i, j] = C[j, i] = kendall_numerator(X[i], X[j]) / denom
    return C


def correlation_matrix(X, kind="pearson"):
    """N x N correlation matrix of the rows of an N x T panel.

    Pearson and Spearman are vectorised; Spearman sums are integer exact
    so every entry matches :func:`spearman` bit for bit.
    """
    kind = CorrelationKind(kind)
    X = check_series(X, min_series=1, min_obs=2)
    if kind is CorrelationKind.PEARSON:
        C = _pearson_matrix(X)
    elif kind is CorrelationKind.SPEARMAN:
        C = _spearman_matrix(X)
    else:
        C = _kendall_matrix(X)
    C = np.clip((C + C.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(C, 1.0)
    return C


def pairwise_correlation(X, kind="pearson"):
    """Reference builder calling the scalar estimator on every pair."""
    kind = CorrelationKind(kind)
    X = check_series(X, min_series=1, min_obs=2)
    fn = _PAIRWISE[kind]
    n = X.shape[0]
    C = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            try:
                C[i, j] = C[j, i] = fn(X[i], X[j])
            except UndefinedCorrelationError as exc:
                raise UndefinedCorrelationError(f"pair ({i}, {j}): {exc}") from None
    return C


def to_distance(C):
    """Map correlations to distances ``(1 - rho) / 2``."""
    C = check_correlation(C)
    D = np.clip((1.0 - C) / 2.0, 0.0, 1.0)
    np.fill_diagonal(D, 0.0)
    return D


def correlation_distance(X, kind="pearson"):
    return to_distance(correlation_matrix(X, kind))
