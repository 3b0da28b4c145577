"""Copula transform and the dependence/distribution distance d_theta."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_pair, check_probability, check_series, check_vector
from .correlation import midranks


class EmpiricalMargin:
    """Empirical CDF ``G(x) = #{t : x_t <= x} / T``."""

    def __init__(self, values):
        self.sorted_values = np.sort(check_vector(values, "values"))

    def __call__(self, x):
        t = self.sorted_values.size
        return np.searchsorted(self.sorted_values, x, side="right") / t


def empirical_copula_transform(X):
    """Replace every row of an N x T panel by its normalized ranks ``rank / T``.

    Ties get their midrank.
    """
    X = check_series(X)
    return np.stack([midranks(row) for row in X]) / X.shape[1]


class CopulaTransform(TransformerMixin, BaseEstimator):
    """Stateless transformer applying :func:`empirical_copula_transform` row-wise."""

    def fit(self, X, y=None):
        check_series(X)
        return self

    def transform(self, X):
        return empirical_copula_transform(X)


def d1_empirical(x_ranks, y_ranks):
    """Rank distance ``sqrt(3 / (T (T^2 - 1)) * sum (rx - ry)^2)`` on raw ranks 1..T.

    Equals ``sqrt((1 - spearman) / 2)`` for tie-free data.
    """
    rx, ry = check_pair(x_ranks, y_ranks, min_len=2)
    t = rx.size
    d = rx - ry
    d1sq = 3.0 * np.dot(d, d) / (t * (t * t - 1.0))
    return float(np.sqrt(min(max(d1sq, 0.0), 1.0)))


def freedman_diaconis(x, y=None):
    """Freedman-Diaconis bin width of the pooled sample."""
    pooled = np.asarray(x, dtype=np.float64)
    if y is not None:
        pooled = np.concatenate([pooled, np.asarray(y, dtype=np.float64)])
    q75, q25 = np.percentile(pooled, [75, 25])
    h = 2.0 * (q75 - q25) / np.cbrt(pooled.size)
    if h > 0:
        return float(h)
    spread = np.ptp(pooled)
    return float(spread / np.sqrt(pooled.size)) if spread > 0 else 1.0


def resolve_bandwidth(h, x, y=None):
    if h is None or h == "auto":
        return freedman_diaconis(x, y)
    h = float(h)
    if not h > 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    return h


class HistogramDensity:
    """Histogram with bins ``[origin + k h, origin + (k + 1) h)``.

    ``bins`` and ``counts`` list the occupied bins only.
    """

    def __init__(self, values, h, origin=0.0):
        values = check_vector(values, "values")
        if not h > 0:
            raise ValueError(f"bandwidth must be positive, got {h}")
        self.h = float(h)
        self.origin = float(origin)
        self.total = values.size
        k = np.floor((values - self.origin) / self.h).astype(np.int64)
        self.bins, self.counts = np.unique(k, return_counts=True)

    def mass(self):
        return self.counts / self.total

    def mass_on(self, bins):
        out = np.zeros(len(bins))
        pos = np.searchsorted(bins, self.bins)
        out[pos] = self.mass()
        return out


def hellinger_histograms(gx, gy):
    if gx.h != gy.h or gx.origin != gy.origin:
        raise ValueError("histograms must share bandwidth and origin")
    bins = np.union1d(gx.bins, gy.bins)
    px = gx.mass_on(bins)
    py = gy.mass_on(bins)
    d0sq = 0.5 * np.sum((np.sqrt(px) - np.sqrt(py)) ** 2)
    return float(np.sqrt(min(d0sq, 1.0)))


def d0_empirical(x, y, h="auto", origin=0.0):
    """Hellinger distance between histograms of ``x`` and ``y`` on a shared grid.

    ``h="auto"`` uses the Freedman-Diaconis width of the pooled sample.
    """
    x = check_vector(x, "x")
    y = check_vector(y, "y")
    h = resolve_bandwidth(h, x, y)
    return hellinger_histograms(HistogramDensity(x, h, origin), HistogramDensity(y, h, origin))


def d_theta(x, y, theta=0.5, h="auto"):
    """``sqrt(theta d1^2 + (1 - theta) d0^2)``: rank dependence mixed with margin distance."""
    theta = check_probability(theta, "theta")
    x, y = check_pair(x, y, min_len=2)
    d1 = d1_empirical(midranks(x), midranks(y)) if theta > 0 else 0.0
    d0 = d0_empirical(x, y, h) if theta < 1 else 0.0
    return float(np.sqrt(theta * d1**2 + (1.0 - theta) * d0**2))


def d_theta_matrix(X, theta=0.5, h="auto"):
    """N x N matrix of :func:`d_theta` between the rows of a panel."""
    X = check_series(X, min_obs=2)
    n = X.shape[0]
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = d_theta(X[i], X[j], theta, h)
    return D


def d_theta_gaussian(mu1, sigma1, mu2, sigma2, rho_s, theta=0.5):
    """Closed-form ``d_theta`` between two Gaussians with Spearman correlation ``rho_s``."""
    theta = check_probability(theta, "theta")
    if not (sigma1 > 0 and sigma2 > 0):
        raise ValueError("standard deviations must be positive")
    s2 = sigma1**2 + sigma2**2
    bc = np.sqrt(2.0 * sigma1 * sigma2 / s2) * np.exp(-0.25 * (mu1 - mu2) ** 2 / s2)
    return float(np.sqrt(theta * (1.0 - rho_s) / 2.0 + (1.0 - theta) * (1.0 - bc)))


def l2_gaussian(mu1, sigma1, mu2, sigma2, rho):
    """``E[(X - Y)^2]`` for a bivariate Gaussian with correlation ``rho``."""
    if sigma1 < 0 or sigma2 < 0:
        raise ValueError("standard deviations must be non-negative")
    return float((mu1 - mu2) ** 2 + (sigma1 - sigma2) ** 2 + 2.0 * sigma1 * sigma2 * (1.0 - rho))


def spearman_from_pearson(rho):
    """Spearman's rho of a Gaussian copula with linear correlation ``rho``."""
    return 6.0 / np.pi * np.arcsin(np.asarray(rho) / 2.0)


def kendall_from_pearson(rho):
    """Kendall's tau of an elliptical copula with linear correlation ``rho``."""
    return 2.0 / np.pi * np.arcsin(np.asarray(rho))
