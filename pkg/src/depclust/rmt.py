"""Marchenko-Pastur spectrum checks and hierarchical filtering of correlations."""

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_correlation, check_distance
from .core import cophenetic_matrix, leaf_order
from .correlation import to_distance
from .linkage import cluster


@dataclass(frozen=True)
class MpParams:
    q: float
    lambda_min: float
    lambda_max: float

    @classmethod
    def from_ratio(cls, q):
        if not q > 0:
            raise ValueError(f"q = N/T must be positive, got {q}")
        r = 2.0 * np.sqrt(q)
        return cls(float(q), float(max(1.0 + q - r, 0.0)), float(1.0 + q + r))

    @classmethod
    def from_shape(cls, n, t):
        return cls.from_ratio(n / t)


def mp_density(lam, q):
    """Marchenko-Pastur eigenvalue density for aspect ratio ``q = N/T``.

    Zero outside the support. For ``q >= 1`` the point mass at zero is not
    represented.
    """
    p = MpParams.from_ratio(q)
    lam = np.asarray(lam, dtype=np.float64)
    inside = (lam > p.lambda_min) & (lam < p.lambda_max) & (lam > 0)
    safe = np.where(inside, lam, 1.0)
    out = np.where(
        inside,
        np.sqrt(np.abs((p.lambda_max - safe) * (safe - p.lambda_min))) / (2.0 * np.pi * q * safe),
        0.0,
    )
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    params: MpParams
    n_below: int
    n_inside: int
    n_above: int

    @property
    def fraction_inside(self):
        return self.n_inside / self.eigenvalues.size

    def to_dict(self):
        return {
            "n": int(self.eigenvalues.size),
            "q": self.params.q,
            "lambda_min": self.params.lambda_min,
            "lambda_max": self.params.lambda_max,
            "n_below": self.n_below,
            "n_inside": self.n_inside,
            "n_above": self.n_above,
            "fraction_inside": self.fraction_inside,
            "eigenvalues": self.eigenvalues.tolist(),
        }


def spectrum(C, T):
    """Eigenvalues of a correlation matrix counted against the MP support."""
    C = check_correlation(C)
    n = C.shape[0]
    if T < n:
        warnings.warn(f"T={T} < N={n}: the MP support lower edge sits at 0", stacklevel=2)
    lam = np.linalg.eigvalsh(C)
    lam = np.where((lam < 0) & (lam >= -1e-10), 0.0, lam)
    p = MpParams.from_shape(n, T)
    below = int(np.sum(lam < p.lambda_min))
    above = int(np.sum(lam > p.lambda_max))
    return SpectrumReport(lam, p, below, n - below - above, above)


def mantegna_filter(C, linkage="average"):
    """Replace each correlation by the one implied by its dendrogram merge height.

    ``rho_ij <- 1 - 2 h_ij`` where ``h_ij`` is the height at which ``i`` and
    ``j`` first share a cluster when ``(1 - rho) / 2`` is clustered.
    """
    C = check_correlation(C)
    d = cluster(to_distance(C), linkage)
    F = 1.0 - 2.0 * cophenetic_matrix(d)
    np.fill_diagonal(F, 1.0)
    return np.clip(F, -1.0, 1.0)


def _as_distance(M):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim == 2 and M.shape[0] and np.allclose(np.diag(M), 1.0):
        return to_distance(M)
    return check_distance(M, bounded=False)


def seriate(M, linkage="average"):
    """Reorder a correlation or distance matrix by dendrogram leaf order.

    Returns ``(M[perm][:, perm], perm)``.
    """
    M = np.asarray(M, dtype=np.float64)
    perm = leaf_order(cluster(_as_distance(M), linkage))
    return M[np.ix_(perm, perm)], perm


class MantegnaFilter(TransformerMixin, BaseEstimator):
    """Hierarchical filtering of a correlation matrix.

    ``fit`` records the dendrogram, seriation order and the smallest
    eigenvalue of the filtered matrix (``min_eigenvalue_``; negative values
    are reported, not corrected). ``transform`` filters its input.
    """

    def __init__(self, linkage="average"):
        self.linkage = linkage

    def fit(self, X, y=None):
        C = check_correlation(X)
        self.dendrogram_ = cluster(to_distance(C), self.linkage)
        self.permutation_ = leaf_order(self.dendrogram_)
        F = 1.0 - 2.0 * cophenetic_matrix(self.dendrogram_)
        np.fill_diagonal(F, 1.0)
        self.min_eigenvalue_ = float(np.linalg.eigvalsh(F)[0])
        return self

    def transform(self, X):
        check_is_fitted(self, "dendrogram_")
        return mantegna_filter(X, self.linkage)
