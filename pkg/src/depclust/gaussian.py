"""Closed-form distances between centred Gaussians and the copula clustering demo."""

import numpy as np
import scipy.linalg

from .core import cut_dendrogram
from .linkage import cluster


def check_cov(S, name="covariance"):
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError(f"{name} contains NaN or infinite values")
    if np.max(np.abs(S - S.T)) > 1e-9 * max(1.0, np.max(np.abs(S))):
        raise ValueError(f"{name} is not symmetric")
    S = (S + S.T) / 2.0
    try:
        np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        raise ValueError(f"{name} is not positive definite") from None
    return S


def _pair(s1, s2):
    s1 = check_cov(s1, "s1")
    s2 = check_cov(s2, "s2")
    if s1.shape != s2.shape:
        raise ValueError(f"size mismatch: {s1.shape} vs {s2.shape}")
    return s1, s2


def _logdet(S):
    L = np.linalg.cholesky(S)
    return 2.0 * np.sum(np.log(np.diag(L)))


def _sqrtm_psd(S):
    lam, V = np.linalg.eigh((S + S.T) / 2.0)
    return (V * np.sqrt(np.maximum(lam, 0.0))) @ V.T


def relative_eigenvalues(s1, s2):
    """Eigenvalues of ``s1^-1 s2`` from the generalized symmetric problem."""
    s1, s2 = _pair(s1, s2)
    return scipy.linalg.eigh(s2, s1, eigvals_only=True)


def fisher_rao(s1, s2):
    lam = relative_eigenvalues(s1, s2)
    return float(np.sqrt(0.5 * np.sum(np.log(lam) ** 2)))


def kl(s1, s2):
    """KL(N(0, s1) || N(0, s2))."""
    s1, s2 = _pair(s1, s2)
    n = s1.shape[0]
    tr = np.trace(scipy.linalg.cho_solve(scipy.linalg.cho_factor(s2), s1))
    return float(max(0.5 * (_logdet(s2) - _logdet(s1) - n + tr), 0.0))


def jeffreys(s1, s2):
    return kl(s1, s2) + kl(s2, s1)


def bhattacharyya(s1, s2):
    s1, s2 = _pair(s1, s2)
    mid = (s1 + s2) / 2.0
    return float(max(0.5 * (_logdet(mid) - 0.5 * (_logdet(s1) + _logdet(s2))), 0.0))


def hellinger(s1, s2):
    """``1 - BC`` with BC the Bhattacharyya coefficient ``|s1|^1/4 |s2|^1/4 / |s|^1/2``.

    This is the squared Hellinger distance; see :func:`hellinger_distance`
    for its square root.
    """
    return float(-np.expm1(-bhattacharyya(s1, s2)))


def hellinger_distance(s1, s2):
    return float(np.sqrt(hellinger(s1, s2)))


def w2(s1, s2):
    """Wasserstein-2 distance between N(0, s1) and N(0, s2)."""
    s1, s2 = _pair(s1, s2)
    r1 = _sqrtm_psd(s1)
    cross = _sqrtm_psd(r1 @ s2 @ r1)
    return float(np.sqrt(max(np.trace(s1 + s2 - 2.0 * cross), 0.0)))


METRICS = {
    "fisher_rao": fisher_rao,
    "kl": kl,
    "jeffreys": jeffreys,
    "hellinger": hellinger,
    "bhattacharyya": bhattacharyya,
    "w2": w2,
}


def correlation_2x2(rho):
    return np.array([[1.0, rho], [rho, 1.0]])


DEMO_CORRELATIONS = (0.1, 0.2, 0.6, 0.7, 0.99, 0.9999)


def gaussian_distance_matrix(covs, metric="w2"):
    """Pairwise metric matrix; KL is symmetrized by averaging both directions."""
    fn = METRICS[metric]
    k = len(covs)
    D = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            v = fn(covs[i], covs[j])
            if metric == "kl":
                v = 0.5 * (v + fn(covs[j], covs[i]))
            D[i, j] = D[j, i] = v
    return D


def _sampled_covs(correlations, T, seed):
    from .correlation import correlation_matrix
    from .hcbm import make_rng

    covs = []
    for idx, rho in enumerate(correlations):
        rng = make_rng(seed, idx)
        C = correlation_2x2(rho)
        X = np.linalg.cholesky(C) @ rng.standard_normal((2, T))
        covs.append(correlation_matrix(X, "pearson"))
    return covs


def copula_cluster_demo(correlations=DEMO_CORRELATIONS, metric="fisher_rao",
                        linkage="ward", k=3, sampled=False, T=10_000, seed=0,
                        return_distances=False):
    """Cluster bivariate Gaussian copulas by a closed-form distance.

    Distances are divided by their maximum before clustering. With
    ``sampled=True`` each copula's correlation matrix is re-estimated from
    ``T`` draws instead of taken exactly.

    Returns the :class:`Partition` of the copulas, plus the normalized
    distance matrix when ``return_distances`` is set.
    """
    correlations = [float(r) for r in correlations]
    if len(correlations) < k:
        raise ValueError(f"need at least k={k} copulas, got {len(correlations)}")
    if any(not -1.0 < r < 1.0 for r in correlations):
        raise ValueError("correlations must lie in (-1, 1)")
    if sampled:
        covs = _sampled_covs(correlations, T, seed)
    else:
        covs = [correlation_2x2(r) for r in correlations]
    D = gaussian_distance_matrix(covs, metric)
    top = D.max()
    if top > 0:
        D = D / top
    p = cut_dendrogram(cluster(D, linkage), k)
    return (p, D) if return_distances else p
