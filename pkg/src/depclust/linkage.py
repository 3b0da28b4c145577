"""Lance-Williams agglomerative clustering and separability checks."""

from enum import Enum

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_distance
from .core import Dendrogram, NestedPartition, as_partition, cut_dendrogram, leaf_order


class LinkageKind(str, Enum):
    SINGLE = "single"
    COMPLETE = "complete"
    AVERAGE = "average"
    MCQUITTY = "mcquitty"
    MEDIAN = "median"
    CENTROID = "centroid"
    WARD = "ward"

    def coefficients(self, ni, nj, nk):
        """``(alpha_i, alpha_j, beta, gamma)`` for cluster sizes ``|Ci|, |Cj|, |Ck|``.

        ``nk`` may be an array; the result then broadcasts over it.
        """
        ni = float(ni)
        nj = float(nj)
        nk = np.asarray(nk, dtype=np.float64)
        zero = np.zeros_like(nk)
        if self is LinkageKind.SINGLE:
            return 0.5 + zero, 0.5 + zero, zero, -0.5 + zero
        if self is LinkageKind.COMPLETE:
            return 0.5 + zero, 0.5 + zero, zero, 0.5 + zero
        if self is LinkageKind.AVERAGE:
            return ni / (ni + nj) + zero, nj / (ni + nj) + zero, zero, zero
        if self is LinkageKind.MCQUITTY:
            return 0.5 + zero, 0.5 + zero, zero, zero
        if self is LinkageKind.MEDIAN:
            return 0.5 + zero, 0.5 + zero, -0.25 + zero, zero
        if self is LinkageKind.CENTROID:
            s = ni + nj
            return ni / s + zero, nj / s + zero, -ni * nj / s**2 + zero, zero
        total = ni + nj + nk
        return (ni + nk) / total, (nj + nk) / total, -nk / total, zero

    @property
    def space_conserving(self):
        return self in _SPACE_CONSERVING

    @property
    def monotone(self):
        return self not in (LinkageKind.MEDIAN, LinkageKind.CENTROID)


_SPACE_CONSERVING = frozenset(
    [LinkageKind.SINGLE, LinkageKind.COMPLETE, LinkageKind.AVERAGE, LinkageKind.MCQUITTY]
)


def lw_update(linkage, d_ik, d_jk, d_ij, sizes=(1, 1, 1)):
    """Distance from ``Ci u Cj`` to ``Ck`` by the Lance-Williams recurrence."""
    ai, aj, beta, gamma = LinkageKind(linkage).coefficients(*sizes)
    d_ik = np.asarray(d_ik, dtype=np.float64)
    d_jk = np.asarray(d_jk, dtype=np.float64)
    out = ai * d_ik + aj * d_jk + beta * d_ij + gamma * np.abs(d_ik - d_jk)
    return float(out) if out.ndim == 0 else out


def is_space_conserving_update(linkage, d_ik, d_jk, d_ij, sizes=(1, 1, 1), tol=1e-12):
    """True iff the update stays within ``[min(d_ik, d_jk), max(d_ik, d_jk)]``."""
    v = lw_update(linkage, d_ik, d_jk, d_ij, sizes)
    return bool(min(d_ik, d_jk) - tol <= v <= max(d_ik, d_jk) + tol)


def cluster(D, linkage="average"):
    """Agglomerate the points of distance matrix ``D`` into a :class:`Dendrogram`.

    At each step the closest pair of current clusters is merged; equal
    distances are resolved by the smallest cluster id, then the second
    smallest. Merge heights are the merged distances, updated by the
    Lance-Williams recurrence on ``D`` as given (no squaring for Ward).
    Negative updates, possible for median and centroid, are clamped to 0.
    """
    linkage = LinkageKind(linkage)
    D = check_distance(D, bounded=False)
    n = D.shape[0]
    merges = np.zeros((max(n - 1, 0), 4))
    if n == 1:
        return Dendrogram(1, merges)

    W = D.copy()
    np.fill_diagonal(W, np.inf)
    active = np.ones(n, dtype=bool)
    ids = np.arange(n)
    sizes = np.ones(n, dtype=np.int64)
    nn_val = W.min(axis=1)
    nn_idx = W.argmin(axis=1)

    for s in range(n - 1):
        m = nn_val[active].min()
        cand = np.flatnonzero(active & (nn_val == m))
        if cand.size == 2:
            a, b = cand
        else:
            rows, cols = np.nonzero(W[np.ix_(cand, cand)] == m)
            lo = np.minimum(ids[cand[rows]], ids[cand[cols]])
            hi = np.maximum(ids[cand[rows]], ids[cand[cols]])
            best = np.lexsort((hi, lo))[0]
            a, b = cand[rows[best]], cand[cols[best]]
        i, j = (a, b) if ids[a] < ids[b] else (b, a)
        merges[s] = (ids[i], ids[j], m, sizes[i] + sizes[j])

        others = np.flatnonzero(active)
        others = others[(others != i) & (others != j)]
        if others.size:
            ai, aj, beta, gamma = linkage.coefficients(sizes[i], sizes[j], sizes[others])
            d_ik = W[i, others]
            d_jk = W[j, others]
            new = ai * d_ik + aj * d_jk + beta * m + gamma * np.abs(d_ik - d_jk)
            if not linkage.monotone:
                new = np.maximum(new, 0.0)
            W[i, others] = new
            W[others, i] = new
        W[j, :] = np.inf
        W[:, j] = np.inf
        active[j] = False
        nn_val[j] = np.inf
        sizes[i] += sizes[j]
        ids[i] = n + s

        if others.size:
            stale = others[(nn_idx[others] == i) | (nn_idx[others] == j)]
            fresh = others[np.isin(others, stale, invert=True)]
            closer = fresh[new[np.searchsorted(others, fresh)] < nn_val[fresh]]
            nn_val[closer] = W[closer, i]
            nn_idx[closer] = i
            for k in np.r_[stale, i]:
                nn_idx[k] = np.argmin(W[k])
                nn_val[k] = W[k, nn_idx[k]]
        else:
            nn_val[i] = np.inf

    return Dendrogram(n, merges)


def _intra_inter(D, labels):
    same = labels[:, None] == labels[None, :]
    off = ~np.eye(labels.size, dtype=bool)
    intra = D[same & off]
    inter = D[~same]
    return intra, inter


def check_separability(D, p):
    """Strict separability: max intra-block distance < min inter-block distance."""
    p = as_partition(p)
    D = np.asarray(D, dtype=np.float64)
    if p.n_blocks < 2:
        raise ValueError("separability needs at least two blocks")
    intra, inter = _intra_inter(D, p.labels)
    if intra.size == 0:
        return True
    return bool(intra.max() < inter.min())


def check_nested_separability(D, nested):
    """Separability at every non-trivial level of a nested partition.

    Equivalent to the strictly ordered chain of per-level distance bands:
    pairs sharing a deeper block are all closer than pairs split higher up.
    """
    if not isinstance(nested, NestedPartition):
        nested = NestedPartition(nested)
    for p in nested.levels[1:]:
        if p.n_blocks >= 2 and not check_separability(D, p):
            return False
    return True


class LanceWilliamsClustering(ClusterMixin, BaseEstimator):
    """Agglomerative clustering of series (rows) with a Lance-Williams linkage.

    Parameters
    ----------
    n_clusters : int
        Number of clusters of the flat cut exposed as ``labels_``.
    linkage : str
        One of ``single, complete, average, mcquitty, median, centroid, ward``.
    metric : str
        ``"precomputed"`` to pass a distance matrix to :meth:`fit`, or a
        correlation kind (``pearson, spearman, kendall``) to cluster the rows
        of an N x T panel on ``(1 - rho) / 2``.

    Attributes
    ----------
    dendrogram_ : Dendrogram
    labels_ : ndarray of shape (N,)
    children_ : ndarray of shape (N-1, 2)
    distances_ : ndarray of shape (N-1,)
    leaves_ : ndarray of shape (N,)
        Seriation order of the leaves.
    """

    def __init__(self, n_clusters=2, linkage="average", metric="pearson"):
        self.n_clusters = n_clusters
        self.linkage = linkage
        self.metric = metric

    def fit(self, X, y=None):
        from .correlation import correlation_distance

        if self.metric == "precomputed":
            D = check_distance(X, bounded=False)
        else:
            D = correlation_distance(X, self.metric)
        self.distance_matrix_ = D
        self.dendrogram_ = cluster(D, self.linkage)
        self.n_leaves_ = D.shape[0]
        self.children_ = self.dendrogram_.merges[:, :2].astype(np.int64)
        self.distances_ = self.dendrogram_.heights.copy()
        self.leaves_ = leaf_order(self.dendrogram_)
        self.labels_ = cut_dendrogram(self.dendrogram_, self.n_clusters).labels.copy()
        return self

    def cut(self, k):
        check_is_fitted(self, "dendrogram_")
        return cut_dendrogram(self.dendrogram_, k)
