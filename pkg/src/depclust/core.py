"""Partitions, dendrograms and the panel/matrix file formats."""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_series


@dataclass(frozen=True)
class SeriesMatrix:
    """An N x T panel: one row per series, one column per observation."""

    values: np.ndarray
    series_ids: tuple = None

    def __post_init__(self):
        values = check_series(self.values)
        object.__setattr__(self, "values", values)
        if self.series_ids is not None:
            ids = tuple(str(s) for s in self.series_ids)
            if len(ids) != values.shape[0]:
                raise ValueError(f"got {len(ids)} series ids for {values.shape[0]} series")
            object.__setattr__(self, "series_ids", ids)

    @property
    def n_series(self):
        return self.values.shape[0]

    @property
    def n_obs(self):
        return self.values.shape[1]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


class Partition:
    """Hard partition of ``N`` items, stored as canonical labels.

    Labels are renumbered by order of first appearance, so two partitions
    with the same grouping compare equal regardless of the label names used
    to build them.
    """

    __slots__ = ("labels", "n_blocks")

    def __init__(self, labels):
        labels = np.asarray(labels)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a non-empty 1-d sequence")
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        order = np.argsort(np.argsort(first))
        canon = order[inverse].astype(np.int64)
        canon.setflags(write=False)
        object.__setattr__(self, "labels", canon)
        object.__setattr__(self, "n_blocks", int(first.size))

    def __setattr__(self, name, value):
        raise AttributeError("Partition is immutable")

    def __len__(self):
        return self.labels.size

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash(self.labels.tobytes())

    def __repr__(self):
        return f"Partition({self.labels.tolist()})"

    def blocks(self):
        """List of index arrays, one per block, in label order."""
        return [np.flatnonzero(self.labels == b) for b in range(self.n_blocks)]

    def refines(self, coarser):
        """True if every block of ``self`` sits inside one block of ``coarser``."""
        coarser = as_partition(coarser)
        if len(coarser) != len(self):
            raise ValueError("partitions have different lengths")
        pairs = np.unique(np.stack([self.labels, coarser.labels]), axis=1)
        return pairs.shape[1] == self.n_blocks

    @classmethod
    def trivial(cls, n):
        return cls(np.zeros(n, dtype=np.int64))


def as_partition(p):
    return p if isinstance(p, Partition) else Partition(p)


@dataclass(frozen=True)
class NestedPartition:
    """Hierarchy of partitions, coarsest (the one-block partition) first."""

    levels: tuple

    def __post_init__(self):
        levels = tuple(as_partition(p) for p in self.levels)
        if not levels:
            raise ValueError("a nested partition needs at least one level")
        if levels[0].n_blocks != 1:
            raise ValueError("level 0 must be the trivial one-block partition")
        n = len(levels[0])
        for k in range(1, len(levels)):
            if len(levels[k]) != n:
                raise ValueError(f"level {k} has {len(levels[k])} items, expected {n}")
            if not levels[k].refines(levels[k - 1]):
                raise ValueError(f"level {k} does not refine level {k - 1}")
        object.__setattr__(self, "levels", levels)

    @property
    def depth(self):
        """Number of non-trivial levels (h)."""
        return len(self.levels) - 1

    @property
    def n_items(self):
        return len(self.levels[0])

    def deepest_common_level(self):
        """N x N matrix of the deepest level index at which i and j share a block."""
        n = self.n_items
        out = np.zeros((n, n), dtype=np.int64)
        for k, p in enumerate(self.levels):
            same = p.labels[:, None] == p.labels[None, :]
            out[same] = k
        return out


def partitions_equivalent(a, b):
    """True iff some relabelling maps ``a`` onto ``b``."""
    a = np.asarray(a.labels if isinstance(a, Partition) else a)
    b = np.asarray(b.labels if isinstance(b, Partition) else b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"incomparable partitions: lengths {a.size} and {b.size}")
    n_pairs = np.unique(np.stack([a, b]), axis=1).shape[1]
    return n_pairs == np.unique(a).size == np.unique(b).size


@dataclass(frozen=True)
class Dendrogram:
    """Merge history of an agglomerative clustering.

    ``merges`` is an (N-1) x 4 array of ``(left, right, height, size)`` rows.
    Leaves are ids ``0..N-1`` and the cluster created at step ``s`` is
    ``N + s``; this is the layout of a SciPy linkage matrix.
    """

    n_leaves: int
    merges: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = int(self.n_leaves)
        if n < 1:
            raise ValueError("a dendrogram needs at least one leaf")
        merges = np.asarray(self.merges, dtype=np.float64).reshape(-1, 4)
        if merges.shape[0] != n - 1:
            raise ValueError(f"expected {n - 1} merges for {n} leaves, got {merges.shape[0]}")
        sizes = np.ones(2 * n - 1, dtype=np.int64)
        used = np.zeros(2 * n - 1, dtype=bool)
        for s, (left, right, height, size) in enumerate(merges):
            ids = (int(left), int(right))
            if ids[0] != left or ids[1] != right:
                raise ValueError(f"merge {s}: cluster ids must be integers")
            for c in ids:
                if not 0 <= c < n + s:
                    raise ValueError(f"merge {s}: id {c} does not exist yet")
                if used[c]:
                    raise ValueError(f"merge {s}: id {c} merged twice")
                used[c] = True
            if ids[0] == ids[1]:
                raise ValueError(f"merge {s}: cannot merge a cluster with itself")
            if not np.isfinite(height) or height < 0:
                raise ValueError(f"merge {s}: height must be finite and non-negative")
            sizes[n + s] = sizes[ids[0]] + sizes[ids[1]]
            if size != sizes[n + s]:
                raise ValueError(f"merge {s}: size {size} != {sizes[n + s]}")
        merges.setflags(write=False)
        object.__setattr__(self, "n_leaves", n)
        object.__setattr__(self, "merges", merges)

    @property
    def heights(self):
        return self.merges[:, 2]

    def children(self, s):
        return int(self.merges[s, 0]), int(self.merges[s, 1])

    def to_dict(self):
        rows = [[int(l), int(r), float(h), int(z)] for l, r, h, z in self.merges]
        return {"n_leaves": self.n_leaves, "merges": rows}

    @classmethod
    def from_dict(cls, obj):
        return cls(obj["n_leaves"], np.asarray(obj["merges"], dtype=np.float64).reshape(-1, 4))

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def cut_dendrogram(d, k):
    """Flat partition with ``k`` blocks, obtained by undoing the last ``k-1`` merges."""
    n = d.n_leaves
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    parent = np.arange(2 * n - 1)

    def find(c):
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    for s in range(n - k):
        left, right = d.children(s)
        parent[find(left)] = n + s
        parent[find(right)] = n + s
    return Partition([find(i) for i in range(n)])


def leaf_order(d):
    """Left-to-right leaf order of the merge tree (seriation order)."""
    n = d.n_leaves
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    order = []
    stack = [2 * n - 2]
    while stack:
        c = stack.pop()
        if c < n:
            order.append(c)
        else:
            left, right = d.children(c - n)
            stack.append(right)
            stack.append(left)
    return np.asarray(order, dtype=np.int64)


def cophenetic_matrix(d):
    """N x N matrix of the height at which each pair of leaves first joins."""
    n = d.n_leaves
    out = np.zeros((n, n))
    members = {i: [i] for i in range(n)}
    for s in range(n - 1):
        left, right = d.children(s)
        a, b = members.pop(left), members.pop(right)
        out[np.ix_(a, b)] = d.merges[s, 2]
        out[np.ix_(b, a)] = d.merges[s, 2]
        members[n + s] = a + b
    return out


def _parse_row(row):
    return [float(v) for v in row]


def read_matrix_csv(path):
    """Read a matrix CSV; returns ``(values, ids)`` with ``ids`` None if no header."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(v.strip() for v in r)]
    if not rows:
        raise ValueError(f"{path}: empty file")
    ids = None
    try:
        _parse_row(rows[0])
    except ValueError:
        ids = [v.strip() for v in rows[0]]
        rows = rows[1:]
    try:
        values = np.array([_parse_row(r) for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric entry ({exc})") from None
    if values.ndim != 2:
        raise ValueError(f"{path}: rows have unequal lengths")
    if ids is not None and len(ids) != values.shape[0]:
        raise ValueError(f"{path}: header has {len(ids)} ids for {values.shape[0]} rows")
    return values, ids


def write_matrix_csv(path, values, ids=None):
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if ids is not None:
            w.writerow(ids)
        for row in values:
            w.writerow([repr(float(v)) for v in row])


def read_series_csv(path):
    values, ids = read_matrix_csv(path)
    return SeriesMatrix(values, ids)
