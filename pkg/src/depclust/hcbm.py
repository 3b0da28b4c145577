"""Hierarchical Correlation Block Model: specification and sampling."""

import json
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_correlation
from .core import NestedPartition, Partition

_MASK64 = (1 << 64) - 1
PSD_TOL = 1e-10


class NotPositiveSemidefiniteError(ValueError):
    def __init__(self, min_eigenvalue):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(f"correlation matrix is not PSD: smallest eigenvalue {min_eigenvalue:.3g}")


def _splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def stream_seed(base_seed, *keys):
    """Derive a 64-bit seed from ``base_seed`` and integer keys.

    Each key is folded in with a splitmix64 round:
    ``h <- splitmix64(h xor splitmix64(key))``, starting from
    ``h = splitmix64(base_seed)``. Streams for different ``(cell, trial)``
    keys are independent of the order in which they are drawn.
    """
    h = _splitmix64(int(base_seed) & _MASK64)
    for k in keys:
        h = _splitmix64(h ^ _splitmix64(int(k) & _MASK64))
    return h


def make_rng(seed, *keys):
    if isinstance(seed, np.random.Generator):
        if keys:
            raise ValueError("stream keys need an integer seed")
        return seed
    return np.random.Generator(np.random.PCG64(stream_seed(seed, *keys)))


@dataclass(frozen=True)
class MarginKind:
    """Gaussian margins, or Student-t with ``nu > 2`` degrees of freedom."""

    kind: str = "gaussian"
    nu: float = None

    def __post_init__(self):
        if self.kind == "gaussian":
            object.__setattr__(self, "nu", None)
        elif self.kind == "student":
            if self.nu is None or not self.nu > 2:
                raise ValueError(f"Student margins need nu > 2, got {self.nu}")
            object.__setattr__(self, "nu", float(self.nu))
        else:
            raise ValueError(f"unknown margin kind {self.kind!r}")

    @classmethod
    def parse(cls, text):
        """Parse ``"gaussian"`` or ``"student:<nu>"``."""
        if isinstance(text, MarginKind):
            return text
        name, _, nu = str(text).partition(":")
        if name == "student":
            return cls("student", float(nu) if nu else 3.0)
        return cls(name)

    def __str__(self):
        return "gaussian" if self.kind == "gaussian" else f"student:{self.nu:g}"


@dataclass(frozen=True)
class HcbmSpec:
    """Nested partition plus a correlation band per non-trivial level.

    ``bands[k-1] = (lo_k, hi_k)`` bounds the correlation of pairs that share
    a block at level ``k`` but not at level ``k+1``. Pairs split at the top
    level are uncorrelated. ``block_values`` optionally fixes the value used
    inside each block (a ``{label: rho}`` mapping per level); otherwise the
    band midpoint is used.
    """

    nested: NestedPartition
    bands: tuple
    block_values: tuple = field(default=None)

    def __post_init__(self):
        nested = self.nested
        if not isinstance(nested, NestedPartition):
            nested = NestedPartition(nested)
            object.__setattr__(self, "nested", nested)
        bands = tuple((float(lo), float(hi)) for lo, hi in self.bands)
        if len(bands) != nested.depth:
            raise ValueError(f"need {nested.depth} bands, got {len(bands)}")
        for k, (lo, hi) in enumerate(bands, start=1):
            if not 0.0 < lo <= hi < 1.0:
                raise ValueError(f"level {k}: band ({lo}, {hi}) must satisfy 0 < lo <= hi < 1")
            if k > 1 and not bands[k - 2][1] < lo:
                raise ValueError(f"level {k}: band must start above level {k - 1}'s upper bound")
        object.__setattr__(self, "bands", bands)
        if self.block_values is not None:
            if len(self.block_values) != nested.depth:
                raise ValueError("block_values needs one mapping per non-trivial level")
            values = []
            for k, mapping in enumerate(self.block_values, start=1):
                lo, hi = bands[k - 1]
                mapping = {int(b): float(v) for b, v in dict(mapping or {}).items()}
                for b, v in mapping.items():
                    if not 0 <= b < nested.levels[k].n_blocks:
                        raise ValueError(f"level {k}: no block {b}")
                    if not lo <= v <= hi:
                        raise ValueError(f"level {k}, block {b}: value {v} outside band ({lo}, {hi})")
                values.append(mapping)
            object.__setattr__(self, "block_values", tuple(values))
        implied_correlation(self)

    @property
    def n_items(self):
        return self.nested.n_items

    def value(self, level, block):
        if self.block_values is not None and block in self.block_values[level - 1]:
            return self.block_values[level - 1][block]
        lo, hi = self.bands[level - 1]
        return (lo + hi) / 2.0

    @classmethod
    def from_dict(cls, obj):
        """Build from the JSON layout ``{"levels": [...], "bands": [...]}``.

        ``levels`` lists label vectors; the trivial one-block level is
        prepended when absent. A ``{"two_block": {...}}`` object is also
        accepted and expanded through :class:`TwoBlockSpec`.
        """
        if "two_block" in obj:
            return TwoBlockSpec(**obj["two_block"]).to_hcbm()
        levels = [Partition(lv) for lv in obj["levels"]]
        if levels[0].n_blocks != 1:
            levels.insert(0, Partition.trivial(len(levels[0])))
        return cls(NestedPartition(tuple(levels)), obj["bands"], obj.get("block_values"))

    def to_dict(self):
        out = {
            "levels": [p.labels.tolist() for p in self.nested.levels],
            "bands": [list(b) for b in self.bands],
        }
        if self.block_values is not None:
            out["block_values"] = [{str(b): v for b, v in m.items()} for m in self.block_values]
        return out

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _min_eigenvalue(C):
    return float(np.linalg.eigvalsh(C)[0])


def implied_correlation(spec):
    """Population correlation matrix of an HCBM (block value of the deepest shared level)."""
    nested = spec.nested
    n = nested.n_items
    C = np.zeros((n, n))
    for k in range(1, nested.depth + 1):
        labels = nested.levels[k].labels
        for b in range(nested.levels[k].n_blocks):
            idx = np.flatnonzero(labels == b)
            C[np.ix_(idx, idx)] = spec.value(k, b)
    np.fill_diagonal(C, 1.0)
    lam = _min_eigenvalue(C)
    if lam < -PSD_TOL:
        raise NotPositiveSemidefiniteError(lam)
    return C


def hcbm_separation_margin(spec):
    """Smallest half-gap between consecutive bands, with the top level at 0.

    This is the sup-norm estimation error below which every level is still
    recovered by a space-conserving linkage.
    """
    lows = np.array([lo for lo, _ in spec.bands])
    highs = np.array([0.0] + [hi for _, hi in spec.bands[:-1]])
    return float(np.min(lows - highs) / 2.0)


@dataclass(frozen=True)
class TwoBlockSpec:
    """Two independent blocks: a small one at ``2 rho`` and a big one at ``rho``.

    The big block holds ``round(fraction_big * n)`` items and comes second.
    ``rho`` may reach 0.5, where the small block is perfectly correlated and
    its correlation matrix singular.
    """

    n: int
    rho: float
    fraction_big: float = 0.7

    def __post_init__(self):
        if not 0.0 <= self.rho <= 0.5:
            raise ValueError(f"rho must lie in [0, 0.5], got {self.rho}")
        if not 0.0 < self.fraction_big < 1.0:
            raise ValueError("fraction_big must lie in (0, 1)")
        big = self.n_big
        if big < 1 or self.n - big < 1:
            raise ValueError(f"n={self.n} leaves an empty block at fraction {self.fraction_big}")

    @property
    def n_big(self):
        return int(round(self.fraction_big * self.n))

    @property
    def n_small(self):
        return self.n - self.n_big

    def partition(self):
        return Partition(np.r_[np.zeros(self.n_small, int), np.ones(self.n_big, int)])

    def correlation(self):
        s = self.n_small
        C = np.zeros((self.n, self.n))
        C[:s, :s] = 2.0 * self.rho
        C[s:, s:] = self.rho
        np.fill_diagonal(C, 1.0)
        return C

    def to_hcbm(self):
        """Equivalent :class:`HcbmSpec`; needs ``0 < rho < 0.5``."""
        levels = (Partition.trivial(self.n), self.partition())
        return HcbmSpec(
            NestedPartition(levels),
            [(self.rho, 2.0 * self.rho)],
            [{0: 2.0 * self.rho, 1: self.rho}],
        )


def factorize(C):
    """Return ``L`` with ``L @ L.T == C``; Cholesky, else clamped eigendecomposition."""
    try:
        return np.linalg.cholesky(C)
    except np.linalg.LinAlgError:
        lam, V = np.linalg.eigh(C)
        if lam[0] < -PSD_TOL:
            raise NotPositiveSemidefiniteError(lam[0]) from None
        return V * np.sqrt(np.maximum(lam, 0.0))


def sample(C, margin="gaussian", T=250, seed=0):
    """Draw ``T`` i.i.d. vectors with correlation ``C``; returns an N x T panel.

    Student margins use one chi-square mixing variable per time step, shared
    by all coordinates, so the draw is a genuine multivariate t.
    """
    C = check_correlation(C)
    margin = MarginKind.parse(margin)
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    L = factorize(C)
    rng = make_rng(seed)
    Z = rng.standard_normal((C.shape[0], T))
    X = L @ Z
    if margin.kind == "student":
        w = rng.chisquare(margin.nu, size=T) / margin.nu
        X = X / np.sqrt(w)
    return X
