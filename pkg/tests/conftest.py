import numpy as np
import pytest

from depclust.core import Dendrogram


@pytest.fixture
def rng():
    return np.random.default_rng(20160601)


def random_dendrogram(rng, n):
    """Random valid merge list with non-decreasing heights."""
    alive = list(range(n))
    sizes = {i: 1 for i in range(n)}
    merges = []
    h = 0.0
    for s in range(n - 1):
        a, b = sorted(rng.choice(len(alive), size=2, replace=False))
        left, right = alive[a], alive[b]
        alive.pop(b)
        alive.pop(a)
        h += rng.random()
        sizes[n + s] = sizes[left] + sizes[right]
        merges.append((left, right, h, sizes[n + s]))
        alive.append(n + s)
    return Dendrogram(n, np.array(merges).reshape(-1, 4))


def random_separable(rng, n, k, gap=0.05):
    """Distance matrix whose intra-block distances all lie below every inter-block one."""
    labels = np.r_[np.arange(k), rng.integers(0, k, n - k)]
    rng.shuffle(labels)
    cut = rng.uniform(0.2, 0.8)
    U = rng.uniform(0.0, cut - gap / 2, (n, n))
    V = rng.uniform(cut + gap / 2, 1.0, (n, n))
    same = labels[:, None] == labels[None, :]
    D = np.where(same, U, V)
    D = np.triu(D, 1)
    D = D + D.T
    return D, labels
