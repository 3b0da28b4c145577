import numpy as np
import pytest

from depclust.core import Partition, partitions_equivalent
from depclust.gaussian import (
    METRICS,
    DEMO_CORRELATIONS,
    bhattacharyya,
    copula_cluster_demo,
    correlation_2x2,
    fisher_rao,
    hellinger,
    hellinger_distance,
    jeffreys,
    kl,
    relative_eigenvalues,
    w2,
)

RA, RB, RC = (correlation_2x2(r) for r in (0.5, 0.99, 0.9999))

TABLE = [
    (fisher_rao, 2.77, 3.26, 0.01),
    (kl, 22.6, 47.2, 0.1),
    (jeffreys, 24, 49, 0.5),
    (hellinger, 0.48, 0.56, 0.01),
    (bhattacharyya, 0.65, 0.81, 0.01),
    (w2, 0.63, 0.09, 0.01),
]


def random_spd(rng, n):
    A = rng.normal(size=(n, n))
    return A @ A.T + 0.5 * np.eye(n)


@pytest.mark.parametrize("fn,ab,bc,tol", TABLE, ids=[t[0].__name__ for t in TABLE])
def test_reference_values(fn, ab, bc, tol):
    assert fn(RA, RB) == pytest.approx(ab, abs=tol)
    assert fn(RB, RC) == pytest.approx(bc, abs=tol)


def test_fisher_rao_by_hand():
    # eigenvalues of RA^-1 RB for 2x2 correlations are (1 +- b) / (1 +- a)
    lam = np.array([1.99 / 1.5, 0.01 / 0.5])
    assert fisher_rao(RA, RB) == pytest.approx(np.sqrt(0.5 * np.sum(np.log(lam) ** 2)), abs=1e-12)


def test_w2_diagonal():
    assert w2(np.eye(2), 4 * np.eye(2)) == pytest.approx(np.sqrt(2), abs=1e-14)


def test_hellinger_distance_is_root():
    assert hellinger_distance(RA, RB) ** 2 == pytest.approx(hellinger(RA, RB), abs=1e-15)


@pytest.mark.parametrize("name", sorted(METRICS))
def test_zero_iff_equal(rng, name):
    fn = METRICS[name]
    for _ in range(20):
        S = random_spd(rng, 3)
        # w2 is the root of a cancelling trace, so rounding shows at sqrt(eps)
        assert fn(S, S) == pytest.approx(0.0, abs=1e-6 if name == "w2" else 1e-10)
        E = rng.normal(size=(3, 3)) * 1e-2
        assert fn(S, S + E @ E.T + 1e-3 * np.eye(3)) > 1e-12


@pytest.mark.parametrize("name", ["fisher_rao", "jeffreys", "hellinger", "bhattacharyya", "w2"])
def test_symmetric(rng, name):
    fn = METRICS[name]
    for _ in range(20):
        a, b = random_spd(rng, 4), random_spd(rng, 4)
        assert fn(a, b) == pytest.approx(fn(b, a), rel=1e-8, abs=1e-10)


def test_kl_asymmetric():
    assert abs(kl(RA, RB) - kl(RB, RA)) > 1.0


def test_reciprocal_eigenvalues(rng):
    for _ in range(20):
        a, b = random_spd(rng, 4), random_spd(rng, 4)
        np.testing.assert_allclose(np.sort(relative_eigenvalues(a, b)),
                                   np.sort(1 / relative_eigenvalues(b, a)), rtol=1e-10)


def test_hellinger_range(rng):
    for _ in range(50):
        v = hellinger(random_spd(rng, 3), random_spd(rng, 3))
        assert 0 <= v < 1


def test_fisher_rao_congruence_invariance(rng):
    for _ in range(20):
        a, b = random_spd(rng, 3), random_spd(rng, 3)
        A = rng.normal(size=(3, 3)) + 3 * np.eye(3)
        assert fisher_rao(A @ a @ A.T, A @ b @ A.T) == pytest.approx(fisher_rao(a, b), rel=1e-9)


def test_rejects_non_pd():
    with pytest.raises(ValueError, match="positive definite"):
        fisher_rao(np.eye(2), np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestDemo:
    def test_fisher_rao(self):
        p = copula_cluster_demo(DEMO_CORRELATIONS, "fisher_rao", "ward", 3)
        assert partitions_equivalent(p.labels, [0, 0, 0, 0, 1, 2])

    def test_w2(self):
        p = copula_cluster_demo(DEMO_CORRELATIONS, "w2", "ward", 3)
        assert partitions_equivalent(p.labels, [0, 0, 1, 1, 2, 2])

    def test_w2_sampled(self):
        p = copula_cluster_demo(metric="w2", sampled=True, T=10_000, seed=3)
        assert partitions_equivalent(p.labels, [0, 0, 1, 1, 2, 2])

    def test_k_equals_length(self):
        assert copula_cluster_demo(k=6) == Partition(range(6))

    def test_normalized_distances(self):
        _, D = copula_cluster_demo(metric="kl", return_distances=True)
        assert D.max() == 1.0 and np.array_equal(D, D.T)

    def test_too_few(self):
        with pytest.raises(ValueError):
            copula_cluster_demo([0.1, 0.2], k=3)
