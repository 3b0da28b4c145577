import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depclust.correlation import (
    UndefinedCorrelationError,
    correlation_matrix,
    kendall,
    kendall_numerator,
    midranks,
    pairwise_correlation,
    pearson,
    spearman,
    to_distance,
)


def brute_kendall_numerator(x, y):
    return sum(
        int(np.sign(x[i] - x[j]) * np.sign(y[i] - y[j]))
        for i, j in itertools.combinations(range(len(x)), 2)
    )


finite = st.floats(-1e3, 1e3, allow_nan=False)


def pair_st(min_size=2, max_size=40, values=finite):
    return st.integers(min_size, max_size).flatmap(
        lambda n: st.tuples(
            st.lists(values, min_size=n, max_size=n), st.lists(values, min_size=n, max_size=n)
        )
    )


class TestPearson:
    def test_exact_affine(self):
        assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0, abs=1e-15)
        assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-15)

    def test_hand_value(self):
        # centred: (-1.5,-.5,.5,1.5) and (-1.5,.5,-.5,1.5); sum of products 4, sums of squares 5
        assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(4 / 5, abs=1e-15)

    def test_zero_variance_raises(self):
        with pytest.raises(UndefinedCorrelationError):
            pearson([1, 1, 1], [1, 2, 3])

    def test_affine_invariance(self, rng):
        for _ in range(100):
            x, y = rng.normal(size=(2, 50))
            a, b = rng.uniform(0.1, 10, 2)
            assert pearson(a * x + rng.normal(), b * y - 3) == pytest.approx(pearson(x, y), abs=1e-9)


class TestSpearman:
    def test_monotone_transform(self, rng):
        x = rng.normal(size=30)
        assert spearman(x, np.exp(x)) == 1.0

    def test_reversed(self):
        assert spearman([1, 2, 3], [3, 2, 1]) == -1.0

    def test_hand_value(self):
        # squared rank differences: 0 + 1 + 1 + 0 = 2; 1 - 6*2/(4*15) = 0.8
        assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-15)

    def test_constant_raises(self):
        with pytest.raises(UndefinedCorrelationError):
            spearman([2, 2, 2], [1, 2, 3])

    def test_midranks(self):
        assert midranks([10, 20, 20, 5]).tolist() == [2.0, 3.5, 3.5, 1.0]

    def test_equals_pearson_on_ranks(self, rng):
        for _ in range(200):
            t = int(rng.integers(3, 80))
            x, y = rng.normal(size=(2, t))
            assert spearman(x, y) == pytest.approx(pearson(midranks(x), midranks(y)), abs=1e-12)


class TestKendall:
    def test_all_concordant(self):
        assert kendall([1, 2, 3, 4], [10, 20, 30, 40]) == 1.0

    def test_hand_value(self):
        # pairs (1,2): +, (1,3): +, (2,3): -
        assert kendall([1, 2, 3], [1, 3, 2]) == pytest.approx(1 / 3, abs=1e-15)

    def test_ties_contribute_zero(self):
        # only pair (0,2) is untied in x and y, and it is concordant
        assert kendall_numerator([1, 1, 2], [1, 2, 2]) == brute_kendall_numerator([1, 1, 2], [1, 2, 2])
        assert kendall([1, 1, 2], [1, 2, 2]) == pytest.approx(1 / 3)

    def test_brute_force_fuzz(self, rng):
        for _ in range(1000):
            t = int(rng.integers(1, 60))
            if rng.random() < 0.5:
                x, y = rng.integers(0, 6, (2, t)).astype(float)
            else:
                x, y = rng.normal(size=(2, t))
            assert kendall_numerator(x, y) == brute_kendall_numerator(x, y)

    @given(pair_st())
    @settings(max_examples=200, deadline=None)
    def test_brute_force_property(self, xy):
        x, y = map(np.asarray, xy)
        assert kendall_numerator(x, y) == brute_kendall_numerator(x, y)


class TestProperties:
    @given(pair_st(min_size=3, values=st.integers(-20, 20).map(float)))
    @settings(max_examples=200, deadline=None)
    def test_symmetric_and_bounded(self, xy):
        x, y = map(np.asarray, xy)
        for fn in (pearson, spearman, kendall):
            try:
                v = fn(x, y)
            except UndefinedCorrelationError:
                continue
            assert -1.0 <= v <= 1.0
            assert fn(y, x) == pytest.approx(v, abs=1e-15)

    def test_rank_invariance_tie_free(self, rng):
        for _ in range(100):
            x, y = rng.normal(size=(2, 40))
            for fn in (spearman, kendall):
                assert fn(np.exp(x), y**3) == fn(x, y)
                assert fn(x, np.arctan(y)) == fn(x, y)


class TestMatrix:
    def test_duplicate_row_is_one(self, rng):
        X = rng.normal(size=(4, 30))
        X[2] = X[0]
        for kind in ("pearson", "spearman", "kendall"):
            assert correlation_matrix(X, kind)[0, 2] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("kind,fn", [("pearson", pearson), ("spearman", spearman),
                                         ("kendall", kendall)])
    def test_two_series_reduce_to_pair(self, rng, kind, fn):
        X = rng.normal(size=(2, 25))
        C = correlation_matrix(X, kind)
        assert C[0, 1] == pytest.approx(fn(X[0], X[1]), abs=1e-14)
        assert C[0, 0] == C[1, 1] == 1.0

    def test_pearson_matches_gram_of_standardized(self, rng):
        X = rng.normal(size=(8, 200))
        Z = (X - X.mean(axis=1, keepdims=True)) / X.std(axis=1, keepdims=True)
        G = Z @ Z.T / Z.shape[1]
        np.testing.assert_allclose(correlation_matrix(Z, "pearson"), G, atol=1e-10)

    @pytest.mark.parametrize("kind", ["spearman", "kendall"])
    def test_rank_matrices_bit_identical_to_pairwise(self, rng, kind):
        X = rng.integers(0, 8, (7, 40)).astype(float)
        np.testing.assert_array_equal(correlation_matrix(X, kind), pairwise_correlation(X, kind))

    def test_error_names_pair(self):
        X = np.array([[1.0, 2.0, 3.0], [1.0, 1.0, 1.0]])
        with pytest.raises(UndefinedCorrelationError, match=r"\(0, 1\)"):
            pairwise_correlation(X, "pearson")
        with pytest.raises(UndefinedCorrelationError, match="series 1"):
            correlation_matrix(X, "pearson")


class TestToDistance:
    def test_values(self):
        D = to_distance(np.array([[1.0, 0.5, -1.0], [0.5, 1.0, 1.0], [-1.0, 1.0, 1.0]]))
        assert D[0, 1] == 0.25
        assert D[0, 2] == 1.0
        assert D[1, 2] == 0.0
        assert np.all(np.diag(D) == 0.0)

    def test_rejects_non_correlation(self):
        with pytest.raises(ValueError):
            to_distance(np.array([[2.0, 0.0], [0.0, 1.0]]))
