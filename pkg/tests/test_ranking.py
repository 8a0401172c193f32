import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_ranked
from oracles import kendall_brute, spearman_brute

from gamap.errors import (
    AllZeroAttributionError,
    EmptyInputError,
    LengthMismatchError,
)
from gamap.ranking import (
    AttributionVector,
    DistanceMatrix,
    RankedAttribution,
    kendall_tau_distance,
    kendall_tau_distance_fast,
    normalize,
    pairwise_distances,
    spearman_rho_sq_distance,
)


def ranked(weights, ranks):
    return RankedAttribution(np.array(weights, dtype=float), np.array(ranks))


class TestNormalize:
    def test_signed_weights(self):
        out = normalize(AttributionVector(("a", "b", "c"), [-2.0, 1.0, 1.0]))
        assert np.allclose(out.weights, [0.5, 0.25, 0.25])
        assert out.ranks.tolist() == [1, 2, 3]

    def test_single_nonzero(self):
        out = normalize(AttributionVector(("a", "b", "c"), [1.0, 0.0, 0.0]))
        assert np.allclose(out.weights, [1.0, 0.0, 0.0])
        assert out.ranks.tolist() == [1, 2, 3]

    def test_sign_discarded(self):
        out = normalize(AttributionVector(("a", "b", "c"), [0.2, -0.3, 0.5]))
        assert np.allclose(out.weights, [0.2, 0.3, 0.5])
        assert out.ranks.tolist() == [3, 2, 1]

    def test_all_zero_rejected(self):
        with pytest.raises(AllZeroAttributionError):
            normalize(AttributionVector(("a", "b"), [0.0, 0.0]))

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            AttributionVector(("a", "b"), [1.0, 2.0, 3.0])

    def test_too_few_features(self):
        with pytest.raises(LengthMismatchError):
            normalize(AttributionVector(("a",), [1.0]))

    def test_ties_break_to_lower_index(self):
        out = normalize(AttributionVector(("a", "b", "c"), [1.0, -1.0, 1.0]))
        assert out.ranks.tolist() == [1, 2, 3]

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(
            st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False),
            min_size=2,
            max_size=12,
        ).filter(lambda ws: any(w != 0 for w in ws))
    )
    def test_output_contract(self, ws):
        out = normalize(AttributionVector(tuple(f"f{i}" for i in range(len(ws))), ws))
        assert abs(float(out.weights.sum()) - 1.0) <= 1e-9
        assert np.all(out.weights >= 0)
        assert sorted(out.ranks.tolist()) == list(range(1, len(ws) + 1))


class TestRankedAttributionValidation:
    def test_bad_sum(self):
        with pytest.raises(ValueError):
            ranked([0.5, 0.4], [1, 2])

    def test_bad_permutation(self):
        with pytest.raises(ValueError):
            ranked([0.5, 0.5], [1, 3])

    def test_rank_weight_inconsistency(self):
        with pytest.raises(ValueError):
            ranked([0.3, 0.7], [1, 2])


class TestHandWorkedDistances:
    """The four worked values, each recomputed with a brute-force oracle
    before being pinned."""

    def test_kendall_two_features(self):
        a, b = ranked([0.7, 0.3], [1, 2]), ranked([0.4, 0.6], [2, 1])
        oracle = kendall_brute(a.weights, a.ranks, b.weights, b.ranks)
        assert oracle == pytest.approx(0.0504, abs=1e-9)
        assert kendall_tau_distance(a, b) == pytest.approx(oracle, abs=1e-15)

    def test_kendall_three_features(self):
        a, b = ranked([0.5, 0.3, 0.2], [1, 2, 3]), ranked([0.2, 0.3, 0.5], [3, 2, 1])
        oracle = kendall_brute(a.weights, a.ranks, b.weights, b.ranks)
        assert oracle == pytest.approx(0.028, abs=1e-9)
        assert kendall_tau_distance(a, b) == pytest.approx(oracle, abs=1e-15)

    def test_spearman_two_features(self):
        a, b = ranked([0.7, 0.3], [1, 2]), ranked([0.4, 0.6], [2, 1])
        oracle = spearman_brute(a.weights, a.ranks, b.weights, b.ranks)
        assert oracle == pytest.approx(0.46, abs=1e-9)
        assert spearman_rho_sq_distance(a, b) == pytest.approx(oracle, abs=1e-15)

    def test_spearman_three_features(self):
        a, b = ranked([0.5, 0.3, 0.2], [1, 2, 3]), ranked([0.2, 0.3, 0.5], [3, 2, 1])
        oracle = spearman_brute(a.weights, a.ranks, b.weights, b.ranks)
        assert oracle == pytest.approx(0.8, abs=1e-9)
        assert spearman_rho_sq_distance(a, b) == pytest.approx(oracle, abs=1e-15)

    def test_identical_rankings_are_zero(self):
        a = ranked([0.5, 0.3, 0.2], [1, 2, 3])
        assert kendall_tau_distance(a, a) == 0.0
        assert spearman_rho_sq_distance(a, a) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            kendall_tau_distance(ranked([0.5, 0.5], [1, 2]), ranked([1 / 3] * 3, [1, 2, 3]))
        with pytest.raises(LengthMismatchError):
            spearman_rho_sq_distance(ranked([0.5, 0.5], [1, 2]), ranked([1 / 3] * 3, [1, 2, 3]))


class TestDistanceProperties:
    def test_symmetry_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            n = int(rng.integers(2, 11))
            a, b = random_ranked(rng, n), random_ranked(rng, n)
            assert kendall_tau_distance(a, b) == kendall_tau_distance(b, a)
            assert spearman_rho_sq_distance(a, b) == spearman_rho_sq_distance(b, a)

    def test_same_order_zero(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            n = int(rng.integers(2, 11))
            a = random_ranked(rng, n)
            # same ranking order, completely different weights
            w = np.sort(rng.uniform(0.1, 1.0, n))[::-1]
            w = w / w.sum()
            b = RankedAttribution(w[a.ranks - 1], a.ranks.copy())
            assert kendall_tau_distance(a, b) == 0.0
            assert spearman_rho_sq_distance(a, b) == 0.0

    def test_nonnegative(self):
        rng = np.random.default_rng(9)
        for _ in range(300):
            n = int(rng.integers(2, 11))
            a, b = random_ranked(rng, n), random_ranked(rng, n)
            assert kendall_tau_distance(a, b) >= 0.0
            assert spearman_rho_sq_distance(a, b) >= 0.0

    def test_triangle_inequality_counterexamples(self):
        """Both measures are pseudometrics that can violate subadditivity.

        Kendall: routing two reversed heavy features through a ranking that
        parks its weight elsewhere costs almost nothing. Spearman: with
        near-uniform weights a long displacement can be split into two short
        ones whose squared lengths sum to less.
        """
        a = ranked([0.5, 0.5], [1, 2])
        c = ranked([0.499, 0.501], [2, 1])
        b = ranked([0.01, 0.99], [2, 1])
        assert kendall_tau_distance(a, c) > (
            kendall_tau_distance(a, b) + kendall_tau_distance(b, c) + 1e-3
        )
        p = ranked([0.340, 0.333, 0.327], [1, 2, 3])
        q = ranked([0.333, 0.340, 0.327], [2, 1, 3])
        r = ranked([0.327, 0.340, 0.333], [3, 1, 2])
        assert spearman_rho_sq_distance(p, r) > (
            spearman_rho_sq_distance(p, q) + spearman_rho_sq_distance(q, r) + 1e-3
        )

    def test_oracle_equivalence_up_to_200_features(self):
        rng = np.random.default_rng(10)
        for n in (2, 3, 5, 17, 64, 128, 200):
            a, b = random_ranked(rng, n), random_ranked(rng, n)
            oracle = kendall_brute(a.weights, a.ranks, b.weights, b.ranks)
            assert abs(kendall_tau_distance(a, b) - oracle) <= 1e-12
            assert abs(kendall_tau_distance_fast(a, b) - oracle) <= 1e-12


class TestPairwiseDistances:
    def test_identical_attributions_zero_matrix(self):
        a = ranked([0.5, 0.3, 0.2], [1, 2, 3])
        d = pairwise_distances([a, a, a], "kendall")
        assert np.array_equal(d.entries, np.zeros((3, 3)))

    def test_two_feature_kendall_mirrored(self):
        a, b = ranked([0.7, 0.3], [1, 2]), ranked([0.4, 0.6], [2, 1])
        d = pairwise_distances([a, b], "kendall")
        assert d.entries[0, 1] == pytest.approx(0.0504, abs=1e-9)
        assert d.entries[0, 1] == d.entries[1, 0]
        assert d.entries[0, 0] == d.entries[1, 1] == 0.0

    def test_three_feature_spearman(self):
        a, b = ranked([0.5, 0.3, 0.2], [1, 2, 3]), ranked([0.2, 0.3, 0.5], [3, 2, 1])
        d = pairwise_distances([a, b], "spearman")
        assert d.entries[0, 1] == pytest.approx(0.8, abs=1e-9)

    def test_matches_pair_function(self):
        rng = np.random.default_rng(11)
        attrs = [random_ranked(rng, 6) for _ in range(12)]
        for metric, fn in (("kendall", kendall_tau_distance), ("spearman", spearman_rho_sq_distance)):
            d = pairwise_distances(attrs, metric)
            for i in range(12):
                for j in range(12):
                    expect = 0.0 if i == j else fn(attrs[i], attrs[j])
                    assert d.entries[i, j] == pytest.approx(expect, abs=1e-12)

    def test_wide_feature_count_uses_merge_kernel(self):
        rng = np.random.default_rng(12)
        attrs = [random_ranked(rng, 40) for _ in range(5)]
        d = pairwise_distances(attrs, "kendall")
        for i in range(5):
            for j in range(i + 1, 5):
                oracle = kendall_brute(
                    attrs[i].weights, attrs[i].ranks, attrs[j].weights, attrs[j].ranks
                )
                assert d.entries[i, j] == pytest.approx(oracle, abs=1e-12)

    def test_errors(self):
        a = ranked([0.5, 0.5], [1, 2])
        with pytest.raises(EmptyInputError):
            pairwise_distances([a], "kendall")
        with pytest.raises(EmptyInputError):
            pairwise_distances([], "spearman")
        with pytest.raises(LengthMismatchError):
            pairwise_distances([a, ranked([1 / 3] * 3, [1, 2, 3])], "kendall")
        with pytest.raises(ValueError):
            pairwise_distances([a, a], "euclidean")


class TestDistanceMatrixValidation:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            DistanceMatrix(np.array([[0.0, 1.0], [2.0, 0.0]]))

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(ValueError):
            DistanceMatrix(np.array([[0.5, 1.0], [1.0, 0.0]]))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            DistanceMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(LengthMismatchError):
            DistanceMatrix(np.zeros((2, 3)))
