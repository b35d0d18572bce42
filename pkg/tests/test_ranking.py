import numpy as np
import pytest

from reidrank import (
    DistanceKind,
    DistanceMatrix,
    ReciprocalNeighborhood,
    combine_final,
    jaccard_distances,
    rank_lists,
    reciprocal_sets,
    rerank_once,
)

import reference


def dist(values, kind=DistanceKind.COMPOSED):
    return DistanceMatrix(np.asarray(values, dtype=float), kind)


# squared distances of colinear points at 0, 1, 3
COLINEAR = [[0.0, 1.0, 9.0], [1.0, 0.0, 4.0], [9.0, 4.0, 0.0]]


class TestRankLists:
    def test_direct_sort(self):
        order = rank_lists(dist([[0, 5, 2], [5, 0, 2], [2, 2, 0]])).order
        assert list(order[0]) == [0, 2, 1]

    def test_tie_break_by_index(self):
        order = rank_lists(dist([[0, 3, 3], [3, 0, 3], [3, 3, 0]])).order
        assert list(order[0]) == [0, 1, 2]

    def test_random_rows_match_reference(self):
        rng = np.random.default_rng(30)
        values = reference.random_distance_values(rng, 30)
        order = rank_lists(dist(values)).order
        assert np.array_equal(order, np.array(reference.rank_rows(values.tolist())))

    def test_self_first_when_diagonal_strict_minimum(self):
        rng = np.random.default_rng(7)
        values = reference.random_distance_values(rng, 12)
        order = rank_lists(dist(values)).order
        np.testing.assert_array_equal(order[:, 0], np.arange(12))


class TestReciprocalSets:
    def test_colinear_hand_example(self):
        r = reciprocal_sets(dist(COLINEAR), 2)
        assert set(r.indices(0)) == {0, 1}
        assert set(r.indices(1)) == {0, 1}
        assert set(r.indices(2)) == {2}

    def test_k_one_gives_singletons(self):
        rng = np.random.default_rng(1)
        r = reciprocal_sets(dist(reference.random_distance_values(rng, 8)), 1)
        for i in range(8):
            assert set(r.indices(i)) == {i}

    def test_k_equals_n_gives_everything(self):
        rng = np.random.default_rng(2)
        r = reciprocal_sets(dist(reference.random_distance_values(rng, 6)), 6)
        assert r.member.all()

    def test_membership_symmetric_and_bounded(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(3, 25))
            k = int(rng.integers(1, n + 1))
            r = reciprocal_sets(dist(reference.random_distance_values(rng, n)), k)
            assert np.array_equal(r.member, r.member.T)
            assert r.member.sum(axis=1).max() <= k

    def test_k_out_of_range(self):
        d = dist(COLINEAR)
        with pytest.raises(ValueError, match="k must be in"):
            reciprocal_sets(d, 0)
        with pytest.raises(ValueError, match="k must be in"):
            reciprocal_sets(d, 4)

    def test_rejects_asymmetric_membership(self):
        member = np.eye(3, dtype=bool)
        member[0, 1] = True
        with pytest.raises(ValueError, match="symmetric"):
            ReciprocalNeighborhood(2, member)


class TestJaccard:
    def test_hand_example(self):
        # R(a)={a,b,c}, R(b)={a,b,d} -> 1 - 2/4
        member = np.array(
            [
                [True, True, True, False],
                [True, True, False, True],
                [True, False, True, False],
                [False, True, False, True],
            ]
        )
        d = jaccard_distances(ReciprocalNeighborhood(3, member))
        assert d.values[0, 1] == 0.5

    def test_identical_and_disjoint_sets(self):
        member = np.eye(4, dtype=bool)
        member[0, 1] = member[1, 0] = True
        d = jaccard_distances(ReciprocalNeighborhood(2, member)).values
        assert d[0, 1] == 0.0  # identical sets {0,1}
        assert d[2, 3] == 1.0  # disjoint singletons
        assert np.all(np.diag(d) == 0.0)

    def test_random_instance_matches_reference_exactly(self):
        rng = np.random.default_rng(40)
        values = reference.random_distance_values(rng, 40)
        r = reciprocal_sets(dist(values), 8)
        ours = jaccard_distances(r).values
        naive = np.array(reference.jaccard(reference.reciprocal_sets(values.tolist(), 8)))
        assert np.array_equal(ours, naive)

    def test_bounds_and_kind(self):
        rng = np.random.default_rng(5)
        d = jaccard_distances(reciprocal_sets(dist(reference.random_distance_values(rng, 15)), 4))
        assert d.kind is DistanceKind.JACCARD
        assert d.values.min() >= 0.0 and d.values.max() <= 1.0


class TestCombineFinal:
    def test_direct_arithmetic(self):
        base = dist([[0.0, 4.0], [4.0, 0.0]])
        jac = dist([[0.0, 0.5], [0.5, 0.0]], DistanceKind.JACCARD)
        out = combine_final(base, jac)
        np.testing.assert_array_equal(out.values, [[0.0, 1.5], [1.5, 0.0]])
        assert out.kind is DistanceKind.FINAL

    def test_zero_jaccard_preserves_ranking(self):
        rng = np.random.default_rng(6)
        base = dist(reference.random_distance_values(rng, 10))
        zero = dist(np.zeros((10, 10)), DistanceKind.JACCARD)
        out = combine_final(base, zero)
        np.testing.assert_array_equal(np.argsort(out.values, axis=1), np.argsort(base.values, axis=1))

    def test_three_point_pair_tightens(self):
        base = dist(COLINEAR)
        out = rerank_once(base, 2)
        before = base.values[0, 1] / base.values[0, 2]
        after = out.values[0, 1] / out.values[0, 2]
        assert after < before

    def test_size_mismatch(self):
        base = dist([[0.0, 1.0], [1.0, 0.0]])
        jac = dist(np.zeros((3, 3)), DistanceKind.JACCARD)
        with pytest.raises(ValueError, match="size mismatch"):
            combine_final(base, jac)

    def test_degenerate_base_warns(self):
        base = dist(np.full((3, 3), 2.0))
        jac = dist(np.zeros((3, 3)), DistanceKind.JACCARD)
        with pytest.warns(RuntimeWarning, match="degenerate"):
            out = combine_final(base, jac)
        np.testing.assert_array_equal(out.values, np.zeros((3, 3)))


class TestRerankOnce:
    def test_k_one_preserves_ranking(self):
        # singleton reciprocal sets: constant off-diagonal jaccard term
        rng = np.random.default_rng(9)
        base = dist(reference.random_distance_values(rng, 9))
        out = rerank_once(base, 1)
        np.testing.assert_array_equal(np.argsort(out.values, axis=1, kind="stable"),
                                      np.argsort(base.values, axis=1, kind="stable"))

    def test_two_cluster_contrast_improves(self):
        from reidrank import FeatureSet, euclidean_distances

        rng = np.random.default_rng(7)
        near = rng.standard_normal((6, 4)) * 0.4
        far = rng.standard_normal((6, 4)) * 0.4 + 3.0
        fs = FeatureSet(
            np.vstack([near, far]),
            np.repeat([0, 1], 6),
            np.tile([1, 2], 6),
            np.tile([True, False], 6),
        )
        out = rerank_once(euclidean_distances(fs), 4)
        labels = fs.person_ids
        same = (labels[:, None] == labels[None, :]) & ~np.eye(12, dtype=bool)
        assert out.values[same].mean() < out.values[~np.eye(12, dtype=bool) & ~same].mean()

    def test_not_idempotent(self):
        rng = np.random.default_rng(13)
        base = dist(reference.random_distance_values(rng, 12))
        once = rerank_once(base, 4)
        twice = rerank_once(once, 4)
        assert not np.array_equal(once.values, twice.values)


class TestMonotoneInvariance:
    def test_rankings_survive_increasing_transforms(self):
        rng = np.random.default_rng(21)
        transforms = [lambda x: 3.0 * x + 1.0, np.exp, np.sqrt, lambda x: x / (1.0 + x)]
        for _ in range(10):
            n = int(rng.integers(4, 20))
            k = int(rng.integers(1, n + 1))
            values = reference.random_distance_values(rng, n, zero_diag=False)
            base = dist(values)
            mapped = dist(transforms[int(rng.integers(len(transforms)))](values))
            assert np.array_equal(rank_lists(base).order, rank_lists(mapped).order)
            assert np.array_equal(reciprocal_sets(base, k).member, reciprocal_sets(mapped, k).member)
