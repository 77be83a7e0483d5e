import math

import numpy as np
import pytest

from hilbex import metrics
from hilbex.errors import ConfigurationError, InputError
from hilbex.index import (
    COVER_ONLY,
    HILBERT,
    HYPERBOLIC,
    ExclusionStrategy,
    Leaf,
    PartitionNode,
    build_ght,
    build_mht,
    linear_scan,
    range_query,
)

from .conftest import HILBERT_METRICS, PROPER_METRICS, random_points

KINDS = {"ght": build_ght, "mht": build_mht}


def _counting(metric):
    """Same metric, but every pairwise evaluation bumps ``box[0]``."""
    box = [0]

    def paired(a, b):
        out = metric.paired(a, b)
        box[0] += np.size(out)
        return out

    return metrics.MetricDescriptor(metric.name, paired, metric.hilbert_safe,
                                    metric.requires_simplex, metric.requires_nonzero), box


def _thresholds(points, metric, rng, fractions=(1e-3, 1e-2, 5e-2)):
    """Radii returning roughly the given fraction of the data."""
    i = rng.integers(len(points), size=4000)
    j = rng.integers(len(points), size=4000)
    return np.quantile(metric.paired(points[i], points[j]), fractions)


class TestBuild:
    def test_single_point(self):
        tree = build_ght(np.zeros((1, 3)), metrics.EUC)
        assert isinstance(tree.root, Leaf) and len(tree.root) == 1
        tree = build_mht(np.zeros((1, 3)), metrics.EUC)
        assert isinstance(tree.root, Leaf)

    def test_identical_points_share_a_leaf(self):
        pts = np.ones((2, 4))
        for build in KINDS.values():
            tree = build(pts, metrics.EUC, leaf_capacity=1)
            assert isinstance(tree.root, Leaf)
            assert sorted(tree.leaf_ids(tree.root)) == [0, 1]
            assert tree.range_query(pts[0], 1e-6).results == {0, 1}

    def test_empty_and_bad_capacity(self):
        with pytest.raises(InputError):
            build_ght(np.zeros((0, 3)), metrics.EUC)
        with pytest.raises(InputError):
            build_mht(np.zeros((5, 3)), metrics.EUC, leaf_capacity=0)

    def test_invalid_points(self):
        with pytest.raises(InputError):
            build_ght(np.array([[0.5, 0.6]]), metrics.JSD)

    def test_depth_sanity_range(self, rng):
        pts = rng.random((10_000, 10))
        tree = build_ght(pts, metrics.EUC, leaf_capacity=32, seed=1)
        lo = math.log2(10_000 / 32)
        assert lo <= tree.depth() <= 3 * lo

    def test_mht_depth_is_lopsided_but_bounded(self, rng):
        # an inherited pivot sits at the edge of its cell, so MHT splits are
        # uneven; still nowhere near a degenerate chain
        pts = rng.random((10_000, 10))
        tree = build_mht(pts, metrics.EUC, leaf_capacity=32, seed=1)
        assert math.log2(10_000 / 32) <= tree.depth() <= 10_000 / 32 / 2

    @pytest.mark.parametrize("kind", KINDS)
    def test_every_point_stored_once(self, kind, rng):
        pts = rng.random((3000, 5))
        tree = KINDS[kind](pts, metrics.EUC, leaf_capacity=8, seed=2)
        stored = list(tree.order)
        for node in tree.nodes():
            if isinstance(node, PartitionNode):
                stored += [node.pivot1, node.pivot2] if kind == "ght" or node is tree.root else [node.pivot2]
        assert sorted(stored) == list(range(len(pts)))

    def test_cover_radii_and_ties(self):
        # collinear: points equidistant from the pivots go right
        pts = np.array([[0.0], [4.0], [2.0], [1.0], [3.0]])
        tree = build_ght(pts, metrics.EUC, leaf_capacity=3, seed=0)
        root = tree.root
        p1, p2 = pts[root.pivot1, 0], pts[root.pivot2, 0]
        assert root.d_pivots == abs(p1 - p2)
        left = [pts[i, 0] for i in tree.leaf_ids(root.left)] if root.left else []
        right = [pts[i, 0] for i in tree.leaf_ids(root.right)] if root.right else []
        for x in left:
            assert abs(x - p1) < abs(x - p2)
        for x in right:
            assert abs(x - p2) <= abs(x - p1)
        assert root.cover_radius1 == max((abs(x - p1) for x in left), default=0.0)
        assert root.cover_radius2 == max((abs(x - p2) for x in right), default=0.0)

    def test_mht_children_inherit_parent_pivots(self, rng):
        tree = build_mht(rng.random((5000, 6)), metrics.EUC, leaf_capacity=4, seed=3)
        checked = 0
        for node in tree.nodes():
            if not isinstance(node, PartitionNode):
                continue
            if isinstance(node.left, PartitionNode):
                assert node.left.pivot1 == node.pivot1
                checked += 1
            if isinstance(node.right, PartitionNode):
                assert node.right.pivot1 == node.pivot2
                checked += 1
        assert checked > 100

    def test_deterministic_under_seed(self, rng):
        pts = rng.random((2000, 4))
        a = build_mht(pts, metrics.EUC, seed=7)
        b = build_mht(pts, metrics.EUC, seed=7)
        np.testing.assert_array_equal(a.order, b.order)


class TestQuery:
    def test_huge_threshold_returns_everything(self, rng):
        pts = rng.random((500, 3))
        for build in KINDS.values():
            assert build(pts, metrics.EUC).range_query(pts[0], 10.0).results == set(range(500))

    def test_stored_point_found(self, rng):
        pts = rng.random((2000, 8))
        for build in KINDS.values():
            tree = build(pts, metrics.EUC, leaf_capacity=4)
            for i in (0, 17, 1999):
                assert i in tree.range_query(pts[i], 1e-9, HILBERT).results

    def test_validation(self, rng):
        tree = build_ght(rng.random((100, 3)), metrics.EUC)
        with pytest.raises(InputError):
            tree.range_query(np.zeros(3), 0.0)
        with pytest.raises(InputError):
            tree.range_query(np.zeros(4), 0.1)

    @pytest.mark.parametrize("metric", [metrics.MAN, metrics.COS_ANGLE], ids=lambda m: m.name)
    def test_hilbert_refused_for_unsafe_metric(self, metric, rng):
        pts = random_points(metric, 200, 4, rng)
        tree = build_mht(pts, metric)
        with pytest.raises(ConfigurationError):
            tree.range_query(pts[0], 0.1, HILBERT)
        # hyperbolic and cover-only remain fine
        tree.range_query(pts[0], 0.1, HYPERBOLIC)
        tree.range_query(pts[0], 0.1, COVER_ONLY)

    def test_strategy_parse(self):
        assert ExclusionStrategy.parse("hilbert") == HILBERT
        assert ExclusionStrategy.parse("cover") == COVER_ONLY
        assert COVER_ONLY.label == "cover"
        with pytest.raises(InputError):
            ExclusionStrategy.parse("diagonal")


class TestLinearScan:
    def test_empty(self):
        st = linear_scan(np.zeros((0, 3)), metrics.EUC, np.zeros(3), 1.0)
        assert st.results == frozenset() and st.distance_calls == 0

    def test_zero_threshold(self, rng):
        pts = rng.random((300, 4))
        st = linear_scan(pts, metrics.EUC, pts[42], 0.0)
        assert st.results == {42} and st.distance_calls == 300


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("metric", PROPER_METRICS + [metrics.COS_ANGLE], ids=lambda m: m.name)
def test_matches_linear_scan(kind, metric, rng):
    pts = random_points(metric, 2500, 6, rng)
    queries = random_points(metric, 40, 6, rng)
    strategies = [HYPERBOLIC, COVER_ONLY, ExclusionStrategy(use_cover_radius=False)]
    if metric.hilbert_safe:
        strategies += [HILBERT, ExclusionStrategy(HILBERT.rule, use_cover_radius=False)]
    tree = KINDS[kind](pts, metric, leaf_capacity=5, seed=11)
    for t in _thresholds(pts, metric, rng):
        for q in queries:
            want = linear_scan(pts, metric, q, t).results
            for s in strategies:
                assert range_query(tree, q, t, s).results == want, (s.label, t)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("metric", HILBERT_METRICS, ids=lambda m: m.name)
def test_hilbert_never_costs_more(kind, metric, rng):
    pts = random_points(metric, 3000, 8, rng)
    tree = KINDS[kind](pts, metric, leaf_capacity=4, seed=5)
    for t in _thresholds(pts, metric, rng):
        for q in random_points(metric, 60, 8, rng):
            hyp = tree.range_query(q, t, HYPERBOLIC)
            hil = tree.range_query(q, t, HILBERT)
            assert hil.distance_calls <= hyp.distance_calls
            assert hil.results == hyp.results


@pytest.mark.parametrize("kind", KINDS)
def test_distance_calls_are_exact_and_bounded(kind, rng):
    metric, box = _counting(metrics.EUC)
    pts = rng.random((3000, 6))
    tree = KINDS[kind](pts, metric, leaf_capacity=6, seed=9)
    for q in rng.random((50, 6)):
        for s in (HYPERBOLIC, HILBERT, COVER_ONLY):
            box[0] = 0
            st = tree.range_query(q, 0.25, s)
            assert st.distance_calls == box[0]
            internal = st.nodes_visited - st.leaves_visited
            bound = internal + 1 if kind == "mht" else 2 * internal
            assert st.distance_calls - st.leaf_calls <= bound
            if kind == "mht" and internal:
                # one fresh pivot per internal node, plus the root's first pivot
                assert st.distance_calls - st.leaf_calls == internal + 1


def test_mht_cheaper_than_ght_on_average(rng):
    pts = rng.random((20_000, 10))
    queries = rng.random((1000, 10))
    t = 0.3
    mean = {}
    for kind, build in KINDS.items():
        tree = build(pts, metrics.EUC, leaf_capacity=1, seed=21)
        mean[kind] = np.mean([tree.range_query(q, t, HYPERBOLIC).distance_calls for q in queries])
    assert mean["mht"] <= mean["ght"]


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("metric", [metrics.EUC, metrics.JSD, metrics.COS_ANGLE], ids=lambda m: m.name)
def test_batch_matches_single_queries(kind, metric, rng):
    pts = random_points(metric, 3000, 6, rng)
    queries = random_points(metric, 50, 6, rng)
    tree = KINDS[kind](pts, metric, leaf_capacity=3, seed=4)
    strategies = [HYPERBOLIC, COVER_ONLY] + ([HILBERT] if metric.hilbert_safe else [])
    for t in _thresholds(pts, metric, rng):
        for s in strategies:
            batch = tree.range_query_batch(queries, t, s)
            assert batch == [tree.range_query(q, t, s) for q in queries]


def test_threaded_benchmark_is_order_stable(rng):
    from hilbex import bench

    pts = rng.random((3000, 5))
    tree = build_mht(pts, metrics.EUC, seed=1)
    queries = rng.random((40, 5))
    one = bench.run_queries(tree, queries, 0.2, HILBERT, threads=1)
    four = bench.run_queries(tree, queries, 0.2, HILBERT, threads=4)
    assert one == four


def test_batch_validation(rng):
    tree = build_ght(rng.random((100, 3)), metrics.EUC)
    with pytest.raises(InputError):
        tree.range_query_batch(rng.random((5, 4)), 0.1)
    with pytest.raises(InputError):
        tree.range_query_batch(rng.random((5, 3)), -1)
    with pytest.raises(ConfigurationError):
        build_ght(rng.random((10, 3)), metrics.MAN).range_query_batch(rng.random((2, 3)), 0.1, HILBERT)
