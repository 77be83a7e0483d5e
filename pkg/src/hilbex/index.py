"""Hyperplane partition trees for range search.

Two trees share one node layout:

* GHT: every internal node owns two fresh pivots.
* MHT: the root owns two pivots; every other internal node inherits the
  parent pivot it was assigned to as its first pivot and adds one new one,
  so a query pays a single new distance per internal node below the root.

Queries prune a child when either its cover radius or the chosen hyperplane
rule (hyperbolic or Hilbert) proves it holds no result.  Each query counts
its own metric evaluations; build-time distances (including the
inter-pivot distance) are free at query time.

Points are identified by their row index in the build array.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InputError
from .metrics import MetricDescriptor, as_vector

DEFAULT_LEAF_CAPACITY = 32
PIVOT_SAMPLE = 100


class Rule(enum.Enum):
    HYPERBOLIC = "hyperbolic"
    HILBERT = "hilbert"


@dataclass(frozen=True)
class ExclusionStrategy:
    rule: Rule = Rule.HYPERBOLIC
    use_cover_radius: bool = True
    use_hyperplane: bool = True

    @classmethod
    def parse(cls, name: str) -> "ExclusionStrategy":
        """``hyperbolic``, ``hilbert`` or ``cover`` (cover radius only)."""
        if name == "cover":
            return cls(Rule.HYPERBOLIC, use_cover_radius=True, use_hyperplane=False)
        try:
            return cls(Rule(name))
        except ValueError:
            raise InputError(f"unknown strategy {name!r}; expected hyperbolic, hilbert or cover") from None

    @property
    def label(self) -> str:
        if not self.use_hyperplane:
            return "cover" if self.use_cover_radius else "none"
        return self.rule.value if self.use_cover_radius else f"{self.rule.value}-only"


HYPERBOLIC = ExclusionStrategy(Rule.HYPERBOLIC)
HILBERT = ExclusionStrategy(Rule.HILBERT)
COVER_ONLY = ExclusionStrategy(Rule.HYPERBOLIC, use_hyperplane=False)


def check_strategy(metric: MetricDescriptor, strategy: ExclusionStrategy) -> None:
    if strategy.use_hyperplane and strategy.rule is Rule.HILBERT and not metric.hilbert_safe:
        raise ConfigurationError(f"Hilbert exclusion is not safe for metric {metric.name!r}")


@dataclass
class QueryStats:
    results: frozenset
    distance_calls: int
    nodes_visited: int = 0
    leaves_visited: int = 0
    leaf_calls: int = 0  # share of distance_calls spent scanning leaves


class Leaf:
    __slots__ = ("start", "stop")

    def __init__(self, start, stop):
        self.start = start
        self.stop = stop

    def __len__(self):
        return self.stop - self.start


class PartitionNode:
    """Internal node.  ``pivot1`` may be inherited from the parent (MHT)."""

    __slots__ = ("pivot1", "pivot2", "d_pivots", "cover_radius1", "cover_radius2", "left", "right")

    def __init__(self, pivot1, pivot2, d_pivots, cover_radius1, cover_radius2):
        self.pivot1 = pivot1
        self.pivot2 = pivot2
        self.d_pivots = d_pivots
        self.cover_radius1 = cover_radius1
        self.cover_radius2 = cover_radius2
        self.left = None
        self.right = None


class HyperplaneTree:
    def __init__(self, points, metric: MetricDescriptor, kind: str = "ght",
                 leaf_capacity: int = DEFAULT_LEAF_CAPACITY, seed: int = 0):
        if kind not in ("ght", "mht"):
            raise InputError(f"unknown tree kind {kind!r}")
        if leaf_capacity < 1:
            raise InputError("leaf_capacity must be positive")
        pts = metric.check_points(points)
        if len(pts) == 0:
            raise InputError("cannot build a tree over no points")
        self.points = pts
        self.metric = metric
        self.kind = kind
        self.leaf_capacity = int(leaf_capacity)
        self.seed = seed
        self._order_parts: list[np.ndarray] = []
        self._filled = 0
        self.root = self._build(np.random.default_rng(seed))
        self.order = np.concatenate(self._order_parts).astype(np.intp)
        # leaves are contiguous slices of this copy
        self.leaf_points = np.ascontiguousarray(pts[self.order])
        del self._order_parts

    # -- construction -------------------------------------------------------

    def _leaf(self, idx):
        leaf = Leaf(self._filled, self._filled + len(idx))
        self._order_parts.append(np.asarray(idx, dtype=np.intp))
        self._filled += len(idx)
        return leaf

    def _far_pivot(self, rng, p1, candidates):
        if len(candidates) > PIVOT_SAMPLE:
            candidates = rng.choice(candidates, PIVOT_SAMPLE, replace=False)
        dc = self.metric.to_many(self.points[p1], self.points[candidates])
        k = int(np.argmax(dc))
        return int(candidates[k]), float(dc[k])

    def _split(self, rng, idx, inherited):
        """Return a node plus the two child subsets, or a leaf."""
        cap = self.leaf_capacity
        if inherited is None:
            if len(idx) <= cap:
                return self._leaf(idx), None, None
            pos = int(rng.integers(len(idx)))
            p1 = int(idx[pos])
            rest = np.delete(idx, pos)
        else:
            p1, rest = inherited, idx
            if len(rest) <= cap:
                return self._leaf(rest), None, None
        p2, d12 = self._far_pivot(rng, p1, rest)
        if d12 == 0.0:
            # duplicates: no hyperplane to split on
            return self._leaf(idx), None, None
        rest = rest[rest != p2]
        d1 = self.metric.to_many(self.points[p1], self.points[rest])
        d2 = self.metric.to_many(self.points[p2], self.points[rest])
        closer1 = d1 < d2  # ties go to the p2 side
        left, right = rest[closer1], rest[~closer1]
        cr1 = float(d1[closer1].max()) if len(left) else 0.0
        cr2 = float(d2[~closer1].max()) if len(right) else 0.0
        return PartitionNode(p1, p2, d12, cr1, cr2), left, right

    def _build(self, rng):
        mht = self.kind == "mht"
        root, left, right = self._split(rng, np.arange(len(self.points)), None)
        stack = []
        if isinstance(root, PartitionNode):
            stack.append((root, "right", right))
            stack.append((root, "left", left))
        while stack:
            parent, side, idx = stack.pop()
            if len(idx) == 0:
                continue
            inherited = None
            if mht:
                inherited = parent.pivot1 if side == "left" else parent.pivot2
            node, left, right = self._split(rng, idx, inherited)
            setattr(parent, side, node)
            if isinstance(node, PartitionNode):
                stack.append((node, "right", right))
                stack.append((node, "left", left))
        return root

    # -- inspection ---------------------------------------------------------

    def nodes(self):
        """Yield every node (internal and leaf) in depth-first order."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if isinstance(node, PartitionNode):
                stack.extend(c for c in (node.right, node.left) if c is not None)

    def depth(self) -> int:
        best = 0
        stack = [(self.root, 1)]
        while stack:
            node, dep = stack.pop()
            best = max(best, dep)
            if isinstance(node, PartitionNode):
                stack.extend((c, dep + 1) for c in (node.left, node.right) if c is not None)
        return best

    def leaf_ids(self, leaf: Leaf) -> np.ndarray:
        return self.order[leaf.start:leaf.stop]

    # -- search -------------------------------------------------------------

    def range_query(self, q, t: float, strategy: ExclusionStrategy = HYPERBOLIC) -> QueryStats:
        check_strategy(self.metric, strategy)
        if not t > 0:
            raise InputError(f"threshold must be positive, got {t}")
        q = as_vector(q)
        if q.size != self.points.shape[1]:
            raise InputError(f"query has dimension {q.size}, tree has {self.points.shape[1]}")
        self.metric.check_points(q[None, :])
        return self._search(q, float(t), strategy)

    def _search(self, q, t, strategy):
        kernel = self.metric.paired
        points = self.points
        q2 = q[None, :]
        mht = self.kind == "mht"
        use_cover = strategy.use_cover_radius
        use_plane = strategy.use_hyperplane
        hilbert = strategy.rule is Rule.HILBERT
        two_t = 2.0 * t

        results = []
        calls = 0
        visited = 0
        leaf_calls = 0
        leaves = 0
        stack = [(self.root, None)]
        while stack:
            node, d1 = stack.pop()
            visited += 1
            if type(node) is Leaf:
                n = node.stop - node.start
                ds = kernel(q2, self.leaf_points[node.start:node.stop])
                calls += n
                leaf_calls += n
                leaves += 1
                hits = np.flatnonzero(ds <= t)
                if len(hits):
                    results.extend(self.order[node.start + hits].tolist())
                continue
            p1, p2 = node.pivot1, node.pivot2
            if d1 is None:
                d1 = float(kernel(q2, points[p1:p1 + 1])[0])
                calls += 1
                if d1 <= t:
                    results.append(p1)
            d2 = float(kernel(q2, points[p2:p2 + 1])[0])
            calls += 1
            if d2 <= t:
                results.append(p2)

            skip1 = skip2 = False
            if use_cover:
                skip1 = d1 > node.cover_radius1 + t
                skip2 = d2 > node.cover_radius2 + t
            if use_plane:
                if hilbert:
                    margin = (d1 - d2) * (d1 + d2) / (2.0 * node.d_pivots)
                    skip1 = skip1 or margin > t
                    skip2 = skip2 or -margin > t
                else:
                    diff = d1 - d2
                    skip1 = skip1 or diff > two_t
                    skip2 = skip2 or -diff > two_t
            if node.right is not None and not skip2:
                stack.append((node.right, d2 if mht else None))
            if node.left is not None and not skip1:
                stack.append((node.left, d1 if mht else None))
        return QueryStats(frozenset(results), calls, visited, leaves, leaf_calls)

    def range_query_batch(self, queries, t: float, strategy: ExclusionStrategy = HYPERBOLIC) -> list[QueryStats]:
        """Run many queries at once; element ``i`` equals ``range_query(queries[i], t, strategy)``.

        Every query follows its own traversal, but the queries that reach a
        node share one vectorised kernel call there, which removes most of
        the per-node numpy overhead.
        """
        check_strategy(self.metric, strategy)
        if not t > 0:
            raise InputError(f"threshold must be positive, got {t}")
        Q = self.metric.check_points(queries)
        if Q.shape[1] != self.points.shape[1]:
            raise InputError(f"queries have dimension {Q.shape[1]}, tree has {self.points.shape[1]}")
        return self._search_batch(Q, float(t), strategy)

    def _search_batch(self, Q, t, strategy):
        kernel = self.metric.paired
        points = self.points
        nq = len(Q)
        mht = self.kind == "mht"
        use_cover = strategy.use_cover_radius
        use_plane = strategy.use_hyperplane
        hilbert = strategy.rule is Rule.HILBERT
        two_t = 2.0 * t

        calls = np.zeros(nq, dtype=np.int64)
        visited = np.zeros(nq, dtype=np.int64)
        leaves = np.zeros(nq, dtype=np.int64)
        leaf_calls = np.zeros(nq, dtype=np.int64)
        hit_q, hit_id = [], []

        stack = [(self.root, np.arange(nq), None)]
        while stack:
            node, active, d1 = stack.pop()
            visited[active] += 1
            if type(node) is Leaf:
                n = node.stop - node.start
                block = self.leaf_points[node.start:node.stop]
                ds = kernel(Q[active][:, None, :], block[None, :, :])
                calls[active] += n
                leaf_calls[active] += n
                leaves[active] += 1
                qi, pj = np.nonzero(ds <= t)
                if len(qi):
                    hit_q.append(active[qi])
                    hit_id.append(self.order[node.start + pj])
                continue
            p1, p2 = node.pivot1, node.pivot2
            Qa = Q[active]
            if d1 is None:
                d1 = kernel(Qa, points[p1:p1 + 1])
                calls[active] += 1
                inside = d1 <= t
                if inside.any():
                    hit_q.append(active[inside])
                    hit_id.append(np.full(int(inside.sum()), p1, dtype=np.intp))
            d2 = kernel(Qa, points[p2:p2 + 1])
            calls[active] += 1
            inside = d2 <= t
            if inside.any():
                hit_q.append(active[inside])
                hit_id.append(np.full(int(inside.sum()), p2, dtype=np.intp))

            skip1 = np.zeros(len(active), dtype=bool)
            skip2 = np.zeros(len(active), dtype=bool)
            if use_cover:
                skip1 |= d1 > node.cover_radius1 + t
                skip2 |= d2 > node.cover_radius2 + t
            if use_plane:
                if hilbert:
                    margin = (d1 - d2) * (d1 + d2) / (2.0 * node.d_pivots)
                    skip1 |= margin > t
                    skip2 |= -margin > t
                else:
                    diff = d1 - d2
                    skip1 |= diff > two_t
                    skip2 |= -diff > two_t
            if node.right is not None:
                go = ~skip2
                if go.any():
                    stack.append((node.right, active[go], d2[go] if mht else None))
            if node.left is not None:
                go = ~skip1
                if go.any():
                    stack.append((node.left, active[go], d1[go] if mht else None))

        results = [[] for _ in range(nq)]
        if hit_q:
            hq = np.concatenate(hit_q)
            hid = np.concatenate(hit_id)
            order = np.argsort(hq, kind="stable")
            hq, hid = hq[order], hid[order]
            bounds = np.searchsorted(hq, np.arange(nq + 1))
            for i in range(nq):
                results[i] = hid[bounds[i]:bounds[i + 1]].tolist()
        return [
            QueryStats(frozenset(results[i]), int(calls[i]), int(visited[i]), int(leaves[i]), int(leaf_calls[i]))
            for i in range(nq)
        ]


def build_ght(points, metric, leaf_capacity=DEFAULT_LEAF_CAPACITY, seed=0) -> HyperplaneTree:
    return HyperplaneTree(points, metric, "ght", leaf_capacity, seed)


def build_mht(points, metric, leaf_capacity=DEFAULT_LEAF_CAPACITY, seed=0) -> HyperplaneTree:
    return HyperplaneTree(points, metric, "mht", leaf_capacity, seed)


def build_tree(kind, points, metric, leaf_capacity=DEFAULT_LEAF_CAPACITY, seed=0) -> HyperplaneTree:
    return HyperplaneTree(points, metric, kind, leaf_capacity, seed)


def range_query(tree: HyperplaneTree, q, t: float, strategy: ExclusionStrategy = HYPERBOLIC) -> QueryStats:
    return tree.range_query(q, t, strategy)


def linear_scan(points, metric: MetricDescriptor, q, t: float) -> QueryStats:
    """Exhaustive search; the reference answer for every index."""
    if t < 0:
        raise InputError("threshold must be non-negative")
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        return QueryStats(frozenset(), 0)
    q = as_vector(q)
    ds = metric.to_many(q, pts)
    return QueryStats(frozenset(np.flatnonzero(ds <= t).tolist()), len(pts))
