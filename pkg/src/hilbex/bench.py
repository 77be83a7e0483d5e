"""Query-cost benchmark: mean distance calls per query for each tree, rule and threshold."""
from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .index import HILBERT, HYPERBOLIC, ExclusionStrategy, Rule, build_tree, check_strategy, linear_scan
from .metrics import MetricDescriptor

COST_HEADER = ("space", "tree", "strategy", "t_label", "t", "n", "queries", "mean_calls", "pct", "sem_pct",
               "dominance", "mismatches")


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("HILBEX_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class CostRow:
    space: str
    tree: str
    strategy: str
    t_label: str
    t: float
    n: int
    queries: int
    mean_calls: float
    pct: float
    sem_pct: float
    dominance: bool | None = None
    mismatches: int | None = None

    def as_csv(self):
        return [
            self.space, self.tree, self.strategy, self.t_label, f"{self.t:.6g}", self.n, self.queries,
            f"{self.mean_calls:.3f}", f"{self.pct:.4f}", f"{self.sem_pct:.4f}",
            "" if self.dominance is None else ("ok" if self.dominance else "FAIL"),
            "" if self.mismatches is None else self.mismatches,
        ]


def held_out_split(n: int, n_queries: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint (data, query) row indices; queries are a random slice of the dataset."""
    if not 0 < n_queries < n:
        raise ValueError(f"need 0 < queries < n, got {n_queries} of {n}")
    perm = np.random.default_rng(seed).permutation(n)
    return np.sort(perm[n_queries:]), perm[:n_queries]


def run_queries(tree, queries, t, strategy, threads=None):
    """Per-query stats, in query order.  Threads each take a contiguous chunk."""
    threads = threads or thread_count()
    check_strategy(tree.metric, strategy)
    queries = np.asarray(queries, dtype=np.float64)
    if threads == 1 or len(queries) < 2 * threads:
        return tree.range_query_batch(queries, t, strategy)
    chunks = np.array_split(queries, threads)
    with ThreadPoolExecutor(threads) as pool:
        parts = pool.map(lambda c: tree.range_query_batch(c, t, strategy), chunks)
    return [st for part in parts for st in part]


def count_mismatches(tree, queries, t, stats) -> int:
    bad = 0
    for q, st in zip(queries, stats):
        if linear_scan(tree.points, tree.metric, q, t).results != st.results:
            bad += 1
    return bad


def cost_benchmark(points, metric: MetricDescriptor, thresholds: dict, trees=("ght", "mht"),
                   strategies=(HYPERBOLIC, HILBERT), n_queries=1000, seed=0, leaf_capacity=32,
                   verify=False, space="", threads=None) -> list[CostRow]:
    """Build each tree once over the non-query points and run every (threshold, strategy) on it."""
    for s in strategies:
        check_strategy(metric, s)
    pts = metric.check_points(points)
    data_idx, query_idx = held_out_split(len(pts), n_queries, seed)
    data, queries = pts[data_idx], pts[query_idx]
    n = len(data)
    rows = []
    for kind in trees:
        tree = build_tree(kind, data, metric, leaf_capacity, seed)
        for label, t in thresholds.items():
            calls = {}
            for s in strategies:
                stats = run_queries(tree, queries, t, s, threads)
                c = np.array([st.distance_calls for st in stats], dtype=np.float64)
                calls[s] = c
                mism = count_mismatches(tree, queries, t, stats) if verify else None
                sem = c.std(ddof=1) / np.sqrt(len(c)) if len(c) > 1 else 0.0
                rows.append(CostRow(space, kind, s.label, label, float(t), n, len(queries), float(c.mean()),
                                    100.0 * c.mean() / n, 100.0 * sem / n, None, mism))
            dom = _dominance(calls)
            if dom is not None:
                for r in rows[-len(strategies):]:
                    r.dominance = dom
    return rows


def _dominance(calls: dict):
    hyp = [c for s, c in calls.items() if s.use_hyperplane and s.rule is Rule.HYPERBOLIC and s.use_cover_radius]
    hil = [c for s, c in calls.items() if s.use_hyperplane and s.rule is Rule.HILBERT and s.use_cover_radius]
    if not hyp or not hil:
        return None
    return bool(np.all(hil[0] <= hyp[0]))


def write_cost_csv(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COST_HEADER)
    for r in rows:
        w.writerow(r.as_csv())


def strategies_from_names(names) -> list[ExclusionStrategy]:
    return [ExclusionStrategy.parse(n) for n in names]
