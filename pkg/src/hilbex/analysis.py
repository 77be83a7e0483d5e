"""Space statistics and the exclusion-power experiment.

* :func:`idim` -- intrinsic dimensionality mu^2 / (2 sigma^2) of sampled distances.
* :func:`calibrate_threshold` / :func:`profile_space` -- thresholds that return a
  given number of results per million points, found against linear scans.
* :func:`power_table` / :func:`exclusion_power` -- how often a random query can
  discard one half of a random pivot pair, under each exclusion rule.
* :func:`power_plot_data` -- the planar picture behind that experiment.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import CalibrationError, DegenerateSpaceError, InputError
from .metrics import MetricDescriptor
from .reference import T_LABELS, T_TARGETS

BISECT_ITERATIONS = 40
BOUND_PAIRS = 10_000
CALIBRATION_TOL = 0.10
COLUMNS = ("hyperbolic", "hilbert", "pivot")


def _random_pairs(rng, n, count):
    i = rng.integers(n, size=count)
    j = rng.integers(n - 1, size=count)
    j = j + (j >= i)  # distinct indices
    return i, j


def sample_distances(points, metric: MetricDescriptor, count: int, seed, chunk: int = 100_000) -> np.ndarray:
    """Distances between ``count`` random pairs of distinct rows."""
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) < 2:
        raise InputError("need at least two points to sample distances")
    rng = np.random.default_rng(seed)
    out = np.empty(count)
    for start in range(0, count, chunk):
        stop = min(count, start + chunk)
        i, j = _random_pairs(rng, len(pts), stop - start)
        out[start:stop] = metric.paired(pts[i], pts[j])
    return out


def idim_from_distances(d) -> float:
    d = np.asarray(d, dtype=np.float64)
    sigma = d.std()
    # rounding can leave ~1e-17 of spread on distances that are equal in exact arithmetic
    if sigma <= 1e-12 * abs(d.mean()):
        raise DegenerateSpaceError("all sampled distances are equal; intrinsic dimensionality undefined")
    return float(d.mean() ** 2 / (2.0 * sigma**2))


def idim(points, metric: MetricDescriptor, sample_pairs: int = 200_000, seed=0) -> float:
    """Intrinsic dimensionality from ``sample_pairs`` random distinct pairs (population sigma)."""
    return idim_from_distances(sample_distances(points, metric, sample_pairs, seed))


# -- threshold calibration ----------------------------------------------------------

@dataclass
class SpaceProfile:
    idim: float
    thresholds: dict = field(default_factory=dict)
    space: str = ""


class _NeighbourSample:
    """The closest ``keep`` distances from each held-out query to the remaining points."""

    def __init__(self, points, metric, seed, queries, keep):
        pts = np.asarray(points, dtype=np.float64)
        n = len(pts)
        rng = np.random.default_rng(seed)
        qidx = rng.choice(n, size=queries, replace=False)
        held = np.zeros(n, dtype=bool)
        held[qidx] = True
        data = pts[~held]
        self.n_data = len(data)
        keep = min(keep, self.n_data)
        self.keep = keep
        self.kept = np.empty((queries, keep))
        self.max_distance = 0.0
        for row, qi in enumerate(qidx):
            d = metric.to_many(pts[qi], data)
            self.max_distance = max(self.max_distance, float(d.max()))
            self.kept[row] = np.sort(np.partition(d, keep - 1)[:keep])
        bound = sample_distances(pts, metric, BOUND_PAIRS, rng)
        self.upper = float(bound.max())

    def mean_count(self, t: float) -> float:
        counts = [np.searchsorted(row, t, side="right") for row in self.kept]
        return float(np.mean(counts))

    def solve(self, target: float) -> float:
        if target >= self.n_data:
            return max(self.upper, self.max_distance)
        lo, hi = 0.0, self.upper
        if self.mean_count(hi) < target:
            hi = max(hi, self.max_distance)
        for _ in range(BISECT_ITERATIONS):
            mid = 0.5 * (lo + hi)
            if self.mean_count(mid) < target:
                lo = mid
            else:
                hi = mid
        got = self.mean_count(hi)
        if abs(got - target) > CALIBRATION_TOL * target:
            below = self.mean_count(lo)
            raise CalibrationError(
                f"cannot reach {target:.4g} results per query: count jumps from {below:.4g} "
                f"at t={lo:.6g} to {got:.4g} at t={hi:.6g} (duplicate points?)"
            )
        return hi


def _default_queries(n, target):
    return int(min(max(100, math.ceil(300 / target)), 5000, max(1, n // 2)))


def _neighbour_sample(points, metric, seed, targets, queries):
    n = len(points)
    top = max(targets)
    if queries is None:
        queries = _default_queries(n, min(targets))
    keep = max(64, math.ceil(4 * top) + 32)
    return _NeighbourSample(points, metric, seed, queries, keep)


def calibrate_threshold(points, metric: MetricDescriptor, per_million: float, seed=0, queries=None) -> float:
    """Threshold returning ``per_million`` results per 10**6 points on average.

    Queries are held-out dataset members; counts come from exhaustive scans
    of the remaining points and ``t`` is found by bisection.
    """
    if not per_million > 0:
        raise InputError("per_million must be positive")
    n = len(points)
    if n < 2:
        raise InputError("need at least two points to calibrate")
    sample = _neighbour_sample(points, metric, seed, [per_million * n / 1e6], queries)
    return sample.solve(per_million * sample.n_data / 1e6)


def profile_space(points, metric: MetricDescriptor, seed=0, sample_pairs=200_000, queries=None, space="") -> SpaceProfile:
    """IDIM plus t1 ... t32 from a single neighbour sample."""
    n = len(points)
    if n < 2:
        raise InputError("need at least two points to profile a space")
    value = idim(points, metric, sample_pairs, seed)
    targets = {lab: T_TARGETS[lab] * n / 1e6 for lab in T_LABELS}
    sample = _neighbour_sample(points, metric, seed + 1, list(targets.values()), queries)
    thresholds = {lab: sample.solve(T_TARGETS[lab] * sample.n_data / 1e6) for lab in T_LABELS}
    return SpaceProfile(value, thresholds, space)


def write_profile_csv(profiles, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["space", "idim"] + list(T_LABELS))
    for p in profiles:
        w.writerow([p.space, f"{p.idim:.4f}"] + [f"{p.thresholds[lab]:.6f}" for lab in T_LABELS])


# -- exclusion power ----------------------------------------------------------------

@dataclass
class PowerResult:
    metric: str
    dimension: int
    t_label: str
    t: float
    hyperbolic_pct: float
    hilbert_pct: float | None
    pivot_pct: float
    sem: dict
    trials: dict
    space: str = ""
    idim: float | None = None

    def pct(self, column: str):
        return getattr(self, f"{column}_pct")


def _sem_pct(hits, trials):
    if trials < 2:
        return math.inf
    p = hits / trials
    return 100.0 * math.sqrt(p * (1.0 - p) / (trials - 1))


def _converged(hits, trials, rel_sem):
    if trials < 2 or hits == 0:
        return False
    return _sem_pct(hits, trials) < rel_sem * 100.0 * hits / trials


def power_table(points, metric: MetricDescriptor, thresholds: dict, seed=0, max_trials: int = 1_000_000,
                min_trials: int = 10_000, rel_sem: float | None = 0.01, batch: int = 20_000,
                median_sample: int = 500, space: str = "") -> list[PowerResult]:
    """Exclusion power at several thresholds on one shared set of random trials.

    Each trial draws two distinct pivots and a held-out query.  A column stops
    accumulating once every threshold in it has a standard error below
    ``rel_sem`` of its mean, or when ``max_trials`` is reached; with
    ``rel_sem=None`` every column runs exactly ``max_trials`` trials.
    """
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    if n < 3:
        raise InputError("need at least three points")
    if not thresholds:
        raise InputError("no thresholds given")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_query = max(1, n // 10)
    qpool, ppool = perm[:n_query], perm[n_query:]
    if len(ppool) < 2:
        raise InputError("too few points for distinct pivots")

    labels = list(thresholds)
    tvals = np.array([thresholds[lab] for lab in labels], dtype=np.float64)
    columns = [c for c in COLUMNS if c != "hilbert" or metric.hilbert_safe]
    hits = {c: np.zeros(len(labels), dtype=np.int64) for c in columns}
    done = {c: 0 for c in columns}
    active = set(columns)

    while active:
        b = min(batch, max_trials - min(done[c] for c in active))
        if b <= 0:
            break
        p1 = ppool[rng.integers(len(ppool), size=b)]
        p2 = ppool[rng.integers(len(ppool), size=b)]
        clash = p1 == p2
        while np.any(clash):
            p2[clash] = ppool[rng.integers(len(ppool), size=int(clash.sum()))]
            clash = p1 == p2
        q = qpool[rng.integers(len(qpool), size=b)]
        d1 = metric.paired(pts[q], pts[p1])
        d2 = metric.paired(pts[q], pts[p2])
        if "hyperbolic" in active:
            diff = np.abs(d1 - d2)[:, None]
            hits["hyperbolic"] += (diff > 2.0 * tvals).sum(axis=0)
            done["hyperbolic"] += b
        if "hilbert" in active:
            d12 = metric.paired(pts[p1], pts[p2])
            with np.errstate(divide="ignore", invalid="ignore"):
                margin = np.abs(geometry.hyperplane_margin_arrays(d1, d2, d12))
            margin = np.where(d12 > 0, margin, 0.0)[:, None]
            hits["hilbert"] += (margin > tvals).sum(axis=0)
            done["hilbert"] += b
        if "pivot" in active:
            med = _pivot_medians(pts, metric, p1, ppool, median_sample, rng)
            ex_in, ex_out = geometry.pivot_exclusion_arrays(d1[:, None], med[:, None], tvals)
            hits["pivot"] += (ex_in | ex_out).sum(axis=0)
            done["pivot"] += b
        for c in list(active):
            if done[c] >= max_trials:
                active.discard(c)
            elif rel_sem is not None and done[c] >= min_trials and all(
                _converged(h, done[c], rel_sem) for h in hits[c]
            ):
                active.discard(c)

    dim = pts.shape[1]
    out = []
    for k, lab in enumerate(labels):
        pct = {c: 100.0 * hits[c][k] / done[c] for c in columns}
        sem = {c: _sem_pct(hits[c][k], done[c]) for c in columns}
        out.append(PowerResult(
            metric=metric.name, dimension=dim, t_label=lab, t=float(tvals[k]),
            hyperbolic_pct=pct["hyperbolic"], hilbert_pct=pct.get("hilbert"), pivot_pct=pct["pivot"],
            sem=sem, trials=dict(done), space=space,
        ))
    return out


def _pivot_medians(pts, metric, p1, pool, size, rng, chunk=1000):
    size = min(size, len(pool))
    med = np.empty(len(p1))
    for start in range(0, len(p1), chunk):
        piv = p1[start:start + chunk]
        sample = pool[rng.integers(len(pool), size=(len(piv), size))]
        d = metric.paired(pts[piv][:, None, :], pts[sample])
        med[start:start + chunk] = np.median(d, axis=1)
    return med


def exclusion_power(points, metric: MetricDescriptor, t: float, trials: int = 1_000_000, seed=0,
                    t_label: str = "", **kwargs) -> PowerResult:
    if not t > 0:
        raise InputError("threshold must be positive")
    return power_table(points, metric, {t_label or f"{t:g}": t}, seed, max_trials=trials, **kwargs)[0]


def write_power_csv(results, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["space", "idim", "strategy", "t_label", "pct", "sem"])
    for r in results:
        for c in COLUMNS:
            pct = r.pct(c)
            if pct is None:
                continue
            idim_s = "" if r.idim is None else f"{r.idim:.4f}"
            w.writerow([r.space or f"{r.metric}_{r.dimension}", idim_s, c, r.t_label, f"{pct:.4f}", f"{r.sem[c]:.4f}"])


# -- plot data --------------------------------------------------------------------

PLOT_HEADER = ("x", "y", "hyperbolic", "hilbert", "pivot")


def power_plot_data(points, p1, p2, metric: MetricDescriptor, t: float) -> list[tuple]:
    """Rows ``(x, y, hyperbolic, hilbert, pivot)`` for each point, as if it were the query.

    The pivots sit at (-d/2, 0) and (d/2, 0).  The pivot flag uses the median
    distance from ``p1`` over these same points.  ``hilbert`` is None when the
    metric is not Hilbert-safe.
    """
    pts = metric.check_points(points)
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    d12 = float(metric.paired(p1[None, :], p2[None, :])[0])
    if d12 <= 0:
        raise InputError("pivots coincide")
    if not t > 0:
        raise InputError("threshold must be positive")
    d1 = metric.to_many(p1, pts)
    d2 = metric.to_many(p2, pts)
    x, y = geometry.planar_project_arrays(d1, d2, d12)
    hyp = np.logical_or(*geometry.hyperbolic_exclusion_arrays(d1, d2, t))
    hil = np.logical_or(*geometry.hilbert_exclusion_arrays(d1, d2, d12, t)) if metric.hilbert_safe else None
    med = float(np.median(d1))
    piv = np.logical_or(*geometry.pivot_exclusion_arrays(d1, med, t))
    return [
        (float(x[i]), float(y[i]), bool(hyp[i]), None if hil is None else bool(hil[i]), bool(piv[i]))
        for i in range(len(pts))
    ]


def write_plot_csv(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(PLOT_HEADER)
    for x, y, hyp, hil, piv in rows:
        w.writerow([f"{x:.6f}", f"{y:.6f}", int(hyp), "" if hil is None else int(hil), int(piv)])
