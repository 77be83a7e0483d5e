"""Exclusion predicates and small Euclidean embedding constructions.

The predicates work on distances only, never on points, so the same code
serves every metric.  Whether Hilbert exclusion is *valid* for a metric is
the caller's business (see ``MetricDescriptor.hilbert_safe``).

Scalar entry points take a :class:`PivotPair`; the ``*_arrays`` variants are
vectorised over numpy arrays of distances and are what the experiments use.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

TRIANGLE_TOL = 1e-9
EIGEN_TOL = 1e-9


@dataclass(frozen=True)
class PivotPair:
    """Distances from a query to two pivots, plus the inter-pivot distance."""

    d_q_p1: float
    d_q_p2: float
    d_p1_p2: float

    def __post_init__(self):
        for name in ("d_q_p1", "d_q_p2", "d_p1_p2"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise InputError(f"{name} must be a finite non-negative distance, got {value}")
        _check_triangle(self.d_q_p1, self.d_q_p2, self.d_p1_p2)


@dataclass(frozen=True)
class ExclusionDecision:
    exclude_side_of_p1: bool = False
    exclude_side_of_p2: bool = False

    @property
    def excludes(self) -> bool:
        return self.exclude_side_of_p1 or self.exclude_side_of_p2


class PivotDecision(enum.Enum):
    NONE = "none"
    EXCLUDE_IN = "exclude_in"
    EXCLUDE_OUT = "exclude_out"


def _check_triangle(a, b, c, tol=TRIANGLE_TOL):
    if a > b + c + tol or b > a + c + tol or c > a + b + tol:
        raise InputError(f"distances ({a}, {b}, {c}) violate the triangle inequality")


def _check_t(t):
    if not t > 0:
        raise InputError(f"threshold must be positive, got {t}")


# -- vectorised forms ---------------------------------------------------------

def hyperplane_margin_arrays(d1, d2, d12):
    """Signed offset of the query from the bisector; positive towards p2."""
    d1 = np.asarray(d1, dtype=np.float64)
    d2 = np.asarray(d2, dtype=np.float64)
    # factored difference of squares: exact subtraction when d1 ~ d2
    return (d1 - d2) * (d1 + d2) / (2.0 * np.asarray(d12, dtype=np.float64))


def hyperbolic_exclusion_arrays(d1, d2, t):
    """Boolean arrays (exclude p1 side, exclude p2 side) for |d1 - d2| > 2t."""
    diff = np.asarray(d1, dtype=np.float64) - np.asarray(d2, dtype=np.float64)
    return diff > 2.0 * t, -diff > 2.0 * t


def hilbert_exclusion_arrays(d1, d2, d12, t):
    margin = hyperplane_margin_arrays(d1, d2, d12)
    return margin > t, -margin > t


def pivot_exclusion_arrays(d_q_p, m, t):
    """Boolean arrays (exclude_in, exclude_out) for a single ball pivot."""
    d_q_p = np.asarray(d_q_p, dtype=np.float64)
    return d_q_p > m + t, d_q_p <= m - t


# -- scalar forms -------------------------------------------------------------

def hyperbolic_exclusion(p: PivotPair, t: float) -> ExclusionDecision:
    _check_t(t)
    diff = p.d_q_p1 - p.d_q_p2
    return ExclusionDecision(diff > 2 * t, -diff > 2 * t)


def hyperplane_margin(p: PivotPair) -> float:
    if p.d_p1_p2 <= 0:
        raise InputError("pivots coincide; the bisecting hyperplane is undefined")
    return (p.d_q_p1 - p.d_q_p2) * (p.d_q_p1 + p.d_q_p2) / (2.0 * p.d_p1_p2)


def hilbert_exclusion(p: PivotPair, t: float) -> ExclusionDecision:
    """Exclude the far pivot's side when the query is more than ``t`` from the bisector.

    Only valid for metrics with the four-point property.
    """
    _check_t(t)
    margin = hyperplane_margin(p)
    return ExclusionDecision(margin > t, -margin > t)


def pivot_exclusion(d_q_p: float, m: float, t: float) -> PivotDecision:
    _check_t(t)
    if not m > 0:
        raise InputError(f"ball radius must be positive, got {m}")
    if d_q_p > m + t:
        return PivotDecision.EXCLUDE_IN
    if d_q_p <= m - t:
        return PivotDecision.EXCLUDE_OUT
    return PivotDecision.NONE


# -- embeddings ---------------------------------------------------------------

def embed_three(d12: float, d13: float, d23: float):
    """Place three points with the given pairwise distances in the plane.

    Returns ``(x1, x2, x3)`` with ``x1`` at the origin and ``x2`` on the
    positive x axis; ``x3`` takes the non-negative y solution.
    """
    for value in (d12, d13, d23):
        if not math.isfinite(value) or value < 0:
            raise InputError(f"distances must be finite and non-negative, got {value}")
    _check_triangle(d12, d13, d23)
    if d12 == 0:
        if abs(d13 - d23) > TRIANGLE_TOL:
            raise InputError("x1 and x2 coincide but have different distances to x3")
        return (0.0, 0.0), (0.0, 0.0), (d13, 0.0)
    x = 0.5 * d12 + (d13 - d23) * (d13 + d23) / (2.0 * d12)
    # a tolerated triangle violation over a tiny base can overshoot the collinear limit
    x = min(max(x, -d13), d13)
    y = float(_height(d13, d23, d12))
    return (0.0, 0.0), (d12, 0.0), (x, y)


def planar_project(d_x_p1: float, d_x_p2: float, d_p1_p2: float) -> tuple[float, float]:
    """Project a point into the plane with the pivots at (-d/2, 0) and (d/2, 0)."""
    if not d_p1_p2 > 0:
        raise InputError("pivots coincide; projection undefined")
    _check_triangle(d_x_p1, d_x_p2, d_p1_p2)
    x, y = planar_project_arrays(d_x_p1, d_x_p2, d_p1_p2)
    return float(x), float(y)


def _height(a, b, base):
    """Distance from the base line of a triangle with sides a, b over ``base``.

    Heron's factorisation; unlike sqrt(a^2 - x^2) it gives exactly 0 for
    collinear inputs.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    # root each factor first so tiny bases do not underflow the product
    roots = [np.sqrt(np.maximum(f, 0.0)) for f in (b - a + base, a - b + base, a + b - base, a + b + base)]
    return roots[0] * roots[1] * roots[2] * roots[3] / (2.0 * base)


def planar_project_arrays(d1, d2, d12):
    x = hyperplane_margin_arrays(d1, d2, d12)
    # clamp to the collinear limit around p1 at -d12/2 (see embed_three)
    half = 0.5 * np.asarray(d12, dtype=np.float64)
    d1 = np.asarray(d1, dtype=np.float64)
    x = np.clip(x, -half - d1, -half + d1)
    return x, _height(d1, d2, d12)


@dataclass(frozen=True)
class DistanceMatrix4:
    """Pairwise distances among four points, stored as a symmetric 4x4 array."""

    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=np.float64)
        if d.shape != (4, 4):
            raise InputError(f"expected a 4x4 matrix, got shape {d.shape}")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise InputError("distances must be finite and non-negative")
        if not np.array_equal(d, d.T) or np.any(np.diag(d) != 0):
            raise InputError("distance matrix must be symmetric with a zero diagonal")
        for i, j, k in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
            _check_triangle(d[i, j], d[i, k], d[j, k])
        object.__setattr__(self, "d", d)

    @classmethod
    def from_pairs(cls, d01, d02, d03, d12, d13, d23):
        d = np.zeros((4, 4))
        for (i, j), v in zip(((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)), (d01, d02, d03, d12, d13, d23)):
            d[i, j] = d[j, i] = v
        return cls(d)

    @classmethod
    def from_points(cls, points, metric):
        pts = np.asarray(points, dtype=np.float64)
        i, j = np.triu_indices(4, 1)
        vals = metric.paired(pts[i], pts[j])
        d = np.zeros((4, 4))
        d[i, j] = vals
        d[j, i] = vals
        return cls(d)


def gram_from_squared(sq: np.ndarray) -> np.ndarray:
    """Centre squared distances on point 0: G[i,j] = (D0i + D0j - Dij) / 2 for i,j >= 1.

    Works on a single (4, 4) matrix or a stack of shape (..., 4, 4).
    """
    d0 = sq[..., 0, 1:]
    return 0.5 * (d0[..., :, None] + d0[..., None, :] - sq[..., 1:, 1:])


def four_point_check(m: DistanceMatrix4) -> bool:
    """True iff the four points embed isometrically in 3-D Euclidean space.

    Equivalent to the squared distances being conditionally negative
    semidefinite, decided through the eigenvalues of the centred Gram matrix.
    """
    sq = m.d * m.d
    eig = np.linalg.eigvalsh(gram_from_squared(sq))
    scale = max(1.0, float(sq.max()))
    return bool(eig.min() >= -EIGEN_TOL * scale)


def four_point_check_batch(d: np.ndarray) -> np.ndarray:
    """Vectorised :func:`four_point_check` over a stack of (n, 4, 4) distance matrices.

    No triangle-inequality validation; callers pass metric-generated matrices.
    """
    sq = np.asarray(d, dtype=np.float64) ** 2
    eig = np.linalg.eigvalsh(gram_from_squared(sq))
    scale = np.maximum(1.0, sq.reshape(len(sq), -1).max(axis=1))
    return eig.min(axis=1) >= -EIGEN_TOL * scale
