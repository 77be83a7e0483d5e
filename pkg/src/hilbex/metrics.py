"""Distance functions over dense real vectors.

Every metric is wrapped in a :class:`MetricDescriptor` that carries a
row-wise vectorised kernel plus the two capability flags the rest of the
package relies on: whether Hilbert exclusion is guaranteed to be safe, and
whether inputs must be probability vectors.

The kernels take two 2-D arrays and return ``d(A[i], B[i])``; numpy
broadcasting gives one-to-many evaluation for free (``A`` of shape
``(1, dim)``).  They do no validation.  The public scalar functions and
:meth:`MetricDescriptor.distance` validate their inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InputError

SIMPLEX_TOL = 1e-9
# sqrt arguments below zero by at most this much are rounding residue
CLAMP_TOL = 1e-12

Kernel = Callable[[np.ndarray, np.ndarray], np.ndarray]


def as_vector(v) -> np.ndarray:
    """Return ``v`` as a finite 1-D float64 array, or raise InputError."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise InputError(f"expected a 1-D vector, got shape {arr.shape}")
    if arr.size == 0:
        raise InputError("vector must have at least one component")
    if not np.all(np.isfinite(arr)):
        raise InputError("vector components must be finite")
    return arr


def _pair(v, w) -> tuple[np.ndarray, np.ndarray]:
    v, w = as_vector(v), as_vector(w)
    if v.shape != w.shape:
        raise InputError(f"dimension mismatch: {v.size} vs {w.size}")
    return v, w


def _check_simplex(arr: np.ndarray) -> None:
    if np.any(arr < 0):
        raise InputError("simplex vector has a negative component")
    sums = arr.sum(axis=-1)
    bad = np.abs(sums - 1.0) > SIMPLEX_TOL
    if np.any(bad):
        worst = float(np.max(np.abs(sums - 1.0)))
        raise InputError(f"vector does not sum to 1 (deviation {worst:.3g})")


def _check_nonzero(arr: np.ndarray) -> None:
    if np.any(np.all(arr == 0, axis=-1)):
        raise InputError("zero vector has no direction")


def _clamped_sqrt(x: np.ndarray) -> np.ndarray:
    if np.any(x < -CLAMP_TOL):
        raise ArithmeticError(f"negative value {float(np.min(x))!r} under square root")
    return np.sqrt(np.maximum(x, 0.0))


@dataclass(frozen=True)
class MetricDescriptor:
    name: str
    paired: Kernel
    hilbert_safe: bool
    requires_simplex: bool = False
    requires_nonzero: bool = False

    def check_points(self, points) -> np.ndarray:
        """Validate a 2-D array of points for this metric and return it as float64."""
        arr = np.asarray(points, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] == 0:
            raise InputError(f"expected a (count, dim) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("points must be finite")
        if self.requires_simplex and arr.size:
            _check_simplex(arr)
        if self.requires_nonzero and arr.size:
            _check_nonzero(arr)
        return arr

    def distance(self, v, w) -> float:
        v, w = _pair(v, w)
        if self.requires_simplex:
            _check_simplex(v)
            _check_simplex(w)
        if self.requires_nonzero:
            _check_nonzero(v)
            _check_nonzero(w)
        return float(self.paired(v[None, :], w[None, :])[0])

    def to_many(self, q: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Distances from one point to every row of ``points`` (unchecked)."""
        return self.paired(q[None, :], points)

    def __call__(self, v, w) -> float:
        return self.distance(v, w)


# -- kernels ----------------------------------------------------------------

def _euc_kernel(a, b):
    diff = a - b
    return np.sqrt((diff * diff).sum(axis=-1))


def _jsd_kernel(a, b):
    # Equivalent to 1 - 1/2 sum(h(a)+h(b)-h(a+b)) on the simplex, written as
    # two relative-entropy terms so that identical inputs give exactly zero.
    s = a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        ta = np.where(a > 0, a * np.log2(2.0 * a / s), 0.0)
        tb = np.where(b > 0, b * np.log2(2.0 * b / s), 0.0)
    div = 0.5 * (ta + tb).sum(axis=-1)
    return np.minimum(_clamped_sqrt(div), 1.0)


def _tri_kernel(a, b):
    diff = a - b
    s = a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(s > 0, diff * diff / s, 0.0)
    return np.sqrt(terms.sum(axis=-1))


def _cos_similarity(a, b):
    # sqrt(|a|^2 |b|^2) rather than |a| |b| keeps S(v, v) exactly 1
    na2 = (a * a).sum(axis=-1)
    nb2 = (b * b).sum(axis=-1)
    s = (a * b).sum(axis=-1) / np.sqrt(na2 * nb2)
    return np.clip(s, -1.0, 1.0)


def _cos_sqrt_kernel(a, b):
    return np.sqrt(1.0 - _cos_similarity(a, b))


def _cos_angle_kernel(a, b):
    return 1.0 - np.arccos(_cos_similarity(a, b)) / (2.0 * math.pi)


def _man_kernel(a, b):
    return np.abs(a - b).sum(axis=-1)


def _sqrt_man_kernel(a, b):
    return np.sqrt(np.abs(a - b).sum(axis=-1))


EUC = MetricDescriptor("euc", _euc_kernel, hilbert_safe=True)
JSD = MetricDescriptor("jsd", _jsd_kernel, hilbert_safe=True, requires_simplex=True)
TRI = MetricDescriptor("tri", _tri_kernel, hilbert_safe=True, requires_simplex=True)
COS_SQRT = MetricDescriptor("cos_sqrt", _cos_sqrt_kernel, hilbert_safe=True, requires_nonzero=True)
# a proper angle metric in spirit, but not Hilbert embeddable
COS_ANGLE = MetricDescriptor("cos_angle", _cos_angle_kernel, hilbert_safe=False, requires_nonzero=True)
MAN = MetricDescriptor("man", _man_kernel, hilbert_safe=False)
SQRT_MAN = MetricDescriptor("sqrt_man", _sqrt_man_kernel, hilbert_safe=True)

METRICS = {m.name: m for m in (EUC, JSD, TRI, COS_SQRT, COS_ANGLE, MAN, SQRT_MAN)}


def euclidean(v, w) -> float:
    return EUC.distance(v, w)


def jsd_distance(v, w) -> float:
    """Square root of the base-2 Jensen-Shannon divergence; lies in [0, 1]."""
    return JSD.distance(v, w)


def triangular_distance(v, w) -> float:
    """Square root of the triangular discrimination sum((v-w)^2 / (v+w))."""
    return TRI.distance(v, w)


def cosine_sqrt_distance(v, w) -> float:
    """sqrt(1 - cosine similarity), i.e. Euclidean distance of the unit vectors over sqrt(2)."""
    return COS_SQRT.distance(v, w)


def cosine_angle_distance(v, w) -> float:
    """``1 - arccos(S) / 2pi``.  Gives 1 for parallel vectors, not 0."""
    return COS_ANGLE.distance(v, w)


def manhattan(v, w) -> float:
    return MAN.distance(v, w)


def sqrt_manhattan(v, w) -> float:
    return SQRT_MAN.distance(v, w)


def power_transform(base: MetricDescriptor, alpha: float) -> MetricDescriptor:
    """Return the metric ``d(x, y) ** alpha``.

    Any metric raised to a power in (0, 1/2] has the four-point property,
    so the result is flagged Hilbert-safe exactly when ``alpha <= 0.5``.
    Larger exponents are flagged unsafe even for safe bases.
    """
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0) or math.isnan(alpha):
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    kernel = base.paired

    def _pow_kernel(a, b):
        return kernel(a, b) ** alpha

    return MetricDescriptor(
        f"pow:{base.name}:{alpha:g}",
        _pow_kernel,
        hilbert_safe=alpha <= 0.5,
        requires_simplex=base.requires_simplex,
        requires_nonzero=base.requires_nonzero,
    )


def get_metric(name: str) -> MetricDescriptor:
    """Look up a metric by its stable identifier, including ``pow:<base>:<alpha>``."""
    if name in METRICS:
        return METRICS[name]
    if name.startswith("pow:"):
        parts = name.split(":")
        if len(parts) != 3:
            raise InputError(f"malformed power metric {name!r}; expected pow:<base>:<alpha>")
        try:
            alpha = float(parts[2])
        except ValueError:
            raise InputError(f"malformed exponent in {name!r}") from None
        return power_transform(get_metric(parts[1]), alpha)
    raise InputError(f"unknown metric {name!r}; known: {', '.join(sorted(METRICS))}, pow:<base>:<alpha>")


def normalize_to_simplex(v) -> np.ndarray:
    v = as_vector(v)
    if np.any(v < 0):
        raise InputError("cannot normalise a vector with negative components")
    total = v.sum()
    if total <= 0:
        raise InputError("cannot normalise an all-zero vector")
    return v / total
