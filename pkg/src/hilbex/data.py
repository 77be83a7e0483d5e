"""Synthetic datasets and vector file I/O.

Generation uses numpy's PCG64 bit generator (``numpy.random.default_rng``),
whose output stream is specified and platform independent, so a
``(n, dim, seed)`` triple always yields the same array.

Two file formats are supported:

* text: one vector per line, whitespace separated decimals, optional
  ``# dim=<d> count=<n>`` header; other ``#`` lines are comments.
* binary: ``HLBX1`` magic, little-endian ``u32`` dim, ``u64`` count, then
  ``count * dim`` little-endian float32 values in row order.
"""
from __future__ import annotations

import re
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, ParseError
from .metrics import MetricDescriptor, get_metric

MAGIC = b"HLBX1"
_HEADER = struct.Struct("<5sIQ")
_HEADER_RE = re.compile(r"#\s*dim=(\d+)\s+count=(\d+)")

SPACE_METRICS = ("euc", "jsd", "tri")


@dataclass(frozen=True)
class Dataset:
    vectors: np.ndarray
    label: str = ""
    seed: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.vectors)
        if arr.ndim != 2:
            raise InputError(f"dataset must be a (count, dim) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("dataset contains non-finite values")
        object.__setattr__(self, "vectors", arr)

    def __len__(self):
        return len(self.vectors)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def parse_space(label: str) -> tuple[MetricDescriptor, int]:
    """Split a space label such as ``jsd_12`` into (metric, dimension)."""
    name, sep, dim = label.rpartition("_")
    if not sep or not dim.isdigit() or int(dim) < 1:
        raise InputError(f"malformed space label {label!r}; expected <metric>_<dim>")
    return get_metric(name), int(dim)


def gen_uniform(n: int, dim: int, seed: int, label: str = "") -> Dataset:
    """``n`` points with i.i.d. components uniform on [0, 1)."""
    if n < 1 or dim < 1:
        raise InputError("n and dim must be positive")
    rng = np.random.default_rng(seed)
    return Dataset(rng.random((n, dim)), label or f"uniform_{dim}", seed)


def to_simplex(d: Dataset) -> Dataset:
    arr = d.vectors
    if np.any(arr < 0):
        raise InputError("cannot normalise negative components onto the simplex")
    sums = arr.sum(axis=1, keepdims=True)
    if np.any(sums <= 0):
        row = int(np.argmax(sums[:, 0] <= 0))
        raise InputError(f"vector {row} is all zero and has no simplex image")
    return Dataset(arr / sums, d.label, d.seed)


def generate_space(label: str, n: int, seed: int) -> Dataset:
    """Generate the dataset for a space label: uniform, simplex-normalised when the metric needs it."""
    metric, dim = parse_space(label)
    ds = gen_uniform(n, dim, seed, label)
    if metric.requires_simplex:
        ds = to_simplex(ds)
    return ds


def prepare_for_metric(d: Dataset, metric: MetricDescriptor) -> Dataset:
    """Make loaded data usable by ``metric``.

    float32 storage loses the exact unit sum, so simplex metrics get their
    rows renormalised in float64.
    """
    arr = np.asarray(d.vectors, dtype=np.float64)
    if metric.requires_simplex:
        d = to_simplex(Dataset(arr, d.label, d.seed))
        arr = d.vectors
    metric.check_points(arr)
    return Dataset(arr, d.label, d.seed)


# -- binary ---------------------------------------------------------------------

def save_binary(d: Dataset, path) -> None:
    arr = np.ascontiguousarray(d.vectors, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, arr.shape[1], arr.shape[0]))
        fh.write(arr.tobytes())


def load_binary(path) -> Dataset:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise ParseError("file too short for HLBX1 header")
        magic, dim, count = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ParseError(f"bad magic {magic!r}")
        if dim < 1:
            raise ParseError("dimension must be positive")
        body = fh.read()
    expected = count * dim * 4
    if len(body) != expected:
        raise ParseError(f"expected {expected} payload bytes for {count}x{dim}, found {len(body)}")
    if count == 0:
        raise ParseError("file contains no vectors")
    arr = np.frombuffer(body, dtype="<f4").reshape(count, dim)
    return Dataset(arr.astype(np.float32), Path(path).stem)


# -- text -----------------------------------------------------------------------

def save_text(d: Dataset, path) -> None:
    arr = np.asarray(d.vectors)
    with open(path, "w") as fh:
        fh.write(f"# dim={arr.shape[1]} count={arr.shape[0]}\n")
        np.savetxt(fh, arr, fmt="%.9g")


def load_text(path) -> Dataset:
    rows = []
    dim = None
    declared = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                m = _HEADER_RE.match(stripped)
                if m and not rows:
                    declared = (int(m.group(1)), int(m.group(2)))
                continue
            try:
                row = [float(tok) for tok in stripped.split()]
            except ValueError as exc:
                raise ParseError(f"non-numeric token ({exc})", lineno) from None
            if dim is None:
                dim = len(row)
                if declared and declared[0] != dim:
                    raise ParseError(f"header declares dim={declared[0]} but row has {dim} values", lineno)
            elif len(row) != dim:
                raise ParseError(f"ragged row: expected {dim} values, found {len(row)}", lineno)
            rows.append(row)
    if not rows:
        raise ParseError("file contains no vectors")
    if declared and declared[1] != len(rows):
        raise ParseError(f"header declares count={declared[1]} but file has {len(rows)} rows")
    try:
        return Dataset(np.array(rows, dtype=np.float64), Path(path).stem)
    except InputError as exc:
        raise ParseError(str(exc)) from None


def _is_binary(path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(len(MAGIC)) == MAGIC


def save_vectors(d: Dataset, path, binary: bool | None = None) -> None:
    """Write ``d``; binary unless ``binary`` is False or the suffix is .txt."""
    if binary is None:
        binary = Path(path).suffix.lower() not in (".txt", ".tsv", ".dat")
    (save_binary if binary else save_text)(d, path)


def load_vectors(path) -> Dataset:
    """Read either format, sniffing the magic bytes."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    return load_binary(path) if _is_binary(path) else load_text(path)
