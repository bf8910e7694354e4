"""Global/local feature fusion and the FVEC1 labeled-vector text format.

FVEC1 files carry one header line `FVEC1 <count> <dim>` followed by one
record per line: `<label:int> <v_0> ... <v_{dim-1}>`. Values are written with
17 significant digits so every finite double round-trips exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import MalformedHeader, NonFiniteLocal, RecordDimMismatch
from .lbp_encode import GlobalFeatureVector


def fuse(global_vec: GlobalFeatureVector, local: np.ndarray | None = None) -> np.ndarray:
    """Concatenate [global | local]; a missing local yields the global alone."""
    g = np.asarray(global_vec.values, dtype=np.float64)
    if local is None:
        return g.copy()
    local = np.asarray(local, dtype=np.float64)
    if not np.all(np.isfinite(local)):
        raise NonFiniteLocal("local vector contains NaN or Inf")
    return np.concatenate([g, local])


def write_fvec(path, vectors: np.ndarray, labels) -> None:
    """Write labeled vectors as an FVEC1 file (UTF-8, LF)."""
    vectors = np.asarray(vectors, dtype=np.float64)
    labels = list(labels)
    if vectors.ndim != 2:
        raise ValueError(f"expected an (n, dim) matrix, got shape {vectors.shape}")
    if len(labels) != vectors.shape[0]:
        raise ValueError(f"{len(labels)} labels for {vectors.shape[0]} records")
    lines = [f"FVEC1 {vectors.shape[0]} {vectors.shape[1]}"]
    for label, row in zip(labels, vectors):
        lines.append(f"{int(label)} " + " ".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_fvec(path) -> tuple[np.ndarray, np.ndarray]:
    """Read an FVEC1 file; returns (vectors, labels)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise MalformedHeader(f"{path}: empty file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "FVEC1":
        raise MalformedHeader(f"{path}: bad header {lines[0]!r}")
    try:
        count, dim = int(head[1]), int(head[2])
    except ValueError as exc:
        raise MalformedHeader(f"{path}: non-integer header fields") from exc
    if len(lines) - 1 != count:
        raise MalformedHeader(f"{path}: header says {count} records, file has {len(lines) - 1}")
    labels = np.empty(count, dtype=np.int64)
    vectors = np.empty((count, dim), dtype=np.float64)
    for idx, line in enumerate(lines[1:]):
        fields = line.split()
        if len(fields) != dim + 1:
            raise RecordDimMismatch(f"{path}: record {idx} has {len(fields) - 1} values, expected {dim}")
        labels[idx] = int(fields[0])
        vectors[idx] = [float(f) for f in fields[1:]]
    return vectors, labels
