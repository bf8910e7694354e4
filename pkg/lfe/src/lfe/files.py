"""Readers and writers for the pipeline's file interfaces.

These parse the upstream text formats directly (manifest lines, SPLIT1,
FVEC1) and the dumped per-image PNG feature sets, keeping this package
decoupled from the feature-extraction codebase.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import MalformedFile

FEATURE_SET_NAMES = ("bi", "cc", "dc", "ec")


def read_manifest(path) -> list[tuple[str, int]]:
    base = Path(path).parent
    entries = []
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "," not in line:
            raise MalformedFile(f"{path}:{line_no}: expected '<path>,<class_id>'")
        rel, cls = line.rsplit(",", 1)
        entry = Path(rel.strip())
        if not entry.is_absolute():
            entry = base / entry
        entries.append((str(entry), int(cls)))
    if not entries:
        raise MalformedFile(f"{path}: manifest lists no images")
    return entries


def read_split(path) -> list[str]:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("SPLIT1 "):
        raise MalformedFile(f"{path}: not a SPLIT1 file")
    count = int(lines[0].split()[1])
    tags = [""] * count
    for line in lines[1:]:
        idx, tag = line.split()
        tags[int(idx)] = tag
    if "" in tags:
        raise MalformedFile(f"{path}: missing assignments")
    return tags


def load_png(path) -> np.ndarray:
    with Image.open(path) as img:
        img.load()
        return np.asarray(img, dtype=np.uint8)


def feature_set_paths(directory, index: int) -> dict[str, Path]:
    root = Path(directory)
    paths = {name: root / f"{index:05d}_{name}.png" for name in FEATURE_SET_NAMES}
    missing = [str(p) for p in paths.values() if not p.exists()]
    if missing:
        raise MalformedFile(f"missing feature images: {', '.join(missing)}")
    return paths


def write_fvec(path, vectors: np.ndarray, labels) -> None:
    lines = [f"FVEC1 {vectors.shape[0]} {vectors.shape[1]}"]
    for label, row in zip(labels, vectors):
        lines.append(f"{int(label)} " + " ".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_fvec(path) -> tuple[np.ndarray, np.ndarray]:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").split("\n") if ln.strip()]
    if not lines or not lines[0].startswith("FVEC1 "):
        raise MalformedFile(f"{path}: not an FVEC1 file")
    _, count, dim = lines[0].split()
    count, dim = int(count), int(dim)
    if len(lines) - 1 != count:
        raise MalformedFile(f"{path}: header says {count} records, file has {len(lines) - 1}")
    labels = np.empty(count, dtype=np.int64)
    vectors = np.empty((count, dim), dtype=np.float64)
    for idx, line in enumerate(lines[1:]):
        fields = line.split()
        if len(fields) != dim + 1:
            raise MalformedFile(f"{path}: record {idx} has {len(fields) - 1} values, expected {dim}")
        labels[idx] = int(fields[0])
        vectors[idx] = [float(f) for f in fields[1:]]
    return vectors, labels
