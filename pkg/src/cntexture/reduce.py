"""Dimensionality reduction: PCA and chi-square feature selection.

PCA is fit with a centered SVD; components can be selected by explicit count
or by a cumulative explained-variance threshold. Chi-square scores compare
per-class feature sums against the sums expected under class independence.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadK, DegenerateData, DimensionMismatch, InvalidThreshold, MalformedHeader, NegativeFeature


@dataclass(frozen=True)
class PcaModel:
    """Centered orthonormal projection with the full variance spectrum.

    `components` holds the k retained basis rows; `explained_variance_ratio`
    covers every component of the fit (length min(n-1, d)) so the cumulative
    curve can be reported past the cut.
    """

    mean: np.ndarray
    components: np.ndarray
    explained_variance_ratio: np.ndarray

    @property
    def k(self) -> int:
        return self.components.shape[0]

    @property
    def dim(self) -> int:
        return self.components.shape[1]


@dataclass(frozen=True)
class Chi2Selector:
    """Per-feature chi-square scores and the sorted indices of the top k."""

    scores: np.ndarray
    selected: np.ndarray


def pca_fit(vectors: np.ndarray, k: int | None = None, threshold: float | None = None) -> PcaModel:
    """Fit PCA; pick components by explicit k or smallest count reaching `threshold`."""
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected an (n, d) matrix, got shape {x.shape}")
    n, d = x.shape
    if n < 2:
        raise DegenerateData(f"need at least 2 samples, got {n}")
    if threshold is not None and not 0 < threshold <= 1:
        raise InvalidThreshold(f"threshold must be in (0, 1], got {threshold}")
    if k is None and threshold is None:
        threshold = 0.99

    mean = x.mean(axis=0)
    centered = x - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    variances = s**2 / (n - 1)
    total = variances.sum()
    ratios = variances / total if total > 0 else np.zeros_like(variances)

    # deterministic sign: largest-magnitude entry of each component positive
    flips = np.sign(vt[np.arange(vt.shape[0]), np.argmax(np.abs(vt), axis=1)])
    flips[flips == 0] = 1.0
    vt = vt * flips[:, None]

    max_k = min(n - 1, d)
    if k is None:
        cumulative = np.cumsum(ratios)
        reached = np.nonzero(cumulative >= threshold - 1e-12)[0]
        k = int(reached[0]) + 1 if reached.size else max_k
    k = min(k, max_k)
    if k < 1:
        raise BadK(f"component count {k} must be >= 1")
    return PcaModel(mean=mean, components=vt[:k].copy(), explained_variance_ratio=ratios[:max_k].copy())


def pca_transform(model: PcaModel, vectors: np.ndarray) -> np.ndarray:
    """Project (v - mean) onto the retained components."""
    x = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if x.shape[1] != model.dim:
        raise DimensionMismatch(f"vectors have dim {x.shape[1]}, model expects {model.dim}")
    return (x - model.mean) @ model.components.T


def chi2_scores(vectors: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Chi-square statistic of each nonnegative feature against the labels."""
    x = np.asarray(vectors, dtype=np.float64)
    y = np.asarray(labels)
    if np.any(x < 0):
        raise NegativeFeature("chi-square selection needs nonnegative features")
    classes = np.unique(y)
    observed = np.stack([x[y == c].sum(axis=0) for c in classes])
    class_prob = np.array([(y == c).mean() for c in classes])
    expected = class_prob[:, None] * x.sum(axis=0)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(expected > 0, (observed - expected) ** 2 / expected, 0.0)
    return terms.sum(axis=0)


def chi2_select(vectors: np.ndarray, labels: np.ndarray, k: int) -> Chi2Selector:
    """Top-k features by chi-square score; ties broken toward lower index."""
    x = np.asarray(vectors, dtype=np.float64)
    if not 1 <= k <= x.shape[1]:
        raise BadK(f"k={k} outside 1..{x.shape[1]}")
    scores = chi2_scores(x, labels)
    # stable sort on (-score, index) keeps the lower index on ties
    order = np.argsort(-scores, kind="stable")
    selected = np.sort(order[:k])
    return Chi2Selector(scores=scores, selected=selected)


def save_pca(model: PcaModel, path) -> None:
    """Persist a PcaModel as decimal text (PCA1 format)."""
    lines = [f"PCA1 {model.dim} {model.k}"]
    lines.append(" ".join(f"{v:.17g}" for v in model.mean))
    for row in model.components:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    lines.append(" ".join(f"{v:.17g}" for v in model.explained_variance_ratio))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_pca(path) -> PcaModel:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").split("\n") if ln.strip()]
    if not lines or not lines[0].startswith("PCA1 "):
        raise MalformedHeader(f"{path}: not a PCA1 file")
    _, d, k = lines[0].split()
    d, k = int(d), int(k)
    if len(lines) != k + 3:
        raise MalformedHeader(f"{path}: expected {k + 3} lines, found {len(lines)}")
    mean = np.array([float(v) for v in lines[1].split()])
    components = np.array([[float(v) for v in lines[2 + i].split()] for i in range(k)])
    ratios = np.array([float(v) for v in lines[k + 2].split()])
    if mean.size != d or components.shape != (k, d):
        raise MalformedHeader(f"{path}: dimension fields disagree with payload")
    return PcaModel(mean=mean, components=components, explained_variance_ratio=ratios)
