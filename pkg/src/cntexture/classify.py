"""One-vs-rest linear SVM and evaluation metrics.

Each binary problem minimizes (1/2)||w||^2 + C * sum(hinge) and is solved in
the dual by deterministic coordinate descent (seeded epoch permutations) to a
fixed duality-gap tolerance. Features are standardized from the training set;
the bias is the weight of an appended unit feature.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, EmptyData, LengthMismatch, MalformedHeader, SingleClass

DUALITY_GAP_TOL = 1e-4
MAX_EPOCHS = 10 * 1000  # cap of 10 * n * 1000 coordinate updates


@dataclass(frozen=True)
class SvmModel:
    """Per-class weights/biases plus the feature standardization used to train."""

    weights: np.ndarray  # (n_classes, d)
    biases: np.ndarray   # (n_classes,)
    feature_mean: np.ndarray
    feature_std: np.ndarray

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class EvalReport:
    overall_accuracy: float
    confusion: np.ndarray  # row-normalized, rows = true class


def _standardize_params(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std[std == 0] = 1.0
    return mean, std


def _dual_cd_binary(x: np.ndarray, y: np.ndarray, c: float, rng: np.random.Generator) -> np.ndarray:
    """Solve one binary hinge-loss problem; returns the augmented weight vector.

    x already carries the appended bias column; y is +/-1.
    """
    n = x.shape[0]
    q_diag = np.einsum("ij,ij->i", x, x)
    alpha = np.zeros(n)
    w = np.zeros(x.shape[1])
    for _ in range(MAX_EPOCHS):
        for i in rng.permutation(n):
            if q_diag[i] == 0:
                continue
            g = y[i] * (x[i] @ w) - 1.0
            a_new = min(max(alpha[i] - g / q_diag[i], 0.0), c)
            if a_new != alpha[i]:
                w += (a_new - alpha[i]) * y[i] * x[i]
                alpha[i] = a_new
        margins = 1.0 - y * (x @ w)
        primal = 0.5 * (w @ w) + c * np.sum(np.maximum(margins, 0.0))
        dual = alpha.sum() - 0.5 * (w @ w)
        if primal - dual <= DUALITY_GAP_TOL:
            break
    return w


def svm_train(vectors: np.ndarray, labels, c: float = 1.0, seed: int = 0) -> SvmModel:
    """Train a one-vs-rest linear SVM on standardized features."""
    x = np.asarray(vectors, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyData(f"expected a nonempty (n, d) matrix, got shape {x.shape}")
    if x.shape[0] < 2:
        raise EmptyData("need at least 2 training samples")
    n_classes = int(y.max()) + 1
    if np.unique(y).size < 2:
        raise SingleClass("training labels contain a single class")

    mean, std = _standardize_params(x)
    xs = (x - mean) / std
    xa = np.hstack([xs, np.ones((x.shape[0], 1))])

    weights = np.zeros((n_classes, x.shape[1]))
    biases = np.zeros(n_classes)
    for cls in range(n_classes):
        target = np.where(y == cls, 1.0, -1.0)
        if not np.any(y == cls):
            continue
        rng = np.random.default_rng([seed, cls])
        w_aug = _dual_cd_binary(xa, target, c, rng)
        weights[cls] = w_aug[:-1]
        biases[cls] = w_aug[-1]
    return SvmModel(weights=weights, biases=biases, feature_mean=mean, feature_std=std)


def svm_predict(model: SvmModel, vectors: np.ndarray) -> np.ndarray:
    """Argmax of per-class scores; ties resolve to the lowest class id."""
    x = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if x.shape[1] != model.dim:
        raise DimensionMismatch(f"vectors have dim {x.shape[1]}, model expects {model.dim}")
    xs = (x - model.feature_mean) / model.feature_std
    scores = xs @ model.weights.T + model.biases
    return np.argmax(scores, axis=1)


def evaluate(pred, truth, n_classes: int) -> EvalReport:
    """Overall accuracy and row-normalized confusion matrix."""
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.shape != truth.shape or pred.size == 0:
        raise LengthMismatch(f"pred has {pred.size} entries, truth has {truth.size}")
    counts = np.zeros((n_classes, n_classes), dtype=np.float64)
    np.add.at(counts, (truth, pred), 1.0)
    oa = float(np.trace(counts) / pred.size)
    row_sums = counts.sum(axis=1, keepdims=True)
    confusion = np.divide(counts, row_sums, out=np.zeros_like(counts), where=row_sums > 0)
    return EvalReport(overall_accuracy=oa, confusion=confusion)


def save_svm(model: SvmModel, path) -> None:
    """Persist an SvmModel as decimal text (SVM1 format)."""
    lines = [f"SVM1 {model.n_classes} {model.dim}"]
    lines.append(" ".join(f"{v:.17g}" for v in model.feature_mean))
    lines.append(" ".join(f"{v:.17g}" for v in model.feature_std))
    for cls in range(model.n_classes):
        row = " ".join(f"{v:.17g}" for v in model.weights[cls])
        lines.append(f"{row} {model.biases[cls]:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_svm(path) -> SvmModel:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").split("\n") if ln.strip()]
    if not lines or not lines[0].startswith("SVM1 "):
        raise MalformedHeader(f"{path}: not an SVM1 file")
    _, n_classes, d = lines[0].split()
    n_classes, d = int(n_classes), int(d)
    if len(lines) != n_classes + 3:
        raise MalformedHeader(f"{path}: expected {n_classes + 3} lines, found {len(lines)}")
    mean = np.array([float(v) for v in lines[1].split()])
    std = np.array([float(v) for v in lines[2].split()])
    weights = np.empty((n_classes, d))
    biases = np.empty(n_classes)
    for cls in range(n_classes):
        fields = [float(v) for v in lines[3 + cls].split()]
        if len(fields) != d + 1:
            raise MalformedHeader(f"{path}: class {cls} line has {len(fields)} fields, expected {d + 1}")
        weights[cls] = fields[:-1]
        biases[cls] = fields[-1]
    return SvmModel(weights=weights, biases=biases, feature_mean=mean, feature_std=std)
