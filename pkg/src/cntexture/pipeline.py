"""End-to-end orchestration: manifests, splits, extraction, runs.

A manifest lists `<path>,<class_id>` lines (with optional `# class <id>
<name>` directives). Images are split 20/50/30 per class into finetune,
train, and test sets with a seeded generator; the finetune share is reserved
for the external local-feature extractor and never touches the SVM. All
artifacts are plain text so repeated runs are byte-comparable.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import classify, reduce as reduce_mod
from .cn_graph import CnParams
from .cn_measures import feature_images
from .errors import CnTextureError, MisalignedLocalVectors, TooFewSamples
from .fusion import read_fvec, write_fvec
from .imaging import ImageTensor, load_image, resize_bilinear, save_png
from .lbp_encode import global_vector

SPLIT_TAGS = ("finetune", "train", "test")
SPLIT_FRACTIONS = (0.2, 0.5, 0.3)
TARGET_SIZE = (128, 128)


@dataclass(frozen=True)
class DatasetManifest:
    entries: list[tuple[str, int]]
    class_names: dict[int, str]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def labels(self) -> np.ndarray:
        return np.array([cls for _, cls in self.entries], dtype=np.int64)


@dataclass(frozen=True)
class SplitAssignment:
    tags: list[str]
    seed: int

    def indices(self, tag: str) -> np.ndarray:
        return np.array([i for i, t in enumerate(self.tags) if t == tag], dtype=np.int64)


def load_manifest(path) -> DatasetManifest:
    base = Path(path).parent
    entries: list[tuple[str, int]] = []
    names: dict[int, str] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = line[1:].split()
            if len(fields) >= 3 and fields[0] == "class":
                names[int(fields[1])] = " ".join(fields[2:])
            continue
        if "," not in line:
            raise ValueError(f"{path}:{line_no}: expected '<path>,<class_id>'")
        rel, cls = line.rsplit(",", 1)
        entry = Path(rel.strip())
        if not entry.is_absolute():
            entry = base / entry
        entries.append((str(entry), int(cls)))
    if not entries:
        raise ValueError(f"{path}: manifest lists no images")
    ids = sorted({cls for _, cls in entries})
    if ids != list(range(len(ids))):
        raise ValueError(f"{path}: class ids must be contiguous from 0, got {ids}")
    for cls in ids:
        names.setdefault(cls, f"class{cls}")
    return DatasetManifest(entries=entries, class_names=names)


def _largest_remainder(n: int) -> tuple[int, int, int]:
    """Split n into 20/50/30 shares; remainders go to the largest fractions,
    ties broken toward the larger share (train, then test, then finetune)."""
    quotas = [f * n for f in SPLIT_FRACTIONS]
    floors = [int(q) for q in quotas]
    fractions = [q - fl for q, fl in zip(quotas, floors)]
    # priority on ties: train (idx 1) first, then test (2), then finetune (0)
    tie_rank = {0: 2, 1: 0, 2: 1}
    order = sorted(range(3), key=lambda i: (-fractions[i], tie_rank[i]))
    for i in range(n - sum(floors)):
        floors[order[i % 3]] += 1
    return tuple(floors)


def split_dataset(manifest: DatasetManifest, seed: int) -> SplitAssignment:
    """Deterministic stratified 20/50/30 split over manifest order."""
    labels = manifest.labels()
    rng = np.random.default_rng(seed)
    tags = [""] * len(manifest.entries)
    for cls in range(manifest.n_classes):
        idx = np.nonzero(labels == cls)[0]
        if idx.size < 2:
            raise TooFewSamples(f"class {cls} has {idx.size} samples, need at least 2")
        idx = idx[rng.permutation(idx.size)]
        n_ft, n_tr, n_te = _largest_remainder(idx.size)
        for j, i in enumerate(idx):
            if j < n_ft:
                tags[i] = "finetune"
            elif j < n_ft + n_tr:
                tags[i] = "train"
            else:
                tags[i] = "test"
    return SplitAssignment(tags=tags, seed=seed)


def save_split(split: SplitAssignment, path) -> None:
    lines = [f"SPLIT1 {len(split.tags)} {split.seed}"]
    lines += [f"{i} {tag}" for i, tag in enumerate(split.tags)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_split(path) -> SplitAssignment:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("SPLIT1 "):
        raise ValueError(f"{path}: not a SPLIT1 file")
    _, count, seed = lines[0].split()
    tags = [""] * int(count)
    for line in lines[1:]:
        idx, tag = line.split()
        if tag not in SPLIT_TAGS:
            raise ValueError(f"{path}: unknown tag {tag!r}")
        tags[int(idx)] = tag
    if "" in tags:
        raise ValueError(f"{path}: missing assignments")
    return SplitAssignment(tags=tags, seed=int(seed))


def _to_three_band(bands: list[np.ndarray]) -> ImageTensor:
    stack = np.stack(bands, axis=2)
    return ImageTensor(stack)


def _extract_one(task) -> np.ndarray:
    path, cls, radius, threshold, normalize, dump_dir, index = task
    try:
        params = CnParams(radius=radius, threshold=threshold)
        img = resize_bilinear(load_image(path), TARGET_SIZE)
        feats = [feature_images(img.band(b), params) for b in range(img.bands)]
        vec = global_vector(img, feats, normalize=normalize)
        if dump_dir is not None:
            out = Path(dump_dir)
            save_png(img, out / f"{index:05d}_bi.png")
            for pos, name in enumerate(("cc", "dc", "ec")):
                tensor = _to_three_band([feats[b][pos] for b in range(img.bands)])
                save_png(tensor, out / f"{index:05d}_{name}.png")
    except CnTextureError as exc:
        raise type(exc)(f"{path}: {exc}") from exc
    return vec.values


def extract(
    manifest: DatasetManifest,
    params: CnParams,
    out=None,
    normalize: bool = True,
    dump_dir=None,
    jobs: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Global feature vectors for every manifest entry, in manifest order."""
    if dump_dir is not None:
        Path(dump_dir).mkdir(parents=True, exist_ok=True)
    tasks = [
        (path, cls, params.radius, params.threshold, normalize, dump_dir, i)
        for i, (path, cls) in enumerate(manifest.entries)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_extract_one, tasks))
    else:
        rows = [_extract_one(t) for t in tasks]
    vectors = np.vstack(rows)
    labels = manifest.labels()
    if out is not None:
        write_fvec(out, vectors, labels)
    return vectors, labels


@dataclass(frozen=True)
class RunOptions:
    seed: int = 42
    params: CnParams = CnParams()
    local_path: str | None = None
    reduce: str = "none"  # none | pca | chi2
    pca_k: int | None = None
    pca_threshold: float | None = None
    chi2_k: int | None = None
    svm_c: float = 1.0
    normalize_hist: bool = True
    repeats: int = 1
    jobs: int = 1


@dataclass(frozen=True)
class RunResult:
    report: classify.EvalReport
    mean_oa: float
    per_repeat_oa: list[float]
    reduced_dim: int
    fused_dim: int


def _load_local(path, manifest: DatasetManifest) -> np.ndarray:
    vectors, labels = read_fvec(path)
    if vectors.shape[0] != len(manifest.entries):
        raise MisalignedLocalVectors(
            f"{path}: {vectors.shape[0]} local vectors for {len(manifest.entries)} manifest entries"
        )
    if not np.array_equal(labels, manifest.labels()):
        raise MisalignedLocalVectors(f"{path}: record labels do not follow manifest order")
    if not np.all(np.isfinite(vectors)):
        raise MisalignedLocalVectors(f"{path}: local vectors contain non-finite values")
    return vectors


def run(manifest: DatasetManifest, options: RunOptions, outdir) -> RunResult:
    """Split, extract, optionally fuse and reduce, train, evaluate, write artifacts."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    vectors, labels = extract(
        manifest, options.params, out=outdir / "global.fvec",
        normalize=options.normalize_hist, jobs=options.jobs,
    )
    if options.local_path is not None:
        local = _load_local(options.local_path, manifest)
        vectors = np.hstack([vectors, local])
    fused_dim = vectors.shape[1]

    per_repeat: list[float] = []
    confusions: list[np.ndarray] = []
    reduced_dim = fused_dim
    for rep in range(options.repeats):
        seed = options.seed + rep
        split = split_dataset(manifest, seed)
        if rep == 0:
            save_split(split, outdir / "split.txt")
        tr = split.indices("train")
        te = split.indices("test")
        x_tr, y_tr = vectors[tr], labels[tr]
        x_te, y_te = vectors[te], labels[te]

        if options.reduce == "pca":
            model = reduce_mod.pca_fit(x_tr, k=options.pca_k, threshold=options.pca_threshold)
            if rep == 0:
                reduce_mod.save_pca(model, outdir / "pca_model.txt")
                curve = np.cumsum(model.explained_variance_ratio)
                lines = ["components,cumulative_explained_variance"]
                lines += [f"{i + 1},{v:.17g}" for i, v in enumerate(curve)]
                (outdir / "variance_curve.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
            x_tr = reduce_mod.pca_transform(model, x_tr)
            x_te = reduce_mod.pca_transform(model, x_te)
        elif options.reduce == "chi2":
            k = options.chi2_k if options.chi2_k is not None else manifest.n_classes
            selector = reduce_mod.chi2_select(x_tr, y_tr, k)
            x_tr = x_tr[:, selector.selected]
            x_te = x_te[:, selector.selected]
        elif options.reduce != "none":
            raise ValueError(f"unknown reduction {options.reduce!r}")
        reduced_dim = x_tr.shape[1]

        svm = classify.svm_train(x_tr, y_tr, c=options.svm_c, seed=seed)
        if rep == 0:
            classify.save_svm(svm, outdir / "svm_model.txt")
        report = classify.evaluate(classify.svm_predict(svm, x_te), y_te, manifest.n_classes)
        per_repeat.append(report.overall_accuracy)
        confusions.append(report.confusion)

    mean_confusion = np.mean(confusions, axis=0)
    mean_oa = float(np.mean(per_repeat))
    result = RunResult(
        report=classify.EvalReport(overall_accuracy=mean_oa, confusion=mean_confusion),
        mean_oa=mean_oa,
        per_repeat_oa=per_repeat,
        reduced_dim=reduced_dim,
        fused_dim=fused_dim,
    )
    _write_reports(manifest, options, result, outdir)
    return result


def _write_reports(manifest: DatasetManifest, options: RunOptions, result: RunResult, outdir: Path) -> None:
    conf_lines = [",".join(f"{v:.17g}" for v in row) for row in result.report.confusion]
    (outdir / "confusion.csv").write_text("\n".join(conf_lines) + "\n", encoding="utf-8")

    sizes = {tag: 0 for tag in SPLIT_TAGS}
    for tag in load_split(outdir / "split.txt").tags:
        sizes[tag] += 1

    lines = [
        "cntexture run report",
        f"images: {len(manifest.entries)}  classes: {manifest.n_classes}",
        f"seed: {options.seed}  repeats: {options.repeats}",
        f"graph: radius={options.params.radius:g} threshold={options.params.threshold:g}",
        f"features: fused_dim={result.fused_dim} reduced_dim={result.reduced_dim} "
        f"reduce={options.reduce} normalize_hist={options.normalize_hist}",
        f"svm: c={options.svm_c:g}",
        f"split sizes: finetune={sizes['finetune']} train={sizes['train']} test={sizes['test']}",
    ]
    for rep, oa in enumerate(result.per_repeat_oa):
        lines.append(f"repeat {rep}: OA = {oa:.6f}")
    lines.append(f"mean OA = {result.mean_oa:.6f}")
    (outdir / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    payload = {
        "images": len(manifest.entries),
        "classes": manifest.n_classes,
        "seed": options.seed,
        "repeats": options.repeats,
        "radius": options.params.radius,
        "threshold": options.params.threshold,
        "reduce": options.reduce,
        "normalize_hist": options.normalize_hist,
        "svm_c": options.svm_c,
        "fused_dim": result.fused_dim,
        "reduced_dim": result.reduced_dim,
        "per_repeat_oa": [float(v) for v in result.per_repeat_oa],
        "mean_oa": result.mean_oa,
        "confusion": [[float(v) for v in row] for row in result.report.confusion],
    }
    (outdir / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
