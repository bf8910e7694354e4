import numpy as np
import pytest

from cntexture.cn_graph import CnParams
from cntexture.errors import MisalignedLocalVectors, TooFewSamples, UnreadableFile
from cntexture.fusion import read_fvec, write_fvec
from cntexture.imaging import ImageTensor, save_png
from cntexture.pipeline import (
    RunOptions,
    _largest_remainder,
    extract,
    load_manifest,
    load_split,
    run,
    save_split,
    split_dataset,
)
from cntexture.synthetic import make_corpus


def tiny_corpus(tmp_path, classes=2, per_class=6, size=16, seed=5):
    """Small manifest of flat-ish noise images, one intensity level per class."""
    rng = np.random.default_rng(seed)
    lines = []
    for cls in range(classes):
        for i in range(per_class):
            band = rng.integers(cls * 100, cls * 100 + 40, size=(size, size)).astype(np.uint8)
            name = f"c{cls}_{i}.png"
            save_png(ImageTensor(band[:, :, None]), tmp_path / name)
            lines.append(f"{name},{cls}")
    manifest = tmp_path / "manifest.txt"
    manifest.write_text("\n".join(lines) + "\n")
    return load_manifest(manifest)


class TestManifest:
    def test_relative_paths_and_names(self, tmp_path):
        (tmp_path / "a.png").write_bytes(b"")
        (tmp_path / "m.txt").write_text("# class 0 bark\n# class 1 grass\na.png,0\na.png,1\n")
        manifest = load_manifest(tmp_path / "m.txt")
        assert manifest.class_names == {0: "bark", 1: "grass"}
        assert manifest.entries[0][0] == str(tmp_path / "a.png")

    def test_non_contiguous_ids_rejected(self, tmp_path):
        (tmp_path / "m.txt").write_text("a.png,0\nb.png,2\n")
        with pytest.raises(ValueError, match="contiguous"):
            load_manifest(tmp_path / "m.txt")

    def test_empty_manifest_rejected(self, tmp_path):
        (tmp_path / "m.txt").write_text("# nothing\n")
        with pytest.raises(ValueError, match="no images"):
            load_manifest(tmp_path / "m.txt")


class TestSplit:
    def test_largest_remainder_cases(self):
        assert _largest_remainder(10) == (2, 5, 3)
        assert _largest_remainder(7) == (1, 4, 2)
        assert _largest_remainder(2) == (0, 1, 1)
        assert _largest_remainder(40) == (8, 20, 12)

    def test_proportions_per_class(self, tmp_path):
        manifest = tiny_corpus(tmp_path, classes=3, per_class=10)
        split = split_dataset(manifest, seed=1)
        labels = manifest.labels()
        for cls in range(3):
            tags = [split.tags[i] for i in np.nonzero(labels == cls)[0]]
            assert tags.count("finetune") == 2
            assert tags.count("train") == 5
            assert tags.count("test") == 3

    def test_same_seed_identical(self, tmp_path):
        manifest = tiny_corpus(tmp_path)
        assert split_dataset(manifest, seed=9).tags == split_dataset(manifest, seed=9).tags

    def test_different_seeds_differ(self, tmp_path):
        manifest = tiny_corpus(tmp_path, per_class=12)
        assert split_dataset(manifest, seed=1).tags != split_dataset(manifest, seed=2).tags

    def test_too_few_samples(self, tmp_path):
        (tmp_path / "m.txt").write_text("a.png,0\nb.png,1\nc.png,1\n")
        manifest = load_manifest(tmp_path / "m.txt")
        with pytest.raises(TooFewSamples):
            split_dataset(manifest, seed=0)

    def test_save_load_round_trip(self, tmp_path):
        manifest = tiny_corpus(tmp_path)
        split = split_dataset(manifest, seed=4)
        save_split(split, tmp_path / "s.split")
        loaded = load_split(tmp_path / "s.split")
        assert loaded.tags == split.tags
        assert loaded.seed == 4


class TestExtract:
    def test_grayscale_header_dim(self, tmp_path):
        manifest = tiny_corpus(tmp_path, classes=2, per_class=2)
        out = tmp_path / "g.fvec"
        extract(manifest, CnParams(), out=out)
        assert out.read_text().splitlines()[0] == "FVEC1 4 236"

    def test_rgb_dim(self, tmp_path):
        rng = np.random.default_rng(8)
        for i in range(2):
            data = rng.integers(0, 256, size=(12, 12, 3)).astype(np.uint8)
            save_png(ImageTensor(data), tmp_path / f"rgb{i}.png")
        (tmp_path / "m.txt").write_text("rgb0.png,0\nrgb1.png,1\n")
        manifest = load_manifest(tmp_path / "m.txt")
        vectors, labels = extract(manifest, CnParams())
        assert vectors.shape == (2, 708)

    def test_failure_names_offending_path(self, tmp_path):
        (tmp_path / "m.txt").write_text("missing.png,0\nmissing.png,1\n")
        manifest = load_manifest(tmp_path / "m.txt")
        with pytest.raises(UnreadableFile, match="missing.png"):
            extract(manifest, CnParams())

    def test_normalized_rows_sum_to_histogram_count(self, tmp_path):
        manifest = tiny_corpus(tmp_path, classes=2, per_class=2)
        vectors, _ = extract(manifest, CnParams())
        # 4 histograms per band, each L1-normalized
        assert np.allclose(vectors.sum(axis=1), 4.0, atol=1e-9)

    def test_dump_feature_images(self, tmp_path):
        manifest = tiny_corpus(tmp_path, classes=2, per_class=2)
        dump = tmp_path / "dump"
        extract(manifest, CnParams(), dump_dir=dump)
        names = sorted(p.name for p in dump.iterdir())
        assert names[:4] == ["00000_bi.png", "00000_cc.png", "00000_dc.png", "00000_ec.png"]
        assert len(names) == 16

    def test_worker_pool_matches_serial(self, tmp_path):
        manifest = tiny_corpus(tmp_path, classes=2, per_class=2)
        serial, _ = extract(manifest, CnParams(), jobs=1)
        parallel, _ = extract(manifest, CnParams(), jobs=2)
        assert np.array_equal(serial, parallel)


class TestRun:
    def test_report_invariants_and_artifacts(self, tmp_path):
        manifest = tiny_corpus(tmp_path, classes=2, per_class=6)
        result = run(manifest, RunOptions(seed=3), tmp_path / "out")
        assert 0.0 <= result.mean_oa <= 1.0
        present = {p.name for p in (tmp_path / "out").iterdir()}
        assert {"report.txt", "report.json", "confusion.csv", "split.txt",
                "svm_model.txt", "global.fvec"} <= present
        rows = np.loadtxt(tmp_path / "out" / "confusion.csv", delimiter=",")
        assert np.allclose(rows.sum(axis=1), 1.0)

    def test_finetune_split_is_reserved(self, tmp_path):
        manifest = tiny_corpus(tmp_path, classes=2, per_class=10)
        run(manifest, RunOptions(seed=3), tmp_path / "out")
        split = load_split(tmp_path / "out" / "split.txt")
        assert split.tags.count("finetune") == 4  # carved out, unused by the SVM
        report = (tmp_path / "out" / "report.txt").read_text()
        assert "finetune=4 train=10 test=6" in report

    def test_byte_identical_reruns(self, tmp_path):
        manifest = tiny_corpus(tmp_path, classes=2, per_class=6)
        run(manifest, RunOptions(seed=7), tmp_path / "a")
        run(manifest, RunOptions(seed=7), tmp_path / "b")
        for name in ("report.txt", "report.json", "confusion.csv", "split.txt",
                     "svm_model.txt", "global.fvec"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name

    def test_pca_reduction_and_curve(self, tmp_path):
        manifest = tiny_corpus(tmp_path, classes=2, per_class=8)
        options = RunOptions(seed=3, reduce="pca", pca_threshold=0.99)
        result = run(manifest, options, tmp_path / "out")
        assert result.reduced_dim <= result.fused_dim
        lines = (tmp_path / "out" / "variance_curve.csv").read_text().splitlines()
        values = [float(line.split(",")[1]) for line in lines[1:]]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
        assert values[result.reduced_dim - 1] >= 0.99 or result.reduced_dim == len(values)
        assert (tmp_path / "out" / "pca_model.txt").exists()

    def test_chi2_reduction_defaults_to_class_count(self, tmp_path):
        manifest = tiny_corpus(tmp_path, classes=2, per_class=8)
        result = run(manifest, RunOptions(seed=3, reduce="chi2"), tmp_path / "out")
        assert result.reduced_dim == 2

    def test_local_fusion_and_misalignment(self, tmp_path):
        manifest = tiny_corpus(tmp_path, classes=2, per_class=6)
        rng = np.random.default_rng(10)
        local = np.abs(rng.standard_normal((12, 32)))
        write_fvec(tmp_path / "local.fvec", local, manifest.labels())
        result = run(
            manifest,
            RunOptions(seed=3, local_path=str(tmp_path / "local.fvec")),
            tmp_path / "out",
        )
        assert result.fused_dim == 236 + 32
        fused_check, _ = read_fvec(tmp_path / "out" / "global.fvec")
        assert fused_check.shape[1] == 236  # the stored features stay global-only

        write_fvec(tmp_path / "short.fvec", local[:-1], manifest.labels()[:-1])
        with pytest.raises(MisalignedLocalVectors):
            run(manifest, RunOptions(seed=3, local_path=str(tmp_path / "short.fvec")), tmp_path / "bad")

        wrong_labels = manifest.labels()[::-1]
        write_fvec(tmp_path / "wrong.fvec", local, wrong_labels)
        with pytest.raises(MisalignedLocalVectors):
            run(manifest, RunOptions(seed=3, local_path=str(tmp_path / "wrong.fvec")), tmp_path / "bad2")

    def test_repeats_report_mean(self, tmp_path):
        manifest = tiny_corpus(tmp_path, classes=2, per_class=6)
        result = run(manifest, RunOptions(seed=3, repeats=2), tmp_path / "out")
        assert len(result.per_repeat_oa) == 2
        assert result.mean_oa == pytest.approx(np.mean(result.per_repeat_oa))
        report = (tmp_path / "out" / "report.txt").read_text()
        assert "repeat 1:" in report


class TestSyntheticCorpus:
    def test_deterministic_generation(self, tmp_path):
        m1 = make_corpus(tmp_path / "a", seed=11, per_class=2, size=32)
        m2 = make_corpus(tmp_path / "b", seed=11, per_class=2, size=32)
        for rel in ("manifest.txt", "class0/img000.png", "class3/img001.png"):
            assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()

    def test_manifest_loads(self, tmp_path):
        manifest = load_manifest(make_corpus(tmp_path, seed=11, per_class=3, size=32))
        assert manifest.n_classes == 4
        assert len(manifest.entries) == 12
