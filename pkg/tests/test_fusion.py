import numpy as np
import pytest

from cntexture.errors import MalformedHeader, NonFiniteLocal, RecordDimMismatch
from cntexture.fusion import fuse, read_fvec, write_fvec
from cntexture.lbp_encode import GlobalFeatureVector


def fake_global(bands, seed=0):
    rng = np.random.default_rng(seed)
    return GlobalFeatureVector(values=rng.random(bands * 59 * 4), bands=bands)


class TestFuse:
    def test_full_pipeline_lengths(self):
        g = fake_global(3)
        local = np.random.default_rng(1).random(5888)
        fused = fuse(g, local)
        assert fused.shape == (6596,)
        assert np.array_equal(fused[:708], g.values)
        assert np.array_equal(fused[708:], local)

    def test_absent_local_is_identity(self):
        g = fake_global(3)
        fused = fuse(g, None)
        assert fused.shape == (708,)
        assert np.array_equal(fused, g.values)

    def test_single_band_with_local(self):
        fused = fuse(fake_global(1), np.zeros(5888))
        assert fused.shape == (6124,)

    def test_non_finite_local_rejected(self):
        g = fake_global(1)
        bad = np.zeros(10)
        bad[3] = np.nan
        with pytest.raises(NonFiniteLocal):
            fuse(g, bad)
        bad[3] = np.inf
        with pytest.raises(NonFiniteLocal):
            fuse(g, bad)


class TestFvecFormat:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(2)
        vectors = rng.standard_normal((7, 13)) * np.exp(rng.uniform(-30, 30, size=(7, 13)))
        labels = rng.integers(0, 5, size=7)
        write_fvec(tmp_path / "v.fvec", vectors, labels)
        got_v, got_l = read_fvec(tmp_path / "v.fvec")
        assert np.array_equal(got_v, vectors)
        assert np.array_equal(got_l, labels)

    def test_header_line(self, tmp_path):
        write_fvec(tmp_path / "v.fvec", np.zeros((3, 4)), [0, 1, 2])
        first = (tmp_path / "v.fvec").read_text().splitlines()[0]
        assert first == "FVEC1 3 4"

    def test_count_mismatch(self, tmp_path):
        write_fvec(tmp_path / "v.fvec", np.zeros((3, 2)), [0, 0, 1])
        text = (tmp_path / "v.fvec").read_text().splitlines()
        (tmp_path / "v.fvec").write_text("\n".join(text[:-1]) + "\n")
        with pytest.raises(MalformedHeader):
            read_fvec(tmp_path / "v.fvec")

    def test_record_dim_mismatch(self, tmp_path):
        write_fvec(tmp_path / "v.fvec", np.zeros((2, 3)), [0, 1])
        lines = (tmp_path / "v.fvec").read_text().splitlines()
        lines[2] = "1 0 0"  # one value short
        (tmp_path / "v.fvec").write_text("\n".join(lines) + "\n")
        with pytest.raises(RecordDimMismatch):
            read_fvec(tmp_path / "v.fvec")

    def test_bad_magic(self, tmp_path):
        (tmp_path / "v.fvec").write_text("FVEC9 1 1\n0 0.0\n")
        with pytest.raises(MalformedHeader):
            read_fvec(tmp_path / "v.fvec")

    def test_empty_file(self, tmp_path):
        (tmp_path / "v.fvec").write_text("")
        with pytest.raises(MalformedHeader):
            read_fvec(tmp_path / "v.fvec")
