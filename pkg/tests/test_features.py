import numpy as np
import pytest

from reidrank import (
    FeatureSet,
    FormatError,
    format_features,
    l2_normalize,
    load_features,
    split_features,
    write_features,
)

MINIMAL = "reid-features v1 2 3\n7 1 probe 0.0 0.0 0.0\n7 2 gallery 1.0 0.0 0.0\n"


def random_featureset(rng, n=12, d=8):
    return FeatureSet(
        rng.standard_normal((n, d)),
        rng.integers(0, 5, size=n),
        rng.integers(1, 4, size=n),
        rng.random(n) < 0.5,
    )


class TestLoad:
    def test_minimal_file(self, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text(MINIMAL)
        fs = load_features(path)
        assert fs.n == 2 and fs.dim == 3
        assert list(fs.person_ids) == [7, 7]
        assert list(fs.camera_ids) == [1, 2]
        assert list(fs.probe_mask) == [True, False]
        np.testing.assert_array_equal(fs.vectors[1], [1.0, 0.0, 0.0])

    def test_short_row(self, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text("reid-features v1 2 3\n7 1 probe 0.0 0.0 0.0\n7 2 gallery 1.0 0.0\n")
        with pytest.raises(FormatError, match="row 2: expected 3 values"):
            load_features(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text("features v2 2 3\n")
        with pytest.raises(FormatError, match="line 1"):
            load_features(path)

    def test_n_too_small(self, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text("reid-features v1 1 3\n7 1 probe 0.0 0.0 0.0\n")
        with pytest.raises(FormatError, match="N >= 2"):
            load_features(path)

    def test_row_count_mismatch(self, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text("reid-features v1 3 3\n7 1 probe 0.0 0.0 0.0\n7 2 gallery 1.0 0.0 0.0\n")
        with pytest.raises(FormatError, match="expected 3 data rows"):
            load_features(path)

    def test_bad_role(self, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text("reid-features v1 2 1\n7 1 query 0.0\n7 2 gallery 1.0\n")
        with pytest.raises(FormatError, match="row 1: role"):
            load_features(path)

    def test_non_finite_value(self, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text("reid-features v1 2 1\n7 1 probe nan\n7 2 gallery 1.0\n")
        with pytest.raises(FormatError, match="row 1: non-finite"):
            load_features(path)

    def test_bad_label(self, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text("reid-features v1 2 1\n7 x probe 0.0\n7 2 gallery 1.0\n")
        with pytest.raises(FormatError, match="row 1: invalid integer label"):
            load_features(path)

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError, match="unknown feature format"):
            load_features(tmp_path / "f.txt", format="binary")


class TestRoundTrip:
    def test_write_load_write_is_byte_identical(self, tmp_path):
        rng = np.random.default_rng(3)
        fs = random_featureset(rng)
        first = tmp_path / "a.txt"
        second = tmp_path / "b.txt"
        write_features(fs, first)
        write_features(load_features(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_values_survive_exactly(self, tmp_path):
        rng = np.random.default_rng(11)
        fs = random_featureset(rng, n=20, d=5)
        path = tmp_path / "f.txt"
        write_features(fs, path)
        back = load_features(path)
        np.testing.assert_array_equal(back.vectors, fs.vectors)
        np.testing.assert_array_equal(back.person_ids, fs.person_ids)
        np.testing.assert_array_equal(back.camera_ids, fs.camera_ids)
        np.testing.assert_array_equal(back.probe_mask, fs.probe_mask)

    def test_format_features_matches_file(self):
        rng = np.random.default_rng(5)
        fs = random_featureset(rng, n=4, d=2)
        text = format_features(fs)
        assert text.startswith("reid-features v1 4 2\n")
        assert text.endswith("\n")


class TestValidation:
    def test_rejects_single_row(self):
        with pytest.raises(ValueError, match="at least 2 rows"):
            FeatureSet(np.zeros((1, 3)), [0], [1], [True])

    def test_rejects_label_length_mismatch(self):
        with pytest.raises(ValueError, match="person_ids"):
            FeatureSet(np.zeros((3, 2)), [0, 1], [1, 1, 1], [True, False, False])

    def test_rejects_non_finite(self):
        vec = np.zeros((2, 2))
        vec[0, 0] = np.inf
        with pytest.raises(ValueError, match="finite"):
            FeatureSet(vec, [0, 1], [1, 2], [True, False])


class TestSplit:
    def test_exact_division(self):
        rng = np.random.default_rng(0)
        split = split_features(random_featureset(rng, d=8), 4)
        assert [p.dim for p in split.parts] == [2, 2, 2, 2]
        assert split.offsets == (0, 2, 4, 6, 8)

    def test_remainder_spread(self):
        rng = np.random.default_rng(0)
        split = split_features(random_featureset(rng, d=10), 4)
        assert [p.dim for p in split.parts] == [3, 3, 2, 2]

    def test_too_many_parts(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError, match="non-empty"):
            split_features(random_featureset(rng, d=4), 5)

    def test_too_few_parts(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError, match="at least 2"):
            split_features(random_featureset(rng, d=4), 1)

    def test_labels_shared(self):
        rng = np.random.default_rng(2)
        fs = random_featureset(rng, d=7)
        for part in split_features(fs, 3).parts:
            np.testing.assert_array_equal(part.person_ids, fs.person_ids)
            np.testing.assert_array_equal(part.camera_ids, fs.camera_ids)
            np.testing.assert_array_equal(part.probe_mask, fs.probe_mask)

    def test_concat_restores_matrix(self):
        rng = np.random.default_rng(9)
        for _ in range(25):
            d = int(rng.integers(2, 20))
            fs = random_featureset(rng, n=int(rng.integers(2, 15)), d=d)
            s = int(rng.integers(2, d + 1))
            split = split_features(fs, s)
            np.testing.assert_array_equal(np.hstack([p.vectors for p in split.parts]), fs.vectors)


class TestL2Normalize:
    def test_unit_norms(self):
        rng = np.random.default_rng(4)
        out = l2_normalize(random_featureset(rng))
        np.testing.assert_allclose(np.linalg.norm(out.vectors, axis=1), 1.0, atol=1e-12)

    def test_zero_row_unchanged(self):
        vec = np.array([[0.0, 0.0], [3.0, 4.0]])
        out = l2_normalize(FeatureSet(vec, [0, 1], [1, 2], [True, False]))
        np.testing.assert_array_equal(out.vectors[0], [0.0, 0.0])
        np.testing.assert_allclose(out.vectors[1], [0.6, 0.8])
