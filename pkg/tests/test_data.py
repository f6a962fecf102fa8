import numpy as np
import pytest

from viloss import (
    Dataset,
    SynthSpec,
    generate_synth,
    ground_truth,
    load_csv,
    normalize_minmax,
    split,
)
from viloss.data import BinarySynthSpec, generate_binary_clusters, save_csv


class TestGroundTruth:
    def test_synth_1d_at_one(self):
        assert ground_truth("synth-1d", np.array([[1.0]]))[0, 0] == pytest.approx(1.3)

    def test_synth_1d_at_zero(self):
        assert ground_truth("synth-1d", np.array([[0.0]]))[0, 0] == pytest.approx(0.3)

    def test_synth_2d_at_origin(self):
        assert ground_truth("synth-2d", np.array([[0.0, 0.0]]))[0, 0] == pytest.approx(0.3)

    def test_synth_2d_formula(self):
        x1, x2 = 0.5, 0.8
        expected = -x1 + x2**6 + x2**3 + 0.3
        assert ground_truth("synth-2d", np.array([[x1, x2]]))[0, 0] == pytest.approx(expected)


class TestGenerateSynth:
    def test_default_sizes(self):
        assert generate_synth(SynthSpec("synth-1d")).n == 300
        assert generate_synth(SynthSpec("synth-2d")).n == 1000

    def test_seed_determinism(self):
        a = generate_synth(SynthSpec("synth-1d", seed=42))
        b = generate_synth(SynthSpec("synth-1d", seed=42))
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.targets, b.targets)

    def test_noiseless_targets_match_ground_truth(self):
        ds = generate_synth(SynthSpec("synth-1d", noise_sigma=0.0, corrupt_fraction=0.0))
        np.testing.assert_allclose(ds.targets, ground_truth("synth-1d", ds.features))

    def test_corruption_count(self):
        spec = SynthSpec("synth-1d", corrupt_fraction=0.1, noise_sigma=0.0, seed=3)
        ds = generate_synth(spec)
        clean = ground_truth("synth-1d", ds.features)
        n_corrupt = int(np.sum(~np.isclose(ds.targets, clean)))
        assert n_corrupt == round(0.1 * 300)

    def test_features_in_unit_cube(self):
        ds = generate_synth(SynthSpec("synth-2d", seed=1))
        assert ds.features.min() >= 0.0
        assert ds.features.max() <= 1.0

    def test_bad_variant_rejected(self):
        with pytest.raises(ValueError):
            SynthSpec("synth-3d")

    def test_bad_corrupt_fraction_rejected(self):
        with pytest.raises(ValueError):
            SynthSpec("synth-1d", corrupt_fraction=1.0)


class TestBinaryClusters:
    def test_shape_and_labels(self):
        ds = generate_binary_clusters(BinarySynthSpec(seed=0))
        assert ds.features.shape == (2000, 2)
        assert set(np.unique(ds.targets)) <= {0.0, 1.0}

    def test_imbalance(self):
        ds = generate_binary_clusters(BinarySynthSpec(seed=0))
        assert 0.02 < ds.targets.mean() < 0.12

    def test_seed_determinism(self):
        a = generate_binary_clusters(BinarySynthSpec(seed=9))
        b = generate_binary_clusters(BinarySynthSpec(seed=9))
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.targets, b.targets)


class TestLoadCsv:
    def test_basic_header_file(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("x,y\n1,2\n3,4\n")
        ds, report = load_csv(path, ["x"], ["y"])
        assert ds.n == 2
        assert report.n_used == 2
        np.testing.assert_array_equal(ds.features, [[1.0], [3.0]])

    def test_malformed_row_reported_with_line_number(self, tmp_path):
        rows = ["x,y"] + [f"{i},{i * 2}" for i in range(10)]
        rows[5] = "oops,3"  # line 6 in the file
        path = tmp_path / "d.csv"
        path.write_text("\n".join(rows) + "\n")
        ds, report = load_csv(path, ["x"], ["y"])
        assert ds.n == 9
        assert [line for line, _ in report.rejected] == [6]

    def test_column_by_index_without_header(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("1,2,3\n4,5,6\n")
        ds, _ = load_csv(path, [0, 2], [1], header=False)
        np.testing.assert_array_equal(ds.features, [[1.0, 3.0], [4.0, 6.0]])
        np.testing.assert_array_equal(ds.targets, [[2.0], [5.0]])

    def test_feature_subset_for_weighting_workflow(self, tmp_path):
        # high-dimensional ingestion: train on all features, weight on a subset
        from viloss import compute_weights, fit_grid

        rng = np.random.default_rng(0)
        path = tmp_path / "d.csv"
        header = "src_bytes,dst_bytes,dst_host_count,other,label"
        lines = [header]
        for _ in range(50):
            vals = rng.random(4)
            lines.append(",".join(map(str, vals)) + f",{rng.integers(0, 2)}")
        path.write_text("\n".join(lines) + "\n")
        ds, _ = load_csv(
            path, ["src_bytes", "dst_bytes", "dst_host_count", "other"], ["label"]
        )
        grid = fit_grid(ds, 3, feature_subset=[0, 1, 2])
        table = compute_weights(grid, ds, "l1")
        assert len(table) == 50
        assert ds.feature_dim == 4

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_csv(tmp_path / "nope.csv", ["x"], ["y"])

    def test_missing_column(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("x,y\n1,2\n")
        with pytest.raises(KeyError):
            load_csv(path, ["z"], ["y"])

    def test_zero_usable_rows(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("x,y\nfoo,bar\n")
        with pytest.raises(ValueError, match="no usable rows"):
            load_csv(path, ["x"], ["y"])

    def test_save_round_trip(self, tmp_path):
        ds = generate_synth(SynthSpec("synth-1d", n=20, seed=4))
        path = tmp_path / "d.csv"
        save_csv(ds, path)
        loaded, _ = load_csv(path, ["x1"], ["y"])
        np.testing.assert_array_equal(loaded.features, ds.features)
        np.testing.assert_array_equal(loaded.targets, ds.targets)


class TestNormalize:
    def test_column_example(self):
        ds = Dataset(np.array([[0.0], [5.0], [10.0]]), np.zeros((3, 1)))
        out = normalize_minmax(ds)
        np.testing.assert_allclose(out.features.ravel(), [0.0, 0.5, 1.0])

    def test_constant_column_maps_to_half(self):
        ds = Dataset(np.array([[7.0], [7.0]]), np.zeros((2, 1)))
        out = normalize_minmax(ds)
        np.testing.assert_array_equal(out.features.ravel(), [0.5, 0.5])

    def test_inverse_round_trip(self):
        rng = np.random.default_rng(8)
        ds = Dataset(rng.random((30, 2)), rng.normal(size=(30, 1)))
        out = normalize_minmax(ds)
        back = out.normalization.invert_targets(out.targets)
        np.testing.assert_allclose(back, ds.targets, atol=1e-12)

    def test_fit_rows_only(self):
        rng = np.random.default_rng(9)
        features = rng.random((20, 2))
        targets = rng.normal(size=(20, 1))
        fit_rows = np.arange(14)
        a = normalize_minmax(Dataset(features, targets), fit_rows)
        perturbed = features.copy()
        perturbed[14:] += 100.0  # test rows must not influence the statistics
        b = normalize_minmax(Dataset(perturbed, targets), fit_rows)
        np.testing.assert_array_equal(
            a.normalization.feature_min, b.normalization.feature_min
        )
        np.testing.assert_array_equal(
            a.normalization.feature_max, b.normalization.feature_max
        )
        np.testing.assert_array_equal(a.features[:14], b.features[:14])

    def test_empty_fit_rows_rejected(self):
        ds = Dataset(np.zeros((2, 1)), np.zeros((2, 1)))
        with pytest.raises(ValueError):
            normalize_minmax(ds, np.array([], dtype=int))


class TestSplit:
    def test_seven_three(self):
        ds = Dataset(np.arange(10.0)[:, None], np.zeros((10, 1)))
        tr, te = split(ds, 0.7, seed=0)
        assert (tr.n, te.n) == (7, 3)

    def test_default_paper_sizes(self):
        ds = generate_synth(SynthSpec("synth-1d"))
        tr, te = split(ds, 0.7, seed=0)
        assert (tr.n, te.n) == (210, 90)

    def test_seed_determinism(self):
        ds = Dataset(np.arange(20.0)[:, None], np.arange(20.0)[:, None])
        a = split(ds, 0.7, seed=5)
        b = split(ds, 0.7, seed=5)
        np.testing.assert_array_equal(a[0].features, b[0].features)

    def test_partition_is_complete(self):
        ds = Dataset(np.arange(15.0)[:, None], np.arange(15.0)[:, None])
        tr, te = split(ds, 0.6, seed=1)
        combined = sorted(np.concatenate([tr.features, te.features]).ravel())
        np.testing.assert_array_equal(combined, np.arange(15.0))

    def test_no_shuffle_is_chronological(self):
        ds = Dataset(np.arange(10.0)[:, None], np.zeros((10, 1)))
        tr, te = split(ds, 0.7, seed=99, shuffle=False)
        np.testing.assert_array_equal(tr.features.ravel(), np.arange(7.0))
        np.testing.assert_array_equal(te.features.ravel(), np.arange(7.0, 10.0))

    def test_bad_fraction_rejected(self):
        ds = Dataset(np.zeros((5, 1)), np.zeros((5, 1)))
        with pytest.raises(ValueError):
            split(ds, 1.0, seed=0)


class TestDataset:
    def test_row_mismatch_rejected(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((3, 1)), np.zeros((2, 1)))

    def test_one_dim_targets_promoted(self):
        ds = Dataset(np.zeros((3, 2)), np.arange(3.0))
        assert ds.targets.shape == (3, 1)
