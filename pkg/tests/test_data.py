"""Dataset generation, splitting, scaling, CSV round-trip."""

import numpy as np
import pytest

from dqclab.data import (
    FeatureScaler,
    PRESETS,
    Splits,
    generate,
    read_csv,
    scale_features,
    split,
    write_csv,
)


def _lstsq_accuracy(X, labels) -> float:
    # least-squares linear classifier as a separability oracle
    A = np.hstack([X, np.ones((X.shape[0], 1))])
    t = np.where(labels == 0, 1.0, -1.0)
    w, *_ = np.linalg.lstsq(A, t, rcond=None)
    pred = np.where(A @ w >= 0, 0, 1)
    return float(np.mean(pred == labels))


class TestGenerate:
    def test_shape_and_balance(self):
        ds = generate(1, seed=0)
        assert ds.X.shape == (1000, 8)
        assert ds.y.shape == (1000, 2)
        counts = np.bincount(ds.labels, minlength=2)
        assert abs(int(counts[0]) - 500) <= 25
        assert counts.sum() == 1000

    @pytest.mark.parametrize("preset", [1, 2, 3])
    def test_balance_over_seeds(self, preset):
        for seed in range(10):
            labels = generate(preset, seed, n_rows=200).labels
            counts = np.bincount(labels, minlength=2)
            assert abs(int(counts[0]) - 100) <= 10

    def test_deterministic(self):
        a = generate(2, seed=7)
        b = generate(2, seed=7)
        np.testing.assert_array_equal(a.X, b.X)
        np.testing.assert_array_equal(a.y, b.y)

    def test_seed_changes_data(self):
        a = generate(1, seed=0)
        b = generate(1, seed=1)
        assert not np.array_equal(a.X, b.X)

    def test_preset_changes_data(self):
        a = generate(1, seed=0)
        b = generate(2, seed=0)
        assert not np.array_equal(a.X, b.X)

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            generate(4, seed=0)

    def test_linear_separability_ladder(self):
        easy = generate(1, seed=0)
        hard = generate(3, seed=0)
        acc_easy = _lstsq_accuracy(easy.X, easy.labels)
        acc_hard = _lstsq_accuracy(hard.X, hard.labels)
        assert acc_easy >= 0.95
        assert acc_hard <= acc_easy

    def test_presets_table(self):
        assert PRESETS[1].n_informative == 8 and PRESETS[1].class_sep == 2.0
        assert PRESETS[2].n_informative == 5 and PRESETS[2].class_sep == 1.5
        assert PRESETS[3].n_informative == 3 and PRESETS[3].class_sep == 1.0


class TestSplit:
    def test_sizes_1000(self):
        s = split(generate(1, 0), seed=0)
        assert (len(s.train), len(s.validation), len(s.test)) == (700, 150, 150)

    def test_partition_no_duplicates(self):
        ds = generate(1, 0)
        s = split(ds, seed=3)
        rows = np.vstack([s.train.X, s.validation.X, s.test.X])
        assert rows.shape == ds.X.shape
        # every original row appears exactly once
        order = np.lexsort(rows.T)
        order_ds = np.lexsort(ds.X.T)
        np.testing.assert_array_equal(rows[order], ds.X[order_ds])

    def test_deterministic_and_seed_sensitive(self):
        ds = generate(1, 0)
        a = split(ds, seed=5)
        b = split(ds, seed=5)
        c = split(ds, seed=6)
        np.testing.assert_array_equal(a.train.X, b.train.X)
        assert not np.array_equal(a.train.X, c.train.X)

    def test_proportional_generalization(self):
        ds = generate(1, 0, n_rows=200)
        s = split(ds, seed=0)
        assert (len(s.train), len(s.validation), len(s.test)) == (140, 30, 30)

    def test_too_small(self):
        with pytest.raises(ValueError):
            split(generate(1, 0, n_rows=2), seed=0)


class TestScaling:
    def test_affine_map_example(self):
        scaler = FeatureScaler.fit(np.array([[0.0], [5.0], [10.0]]))
        got = scaler.transform(np.array([[0.0], [5.0], [10.0]]))
        np.testing.assert_allclose(got[:, 0], [-np.pi, 0.0, np.pi], atol=1e-12)

    def test_constant_column_maps_to_zero(self):
        scaler = FeatureScaler.fit(np.full((4, 2), 3.0))
        got = scaler.transform(np.full((2, 2), 3.0))
        np.testing.assert_array_equal(got, np.zeros((2, 2)))

    def test_out_of_range_clamped(self):
        scaler = FeatureScaler.fit(np.array([[0.0], [10.0]]))
        got = scaler.transform(np.array([[-5.0], [15.0]]))
        np.testing.assert_allclose(got[:, 0], [-np.pi, np.pi], atol=1e-12)

    def test_fit_rejects_non_finite(self):
        with pytest.raises(ValueError):
            FeatureScaler.fit(np.array([[np.nan], [1.0]]))

    def test_scale_features_fits_on_train_only(self):
        ds = generate(2, seed=1)
        s = split(ds, seed=1)
        scaled, scaler = scale_features(s)
        np.testing.assert_array_equal(scaler.lo, s.train.X.min(axis=0))
        np.testing.assert_array_equal(scaler.hi, s.train.X.max(axis=0))
        for part in (scaled.train, scaled.validation, scaled.test):
            assert np.all(part.X >= -np.pi) and np.all(part.X <= np.pi)
        # train attains both endpoints, other splits may not
        assert np.all(scaled.train.X.min(axis=0) == -np.pi)
        assert np.all(scaled.train.X.max(axis=0) == np.pi)

    def test_labels_untouched(self):
        s = split(generate(1, 2), seed=2)
        scaled, _ = scale_features(s)
        np.testing.assert_array_equal(scaled.test.y, s.test.y)


class TestCsv:
    def test_round_trip(self, tmp_path):
        ds = generate(3, seed=4, n_rows=50)
        path = tmp_path / "data.csv"
        write_csv(ds.X, ds.labels, path)
        x2, labels2 = read_csv(path)
        np.testing.assert_array_equal(x2, ds.X)
        np.testing.assert_array_equal(labels2, ds.labels)

    def test_header_schema(self, tmp_path):
        path = tmp_path / "data.csv"
        write_csv(np.zeros((2, 8)), np.zeros(2), path)
        first = path.read_text().splitlines()[0]
        assert first == "f0,f1,f2,f3,f4,f5,f6,f7,label"

    def test_read_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("nope\n1,2\n")
        with pytest.raises(ValueError):
            read_csv(path)

    def test_write_validates_rows(self, tmp_path):
        with pytest.raises(ValueError):
            write_csv(np.zeros((2, 8)), np.zeros(3), tmp_path / "x.csv")
