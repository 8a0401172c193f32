import numpy as np
import pytest

from gamap.datagen import (
    Dataset,
    load_csv,
    load_iris,
    synth_group_a,
    synth_group_b,
    synth_mixture,
    train_test_split,
    write_dataset_csv,
)
from gamap.errors import (
    DegenerateFractionError,
    MalformedCsvError,
    NonNumericWithoutOneHotError,
    OddCountError,
    UnknownLabelColumnError,
)


class TestGroupGenerators:
    def test_group_a_supports(self):
        ds = synth_group_a(10_000, seed=3)
        a, b = ds.features[:, 0], ds.features[:, 1]
        class1, class2 = ds.labels == 0, ds.labels == 1
        assert np.all((a[class1] >= 0) & (a[class1] <= 1))
        assert np.all((a[class2] >= 1) & (a[class2] <= 2))
        assert np.all((b >= 0) & (b <= 2))
        # feature B spans its full range on both classes
        for mask in (class1, class2):
            assert b[mask].min() < 0.1 and b[mask].max() > 1.9

    def test_group_b_supports(self):
        ds = synth_group_b(10_000, seed=4)
        a, b = ds.features[:, 0], ds.features[:, 1]
        class1, class2 = ds.labels == 0, ds.labels == 1
        assert np.all((b[class1] >= 3) & (b[class1] <= 4))
        assert np.all((b[class2] >= 4) & (b[class2] <= 5))
        assert np.all((a >= 3) & (a <= 5))
        for mask in (class1, class2):
            assert a[mask].min() < 3.1 and a[mask].max() > 4.9

    def test_exact_balance(self):
        for fn in (synth_group_a, synth_group_b):
            ds = fn(1000, seed=1)
            assert int((ds.labels == 0).sum()) == int((ds.labels == 1).sum())

    def test_deterministic(self):
        d1, d2 = synth_group_a(10, seed=42), synth_group_a(10, seed=42)
        assert np.array_equal(d1.features, d2.features)
        assert np.array_equal(d1.labels, d2.labels)

    def test_odd_count_rejected(self):
        with pytest.raises(OddCountError):
            synth_group_a(11, seed=0)
        with pytest.raises(OddCountError):
            synth_group_b(0, seed=0)


class TestMixture:
    def test_even_split(self):
        ds = synth_mixture(1000, 0.5, seed=5)
        assert int((ds.groups == 0).sum()) == 500
        assert int((ds.groups == 1).sum()) == 500

    def test_three_quarters(self):
        ds = synth_mixture(2000, 0.75, seed=6)
        assert int((ds.groups == 0).sum()) == 1500
        assert int((ds.groups == 1).sum()) == 500

    def test_groups_tag_matches_supports(self):
        ds = synth_mixture(400, 0.5, seed=7)
        a = ds.features[:, 0]
        assert np.all(a[ds.groups == 0] <= 2.0)
        assert np.all(a[ds.groups == 1] >= 3.0)

    def test_degenerate_fractions(self):
        with pytest.raises(DegenerateFractionError):
            synth_mixture(10, 0.99, seed=0)  # rounds to the full set
        with pytest.raises(DegenerateFractionError):
            synth_mixture(10, 0.01, seed=0)
        with pytest.raises(DegenerateFractionError):
            synth_mixture(10, 1.0, seed=0)

    def test_deterministic(self):
        d1, d2 = synth_mixture(100, 0.5, seed=8), synth_mixture(100, 0.5, seed=8)
        assert np.array_equal(d1.features, d2.features)
        assert np.array_equal(d1.groups, d2.groups)


class TestIris:
    def test_canonical_shape(self):
        ds = load_iris()
        assert ds.n == 150
        assert ds.features.shape == (150, 4)
        assert np.bincount(ds.labels).tolist() == [50, 50, 50]
        assert ds.feature_names == (
            "sepal_length",
            "sepal_width",
            "petal_length",
            "petal_width",
        )
        assert ds.class_names == ("setosa", "versicolor", "virginica")

    def test_repeated_loads_identical(self):
        d1, d2 = load_iris(), load_iris()
        assert np.array_equal(d1.features, d2.features)
        assert np.array_equal(d1.labels, d2.labels)


class TestLoadCsv:
    def test_one_hot_first_appearance_order(self, tmp_path):
        path = tmp_path / "cats.csv"
        path.write_text("color,size,label\nred,1.0,0\nblue,2.0,1\ngreen,3.0,0\nblue,4.0,1\n")
        ds = load_csv(path, label_column="label", one_hot=True)
        assert ds.feature_names == ("color=red", "color=blue", "color=green", "size")
        onehot = ds.features[:, :3]
        assert np.all(onehot.sum(axis=1) == 1.0)
        assert np.array_equal(onehot[:, 1], [0.0, 1.0, 0.0, 1.0])

    def test_numeric_passthrough_exact(self, tmp_path):
        path = tmp_path / "nums.csv"
        path.write_text("x,y,label\n0.1,-2.5,0\n1e-3,3.25,1\n")
        ds = load_csv(path, label_column="label")
        assert np.array_equal(ds.features, np.array([[0.1, -2.5], [1e-3, 3.25]]))

    def test_missing_label_column(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("x,y\n1,2\n")
        with pytest.raises(UnknownLabelColumnError):
            load_csv(path, label_column="label")

    def test_text_without_one_hot(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("x,label\nfoo,0\n")
        with pytest.raises(NonNumericWithoutOneHotError):
            load_csv(path, label_column="label")

    def test_ragged_rows(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("x,y,label\n1,2,0\n1,0\n")
        with pytest.raises(MalformedCsvError):
            load_csv(path, label_column="label")

    def test_empty_file(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text("")
        with pytest.raises(MalformedCsvError):
            load_csv(path, label_column="label")

    def test_integer_labels_sorted_numerically(self, tmp_path):
        path = tmp_path / "i.csv"
        path.write_text("x,label\n1.0,10\n2.0,2\n3.0,10\n")
        ds = load_csv(path, label_column="label")
        assert ds.class_names == ("2", "10")
        assert ds.labels.tolist() == [1, 0, 1]

    def test_text_labels_sorted_alphabetically(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("x,label\n1.0,zebra\n2.0,ant\n")
        ds = load_csv(path, label_column="label")
        assert ds.class_names == ("ant", "zebra")
        assert ds.labels.tolist() == [1, 0]

    def test_round_trip_through_writer(self, tmp_path):
        original = synth_mixture(48, 0.5, seed=11)
        path = tmp_path / "ds.csv"
        write_dataset_csv(original, path, label_column="label")
        back = load_csv(path, label_column="label")
        assert np.array_equal(back.features, original.features)
        assert np.array_equal(back.labels, original.labels)
        assert back.class_names == original.class_names


class TestTrainTestSplit:
    def test_disjoint_exhaustive_stratified(self):
        ds = load_iris()
        train, test = train_test_split(ds, 0.25, seed=9)
        assert train.n + test.n == 150
        assert np.bincount(test.labels).tolist() == [12, 13, 12] or np.bincount(
            test.labels
        ).tolist() == [12, 12, 12] or np.bincount(test.labels).tolist() == [13, 12, 13]
        # row multiset is preserved: every original row appears exactly once
        combined = np.vstack([train.features, test.features])
        assert np.array_equal(
            np.sort(combined, axis=0), np.sort(ds.features, axis=0)
        )

    def test_deterministic(self):
        ds = synth_mixture(100, 0.5, seed=1)
        a1, b1 = train_test_split(ds, 0.3, seed=2)
        a2, b2 = train_test_split(ds, 0.3, seed=2)
        assert np.array_equal(a1.features, a2.features)
        assert np.array_equal(b1.features, b2.features)

    def test_fraction_bounds(self):
        ds = synth_mixture(20, 0.5, seed=1)
        with pytest.raises(DegenerateFractionError):
            train_test_split(ds, 0.0, seed=0)
        with pytest.raises(DegenerateFractionError):
            train_test_split(ds, 1.0, seed=0)


class TestDatasetValidation:
    def test_label_out_of_range(self):
        with pytest.raises(MalformedCsvError):
            Dataset(np.ones((2, 1)), np.array([0, 5]), ("x",), ("a", "b"))

    def test_misaligned_rows(self):
        with pytest.raises(MalformedCsvError):
            Dataset(np.ones((2, 1)), np.array([0]), ("x",), ("a",))
