"""Dataset loader and normalization tests against synthesized fixtures."""

import numpy as np
import pytest

from mcamsim.datasets import (
    ISOLET_TEST_FILE,
    ISOLET_TRAIN_FILE,
    load_dataset,
)


def write_generic(tmp_path, train_rows, test_rows, header="f0,f1,label"):
    (tmp_path / "train.csv").write_text(
        header + "\n" + "\n".join(train_rows) + "\n"
    )
    (tmp_path / "test.csv").write_text(header + "\n" + "\n".join(test_rows) + "\n")


def test_generic_csv_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    train = rng.normal(size=(20, 3))
    test = rng.normal(size=(8, 3))
    train_y = rng.integers(0, 4, size=20)
    train_y[:4] = [0, 1, 2, 3]
    test_y = rng.integers(0, 4, size=8)
    header = "f0,f1,f2,label"
    train_rows = [
        ",".join(repr(float(v)) for v in row) + f",{y}"
        for row, y in zip(train, train_y)
    ]
    test_rows = [
        ",".join(repr(float(v)) for v in row) + f",{y}"
        for row, y in zip(test, test_y)
    ]
    (tmp_path / "train.csv").write_text(header + "\n" + "\n".join(train_rows) + "\n")
    (tmp_path / "test.csv").write_text(header + "\n" + "\n".join(test_rows) + "\n")

    data = load_dataset(tmp_path, "generic_csv")
    assert data.num_classes == 4
    assert np.array_equal(data.train_y, train_y)
    assert np.array_equal(data.test_y, test_y)
    # Min-max transform with train statistics, checked independently.
    lo, hi = train.min(axis=0), train.max(axis=0)
    assert np.allclose(data.train_x, (train - lo) / (hi - lo))
    assert np.allclose(data.test_x, (test - lo) / (hi - lo))
    assert data.train_x.min() == pytest.approx(0.0)
    assert data.train_x.max() == pytest.approx(1.0)


def test_generic_csv_label_column_position_is_free(tmp_path):
    write_generic(
        tmp_path,
        ["0,1.0,2.0", "1,3.0,4.0"],
        ["0,1.5,2.5"],
        header="label,f0,f1",
    )
    data = load_dataset(tmp_path, "generic_csv")
    assert data.feature_dim == 2
    assert data.train_y.tolist() == [0, 1]


def test_generic_csv_requires_label_column(tmp_path):
    write_generic(tmp_path, ["1.0,2.0,0"], ["1.0,2.0,0"], header="f0,f1,klass")
    with pytest.raises(ValueError, match="label"):
        load_dataset(tmp_path, "generic_csv")


def test_generic_csv_rejects_malformed_rows(tmp_path):
    write_generic(tmp_path, ["1.0,oops,0"], ["1.0,2.0,0"])
    with pytest.raises(ValueError, match="malformed"):
        load_dataset(tmp_path, "generic_csv")


def test_generic_csv_rejects_ragged_rows(tmp_path):
    write_generic(tmp_path, ["1.0,2.0,0", "1.0,0"], ["1.0,2.0,0"])
    with pytest.raises(ValueError, match="fields"):
        load_dataset(tmp_path, "generic_csv")


def test_labels_are_remapped_to_dense_zero_based(tmp_path):
    write_generic(tmp_path, ["1.0,2.0,5", "2.0,1.0,9"], ["1.5,1.5,5"])
    data = load_dataset(tmp_path, "generic_csv")
    assert data.num_classes == 2
    assert data.train_y.tolist() == [0, 1]
    assert data.test_y.tolist() == [0]


def test_unknown_test_label_is_rejected(tmp_path):
    write_generic(tmp_path, ["1.0,2.0,0"], ["1.0,2.0,3"])
    with pytest.raises(ValueError, match="unknown labels"):
        load_dataset(tmp_path, "generic_csv")


def isolet_line(rng, label):
    feats = rng.normal(size=5)
    return ", ".join(f"{v:.4f}" for v in feats) + f", {float(label)}"


def test_isolet_format_parses_and_relabels(tmp_path):
    rng = np.random.default_rng(2)
    train = [isolet_line(rng, (i % 3) + 1) for i in range(12)]
    test = [isolet_line(rng, (i % 3) + 1) for i in range(6)]
    (tmp_path / ISOLET_TRAIN_FILE).write_text("\n".join(train) + "\n")
    (tmp_path / ISOLET_TEST_FILE).write_text("\n".join(test) + "\n")
    data = load_dataset(tmp_path, "isolet_csv")
    assert data.name == "isolet"
    assert data.feature_dim == 5
    assert data.num_classes == 3
    assert set(data.train_y.tolist()) == {0, 1, 2}  # 1-based labels shifted
    assert data.train_x.shape == (12, 5)


def test_isolet_missing_file_raises(tmp_path):
    (tmp_path / ISOLET_TRAIN_FILE).write_text("0.1, 0.2, 1.\n")
    with pytest.raises(FileNotFoundError, match="isolet5"):
        load_dataset(tmp_path, "isolet_csv")


def test_ucihar_format_parses_file_pairs(tmp_path):
    rng = np.random.default_rng(3)
    x_train = rng.normal(size=(10, 4))
    x_test = rng.normal(size=(4, 4))
    y_train = (np.arange(10) % 2) + 1
    y_test = np.array([1, 2, 1, 2])
    (tmp_path / "X_train.txt").write_text(
        "\n".join("  ".join(f"{v: .6e}" for v in row) for row in x_train)
    )
    (tmp_path / "X_test.txt").write_text(
        "\n".join("  ".join(f"{v: .6e}" for v in row) for row in x_test)
    )
    (tmp_path / "y_train.txt").write_text("\n".join(str(v) for v in y_train))
    (tmp_path / "y_test.txt").write_text("\n".join(str(v) for v in y_test))
    data = load_dataset(tmp_path, "ucihar_txt")
    assert data.name == "ucihar"
    assert data.num_classes == 2
    assert data.train_x.shape == (10, 4)
    assert data.test_y.tolist() == [0, 1, 0, 1]


def test_ucihar_row_count_mismatch_rejected(tmp_path):
    (tmp_path / "X_train.txt").write_text("0.1 0.2\n0.3 0.4\n")
    (tmp_path / "X_test.txt").write_text("0.1 0.2\n")
    (tmp_path / "y_train.txt").write_text("1\n")
    (tmp_path / "y_test.txt").write_text("1\n")
    with pytest.raises(ValueError, match="labels"):
        load_dataset(tmp_path, "ucihar_txt")


def test_feature_count_mismatch_between_splits_rejected(tmp_path):
    (tmp_path / "train.csv").write_text("f0,f1,label\n1.0,2.0,0\n")
    (tmp_path / "test.csv").write_text("f0,label\n1.0,0\n")
    with pytest.raises(ValueError, match="feature-count mismatch"):
        load_dataset(tmp_path, "generic_csv")


def test_constant_feature_normalizes_to_zero(tmp_path):
    write_generic(tmp_path, ["2.0,1.0,0", "2.0,3.0,1"], ["2.0,2.0,0"])
    data = load_dataset(tmp_path, "generic_csv")
    assert np.all(data.train_x[:, 0] == 0.0)


def test_unknown_format_rejected(tmp_path):
    with pytest.raises(ValueError, match="format"):
        load_dataset(tmp_path, "parquet")
