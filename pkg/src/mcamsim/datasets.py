"""Dataset loading and normalization for the classification benchmark.

Three on-disk layouts are supported:

* ``isolet_csv``  -- ``<dir>/isolet1+2+3+4.data`` (train) and
  ``<dir>/isolet5.data`` (test); comma-separated floats, last field is a
  1-based class label.
* ``ucihar_txt``  -- ``<dir>/X_train.txt``, ``y_train.txt``, ``X_test.txt``,
  ``y_test.txt``; whitespace-separated floats, 1-based labels.
* ``generic_csv`` -- ``<dir>/train.csv`` and ``<dir>/test.csv`` with a
  header row; the ``label`` column holds integer class ids, every other
  column is a numeric feature.

Labels are remapped to dense 0-based ids by sorted original value; features
are min-max normalized per feature with training-set statistics.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

DATASET_FORMATS = ("isolet_csv", "ucihar_txt", "generic_csv")

ISOLET_TRAIN_FILE = "isolet1+2+3+4.data"
ISOLET_TEST_FILE = "isolet5.data"


@dataclass
class SplitDataset:
    """Normalized train/test split with dense 0-based labels."""

    name: str
    train_x: np.ndarray
    train_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray
    num_classes: int

    @property
    def feature_dim(self) -> int:
        return self.train_x.shape[1]


def _require(path: Path) -> Path:
    if not path.is_file():
        raise FileNotFoundError(f"dataset file not found: {path}")
    return path


def _parse_delimited(path: Path, sep: str | None) -> np.ndarray:
    """Rectangular float matrix from a delimited text file."""
    rows: list[list[float]] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split(sep) if sep else line.split()
            try:
                rows.append([float(tok) for tok in tokens if tok.strip()])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed row") from exc
            if len(rows[-1]) != len(rows[0]):
                raise ValueError(
                    f"{path}:{lineno}: {len(rows[-1])} fields, expected {len(rows[0])}"
                )
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows)


def _split_last_column(matrix: np.ndarray, path: Path) -> tuple[np.ndarray, np.ndarray]:
    if matrix.shape[1] < 2:
        raise ValueError(f"{path}: rows need at least one feature and a label")
    labels = matrix[:, -1]
    if not np.all(labels == np.round(labels)):
        raise ValueError(f"{path}: non-integer class labels")
    return matrix[:, :-1], labels.astype(np.int64)


def _load_isolet(directory: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    train = _parse_delimited(_require(directory / ISOLET_TRAIN_FILE), ",")
    test = _parse_delimited(_require(directory / ISOLET_TEST_FILE), ",")
    train_x, train_y = _split_last_column(train, directory / ISOLET_TRAIN_FILE)
    test_x, test_y = _split_last_column(test, directory / ISOLET_TEST_FILE)
    return train_x, train_y, test_x, test_y


def _load_ucihar(directory: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    train_x = _parse_delimited(_require(directory / "X_train.txt"), None)
    test_x = _parse_delimited(_require(directory / "X_test.txt"), None)
    train_y = _parse_delimited(_require(directory / "y_train.txt"), None)
    test_y = _parse_delimited(_require(directory / "y_test.txt"), None)
    for name, ys, xs in (("train", train_y, train_x), ("test", test_y, test_x)):
        if ys.shape[1] != 1:
            raise ValueError(f"y_{name}.txt must hold one label per row")
        if ys.shape[0] != xs.shape[0]:
            raise ValueError(
                f"{name}: {xs.shape[0]} feature rows but {ys.shape[0]} labels"
            )
    return (
        train_x,
        train_y[:, 0].astype(np.int64),
        test_x,
        test_y[:, 0].astype(np.int64),
    )


def _load_generic_csv(
    directory: Path,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    import csv

    def read_one(path: Path) -> tuple[np.ndarray, np.ndarray]:
        with open(_require(path), newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: empty file") from None
            header = [h.strip() for h in header]
            if "label" not in header:
                raise ValueError(f"{path}: header has no 'label' column")
            label_idx = header.index("label")
            feats: list[list[float]] = []
            labels: list[int] = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise ValueError(
                        f"{path}:{lineno}: {len(row)} fields, expected {len(header)}"
                    )
                try:
                    labels.append(int(row[label_idx]))
                    feats.append(
                        [float(v) for i, v in enumerate(row) if i != label_idx]
                    )
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: malformed row") from exc
        if not feats:
            raise ValueError(f"{path}: no data rows")
        return np.asarray(feats), np.asarray(labels, dtype=np.int64)

    train_x, train_y = read_one(directory / "train.csv")
    test_x, test_y = read_one(directory / "test.csv")
    return train_x, train_y, test_x, test_y


def _minmax_normalize(train_x: np.ndarray, test_x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale each feature to [0, 1] using training statistics.

    Constant training features map to 0; test values are transformed with
    the same affine map and are not clipped.
    """
    lo = train_x.min(axis=0)
    span = train_x.max(axis=0) - lo
    denom = np.where(span > 0, span, 1.0)
    return (train_x - lo) / denom, (test_x - lo) / denom


def load_dataset(path: str | Path, fmt: str) -> SplitDataset:
    """Load, validate, normalize, and relabel one dataset directory."""
    if fmt not in DATASET_FORMATS:
        raise ValueError(f"format must be one of {DATASET_FORMATS}, got {fmt!r}")
    directory = Path(path)
    if fmt == "isolet_csv":
        train_x, train_y, test_x, test_y = _load_isolet(directory)
    elif fmt == "ucihar_txt":
        train_x, train_y, test_x, test_y = _load_ucihar(directory)
    else:
        train_x, train_y, test_x, test_y = _load_generic_csv(directory)

    if test_x.shape[1] != train_x.shape[1]:
        raise ValueError(
            f"feature-count mismatch: train {train_x.shape[1]}, test {test_x.shape[1]}"
        )
    classes = np.unique(train_y)
    unknown = np.setdiff1d(np.unique(test_y), classes)
    if unknown.size:
        raise ValueError(f"unknown labels in test set: {unknown.tolist()}")
    remap = {int(c): i for i, c in enumerate(classes.tolist())}
    train_y = np.asarray([remap[int(c)] for c in train_y], dtype=np.int64)
    test_y = np.asarray([remap[int(c)] for c in test_y], dtype=np.int64)
    train_x, test_x = _minmax_normalize(train_x, test_x)
    return SplitDataset(
        name=fmt.rsplit("_", 1)[0] if fmt != "generic_csv" else "generic",
        train_x=train_x,
        train_y=train_y,
        test_x=test_x,
        test_y=test_y,
        num_classes=len(classes),
    )
