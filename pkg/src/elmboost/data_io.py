"""Dataset ingestion and preparation.

Two on-disk formats are understood:

* CSV: one row per line, ``.`` decimal, no header by default, label in the
  last column unless ``label_col`` says otherwise.
* sparse text ("libsvm"): ``label idx:val idx:val ...`` with 1-based
  indices, densified to zero-filled vectors.

Labels are always remapped to a canonical 0..K-1 ordering by ascending
original value; the original values ride along on the Dataset so reports
can show them. Missing values are rejected, not imputed.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .errors import DimensionMismatch, InconsistentDimension, ParseError
from . import synthetic

logger = logging.getLogger(__name__)

FORMATS = ("csv", "libsvm", "synthetic")


@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature training-set minima and maxima for min-max scaling."""

    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        mins = np.asarray(self.mins, dtype=np.float64)
        maxs = np.asarray(self.maxs, dtype=np.float64)
        if mins.shape != maxs.shape or mins.ndim != 1:
            raise ValueError("mins and maxs must be 1-D and equal length")
        if np.any(mins > maxs):
            raise ValueError("mins must not exceed maxs")
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)


@dataclass(frozen=True)
class DatasetSpec:
    """Catalog entry describing where a benchmark dataset lives.

    ``format`` is "csv", "libsvm", or "synthetic" (generated in-process;
    paths unused). Expected shapes are validated on load with a logged
    warning on mismatch, never a silent fix.
    """

    name: str
    train_path: str | None
    test_path: str | None
    format: str
    expected_train_n: int
    expected_test_n: int
    expected_classes: int
    expected_features: int
    header: bool = False
    label_col: int = -1

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")
        for field in ("expected_train_n", "expected_test_n",
                      "expected_classes", "expected_features"):
            if getattr(self, field) < 1:
                raise ValueError(f"{field} must be positive")


def _canonicalize(raw_labels):
    """Map raw label values onto 0..K-1 by ascending value."""
    values = np.unique(raw_labels)
    canonical = np.searchsorted(values, raw_labels)
    return canonical.astype(np.int64), values


def _parse_label(token, path, line_no):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(path, line_no, f"malformed label {token!r}") from None
    if not np.isfinite(value) or not float(value).is_integer():
        raise ParseError(path, line_no, f"label {token!r} is not an integer")
    return int(value)


def _load_csv(path, header=False, label_col=-1):
    rows, raw_labels = [], []
    width = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for line_no, row in enumerate(reader, start=1):
            if header and line_no == 1:
                continue
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if width is None:
                width = len(row)
                if width < 2:
                    raise InconsistentDimension(
                        path, line_no, "rows need at least one feature and a label")
                col = label_col if label_col >= 0 else width + label_col
                if not 0 <= col < width:
                    raise ParseError(path, line_no,
                                     f"label column {label_col} outside row of width {width}")
            elif len(row) != width:
                raise InconsistentDimension(
                    path, line_no, f"expected {width} columns, got {len(row)}")
            raw_labels.append(_parse_label(row[col], path, line_no))
            features = []
            for j, cell in enumerate(row):
                if j == col:
                    continue
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(path, line_no,
                                     f"malformed value {cell!r} in column {j}") from None
                if not np.isfinite(value):
                    raise ParseError(path, line_no,
                                     f"missing or non-finite value in column {j}")
                features.append(value)
            rows.append(features)
    if not rows:
        raise ParseError(path, 1, "file contains no data rows")
    return np.asarray(rows, dtype=np.float64), np.asarray(raw_labels)


def _parse_libsvm_rows(path):
    """Sparse rows as (label, [(1-based index, value), ...]) plus the max index."""
    parsed, max_idx = [], 0
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split()
            label = _parse_label(tokens[0], path, line_no)
            entries = []
            for token in tokens[1:]:
                idx_s, sep, val_s = token.partition(":")
                if not sep:
                    raise ParseError(path, line_no, f"malformed entry {token!r}")
                try:
                    idx = int(idx_s)
                    value = float(val_s)
                except ValueError:
                    raise ParseError(path, line_no,
                                     f"malformed entry {token!r}") from None
                if idx < 1:
                    raise ParseError(path, line_no, f"index {idx} is not 1-based")
                if not np.isfinite(value):
                    raise ParseError(path, line_no, f"non-finite value in {token!r}")
                entries.append((idx, value))
                max_idx = max(max_idx, idx)
            parsed.append((label, entries))
    if not parsed:
        raise ParseError(path, 1, "file contains no data rows")
    return parsed, max_idx


def _densify(parsed, n_features, path):
    X = np.zeros((len(parsed), n_features))
    raw_labels = np.empty(len(parsed), dtype=np.int64)
    for i, (label, entries) in enumerate(parsed):
        raw_labels[i] = label
        for idx, value in entries:
            if idx > n_features:
                raise ParseError(path, i + 1,
                                 f"index {idx} exceeds feature count {n_features}")
            X[i, idx - 1] = value
    return X, raw_labels


def load_dataset(path, format="csv", *, header=False, label_col=-1, n_features=None):
    """Load one file into a Dataset with canonical 0..K-1 labels.

    ``n_features`` forces the dense width of sparse files (needed to align
    a test file with its training file); by default the maximum index
    present decides it.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    if format == "csv":
        X, raw = _load_csv(path, header=header, label_col=label_col)
    elif format == "libsvm":
        parsed, max_idx = _parse_libsvm_rows(path)
        width = n_features if n_features is not None else max_idx
        if width < 1:
            raise ParseError(path, 1, "no feature indices found")
        X, raw = _densify(parsed, width, path)
    else:
        raise ValueError(f"unknown format {format!r}")
    labels, values = _canonicalize(raw)
    return Dataset(X, labels, label_values=values)


def save_dataset(data, path, format="csv"):
    """Write a Dataset back to disk in the original label values.

    Floats are written with full round-trip precision, so load followed by
    save followed by load reproduces the dataset exactly.
    """
    path = Path(path)
    values = data.label_values if data.label_values is not None else None
    raw_labels = values[data.labels] if values is not None else data.labels
    with open(path, "w") as fh:
        if format == "csv":
            for row, label in zip(data.features, raw_labels):
                fh.write(",".join(repr(float(v)) for v in row))
                fh.write(f",{int(label)}\n")
        elif format == "libsvm":
            for row, label in zip(data.features, raw_labels):
                cells = [f"{idx + 1}:{float(v)!r}" for idx, v in enumerate(row) if v != 0.0]
                fh.write(" ".join([str(int(label))] + cells) + "\n")
        else:
            raise ValueError(f"unknown format {format!r}")


def fit_normalizer(train):
    """Per-feature min and max over the training rows."""
    return NormalizationParams(train.features.min(axis=0), train.features.max(axis=0))


def apply_normalizer(params, data):
    """Min-max scale features: x' = (x - min) / (max - min).

    Constant features map to 0. Values outside the training range are not
    clipped, so test data may fall outside [0, 1].
    """
    if params.mins.shape[0] != data.p:
        raise DimensionMismatch(
            f"normalizer covers {params.mins.shape[0]} features, data has {data.p}")
    span = params.maxs - params.mins
    safe_span = np.where(span > 0, span, 1.0)
    scaled = np.where(span > 0, (data.features - params.mins) / safe_span, 0.0)
    return Dataset(scaled, data.labels, label_values=data.label_values)


def split_dataset(data, train_n, test_n=None, seed=0):
    """Deterministic seeded-shuffle split into (train, test).

    ``test_n`` defaults to all remaining rows; when given, surplus rows
    are dropped (some published train/test counts do not sum to the full
    file).
    """
    if not 1 <= train_n < data.n:
        raise ValueError(f"train_n must be in [1, {data.n - 1}]")
    remaining = data.n - train_n
    if test_n is None:
        test_n = remaining
    if not 1 <= test_n <= remaining:
        raise ValueError(f"test_n must be in [1, {remaining}]")
    order = np.random.default_rng(seed).permutation(data.n)
    train_idx = order[:train_n]
    test_idx = order[train_n:train_n + test_n]
    make = lambda idx: Dataset(data.features[idx], data.labels[idx],
                               label_values=data.label_values)
    return make(train_idx), make(test_idx)


def align_labels(train, test):
    """Re-canonicalise two datasets against the union of their label values.

    Per-file canonical labels are only consistent when both files contain
    the same label set; this repairs the mapping when they do not.
    """
    train_values = train.label_values if train.label_values is not None else train.classes
    test_values = test.label_values if test.label_values is not None else test.classes
    if np.array_equal(train_values, test_values):
        return train, test
    union = np.union1d(train_values, test_values)
    remap = lambda d, values: Dataset(
        d.features,
        np.searchsorted(union, np.asarray(values)[d.labels]),
        label_values=union,
    )
    return remap(train, train_values), remap(test, test_values)


_SYNTHETIC_MAKERS = {
    "blobs": synthetic.make_blobs,
    "gaussians3": synthetic.make_gaussians3,
    "xor": synthetic.make_xor,
    "rings": synthetic.make_rings,
}


def builtin_specs():
    """Catalog of the bundled synthetic datasets (no files needed)."""
    shapes = {
        "blobs": (200, 100, 2, 2),
        "gaussians3": (300, 150, 3, 2),
        "xor": (400, 200, 2, 2),
        "rings": (400, 200, 2, 2),
    }
    return {
        name: DatasetSpec(name, None, None, "synthetic", train_n, test_n,
                          n_classes, n_features)
        for name, (train_n, test_n, n_classes, n_features) in shapes.items()
    }


def load_catalog(path):
    """Read a JSON dataset catalog; relative paths resolve against the file."""
    path = Path(path)
    with open(path) as fh:
        raw = json.load(fh)
    base = path.parent
    specs = {}
    for entry in raw["datasets"]:
        entry = dict(entry)
        for key in ("train_path", "test_path"):
            if entry.get(key):
                entry[key] = str((base / entry[key]).resolve())
        spec = DatasetSpec(**entry)
        specs[spec.name] = spec
    return specs


def _check_expected(spec, role, data):
    expected_n = spec.expected_train_n if role == "train" else spec.expected_test_n
    if data.n != expected_n:
        logger.warning("%s %s rows: expected %d, found %d",
                       spec.name, role, expected_n, data.n)
    if data.p != spec.expected_features:
        logger.warning("%s %s features: expected %d, found %d",
                       spec.name, role, spec.expected_features, data.p)


def resolve(spec):
    """Load (train, test) for a catalog entry, labels aligned across the pair."""
    if spec.format == "synthetic":
        if spec.name not in _SYNTHETIC_MAKERS:
            raise ValueError(f"unknown synthetic dataset {spec.name!r}; "
                             f"choose from {sorted(_SYNTHETIC_MAKERS)}")
        maker = _SYNTHETIC_MAKERS[spec.name]
        train = maker(n=spec.expected_train_n, seed=11)
        test = maker(n=spec.expected_test_n, seed=13)
        return train, test
    if spec.format == "libsvm":
        train_rows, train_max = _parse_libsvm_rows(spec.train_path)
        test_rows, test_max = _parse_libsvm_rows(spec.test_path)
        width = max(train_max, test_max)
        X_train, raw_train = _densify(train_rows, width, spec.train_path)
        X_test, raw_test = _densify(test_rows, width, spec.test_path)
        train_labels, train_values = _canonicalize(raw_train)
        test_labels, test_values = _canonicalize(raw_test)
        train = Dataset(X_train, train_labels, label_values=train_values)
        test = Dataset(X_test, test_labels, label_values=test_values)
    else:
        train = load_dataset(spec.train_path, "csv",
                             header=spec.header, label_col=spec.label_col)
        test = load_dataset(spec.test_path, "csv",
                            header=spec.header, label_col=spec.label_col)
    train, test = align_labels(train, test)
    _check_expected(spec, "train", train)
    _check_expected(spec, "test", test)
    n_classes = train.classes.size
    if n_classes != spec.expected_classes:
        logger.warning("%s classes: expected %d, found %d",
                       spec.name, spec.expected_classes, n_classes)
    return train, test
