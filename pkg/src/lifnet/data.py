"""Binary-labelled feature datasets: synthetic Gaussians, CSV I/O, stratified splits."""

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from lifnet.errors import CsvParseError, InputError


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple = None
    provenance: str = "synthetic"

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if features.ndim != 2 or labels.shape != (features.shape[0],):
            raise InputError(f"features {features.shape} and labels {labels.shape} do not align")
        if not np.isfinite(features).all():
            raise InputError("features contain NaN or Inf")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise InputError("labels must be 0 or 1")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        if self.feature_names is None:
            names = tuple(f"f{j}" for j in range(features.shape[1]))
            object.__setattr__(self, "feature_names", names)
        elif len(self.feature_names) != features.shape[1]:
            raise InputError("feature_names length does not match feature columns")

    def __len__(self):
        return self.labels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (np.array_equal(self.features, other.features)
                and np.array_equal(self.labels, other.labels)
                and tuple(self.feature_names) == tuple(other.feature_names))

    @property
    def n_features(self):
        return self.features.shape[1]

    def class_counts(self):
        return np.bincount(self.labels, minlength=2)

    def subset(self, indices):
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.feature_names, self.provenance)

    def require_trainable(self):
        if len(self) == 0:
            raise InputError("dataset is empty")


@dataclass(frozen=True)
class SyntheticSpec:
    d: int
    n: int
    class_means: tuple  # (mean of class 0, mean of class 1), each length d
    class_std: tuple = (0.1, 0.1)
    class_balance: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.d < 1 or self.n < 2:
            raise InputError("need d >= 1 and n >= 2")
        if not 0.0 < self.class_balance < 1.0:
            raise InputError("class_balance must lie in (0, 1)")
        if min(self.class_std) <= 0:
            raise InputError("class std must be positive")
        for m in self.class_means:
            if len(m) != self.d:
                raise InputError("class means must have length d")


def separable_spec(d=16, n=800, separation=6.0, std=0.1, class_balance=0.5, seed=0):
    """Two isotropic classes around 0.5 whose means lie ``separation`` std apart.

    The offset alternates in sign across dimensions so that neither class is
    simply the one with more total activity.
    """
    signs = np.where(np.arange(d) % 2 == 0, 1.0, -1.0)
    offset = 0.5 * separation * std / math.sqrt(d) * signs
    means = (tuple(0.5 - offset), tuple(0.5 + offset))
    return SyntheticSpec(d=d, n=n, class_means=means, class_std=(std, std),
                         class_balance=class_balance, seed=seed)


def generate_synthetic(spec, rng=None):
    """Draw Gaussian class clouds, clamp to [0, 1], shuffle. Class-1 count is round(n * balance)."""
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    n1 = int(math.floor(spec.n * spec.class_balance + 0.5))
    n1 = min(max(n1, 1), spec.n - 1)
    counts = (spec.n - n1, n1)
    blocks, labels = [], []
    for cls in (0, 1):
        mean = np.asarray(spec.class_means[cls], dtype=np.float64)
        blocks.append(mean + spec.class_std[cls] * rng.standard_normal((counts[cls], spec.d)))
        labels.append(np.full(counts[cls], cls))
    order = rng.permutation(spec.n)
    features = np.clip(np.vstack(blocks), 0.0, 1.0)[order]
    return Dataset(features, np.concatenate(labels)[order], provenance="synthetic")


def _parse_float(cell, row, col):
    try:
        value = float(cell)
    except ValueError:
        raise CsvParseError("non-numeric", f"column {col + 1} value {cell!r} is not a number", row) from None
    if not math.isfinite(value):
        raise CsvParseError("non-numeric", f"column {col + 1} value {cell!r} is not finite", row)
    return value


def load_csv(path):
    """Read a feature table whose last header column is ``label`` (values 0/1)."""
    path = Path(path)
    if not path.is_file():
        raise CsvParseError("missing-file", f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise CsvParseError("empty", "file has no header row", 1)
        header = [h.strip() for h in header]
        if header[-1] != "label" or len(header) < 2:
            raise CsvParseError("header", "last column must be named 'label' after >= 1 feature", 1)
        width = len(header)
        rows, labels = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise CsvParseError("column-count", f"expected {width} columns, found {len(row)}", line_no)
            rows.append([_parse_float(c, line_no, j) for j, c in enumerate(row[:-1])])
            label = row[-1].strip()
            if label not in ("0", "1"):
                raise CsvParseError("bad-label", f"label must be 0 or 1, got {label!r}", line_no)
            labels.append(int(label))
    if not rows:
        raise CsvParseError("empty", "file has no data rows")
    return Dataset(np.array(rows), np.array(labels), tuple(header[:-1]), provenance="csv")


def write_csv(dataset, path):
    """Write ``dataset`` so that :func:`load_csv` reproduces it exactly."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([*dataset.feature_names, "label"])
        for x, y in zip(dataset.features, dataset.labels):
            writer.writerow([repr(float(v)) for v in x] + [int(y)])


def stratified_split(dataset, train_fraction=0.8, seed=0):
    """Per-class seeded shuffle, cut each class at ``round(fraction * n_class)``.

    Both halves keep the original sample order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise InputError("train_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    train_idx, val_idx = [], []
    for cls in (0, 1):
        members = np.flatnonzero(dataset.labels == cls)
        if members.size < 2:
            raise InputError(f"class {cls} has {members.size} samples; need at least 2 to split")
        members = rng.permutation(members)
        cut = int(math.floor(train_fraction * members.size + 0.5))
        cut = min(max(cut, 1), members.size - 1)
        train_idx.append(members[:cut])
        val_idx.append(members[cut:])
    train = np.sort(np.concatenate(train_idx))
    val = np.sort(np.concatenate(val_idx))
    return dataset.subset(train), dataset.subset(val)
