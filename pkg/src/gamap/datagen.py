"""Dataset generation and ingestion.

Two synthetic generators build binary-labeled groups where exactly one of
two features carries all the predictive signal, plus a mixture that
combines them in any proportion. The classic 150-row iris table ships
with the package so the bundled experiments run offline. `load_csv`
ingests arbitrary numeric tables, optionally one-hot encoding text
columns.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .cluster import derive_seed
from .errors import (
    DegenerateFractionError,
    MalformedCsvError,
    NonNumericWithoutOneHotError,
    OddCountError,
    UnknownLabelColumnError,
)

SYNTH_FEATURES = ("feature_a", "feature_b")
SYNTH_CLASSES = ("class1", "class2")


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    class_names: tuple[str, ...]
    # generator provenance per row (mixture groups); None when not applicable
    groups: np.ndarray | None = None

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise MalformedCsvError("features and labels must align row-wise")
        if len(self.feature_names) != X.shape[1]:
            raise MalformedCsvError("feature_names must match feature columns")
        if y.size and (y.min() < 0 or y.max() >= len(self.class_names)):
            raise MalformedCsvError("labels outside the class range")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        if self.groups is not None:
            g = np.asarray(self.groups, dtype=np.int64)
            if g.shape != y.shape:
                raise MalformedCsvError("groups must align with rows")
            g.setflags(write=False)
            object.__setattr__(self, "groups", g)

    @property
    def n(self) -> int:
        return self.features.shape[0]


def _check_even(n: int) -> None:
    if n < 2 or n % 2:
        raise OddCountError(f"balanced generation needs an even n >= 2, got {n}")


def synth_group_a(n: int, seed: int) -> Dataset:
    """Group where only feature A separates the classes.

    Class 1 draws feature A from U[0,1], class 2 from U[1,2]; feature B is
    U[0,2] for both, carrying no signal.
    """
    _check_even(n)
    rng = np.random.default_rng(seed)
    half = n // 2
    a = np.concatenate([rng.uniform(0.0, 1.0, half), rng.uniform(1.0, 2.0, half)])
    b = rng.uniform(0.0, 2.0, n)
    labels = np.repeat([0, 1], half)
    return Dataset(
        features=np.column_stack([a, b]),
        labels=labels,
        feature_names=SYNTH_FEATURES,
        class_names=SYNTH_CLASSES,
        groups=np.zeros(n, dtype=np.int64),
    )


def synth_group_b(n: int, seed: int) -> Dataset:
    """Mirror group: only feature B separates the classes.

    Class 1 draws feature B from U[3,4], class 2 from U[4,5]; feature A is
    U[3,5] for both.
    """
    _check_even(n)
    rng = np.random.default_rng(seed)
    half = n // 2
    b = np.concatenate([rng.uniform(3.0, 4.0, half), rng.uniform(4.0, 5.0, half)])
    a = rng.uniform(3.0, 5.0, n)
    labels = np.repeat([0, 1], half)
    return Dataset(
        features=np.column_stack([a, b]),
        labels=labels,
        feature_names=SYNTH_FEATURES,
        class_names=SYNTH_CLASSES,
        groups=np.ones(n, dtype=np.int64),
    )


def synth_mixture(n: int, fraction_a: float, seed: int) -> Dataset:
    """Concatenate both groups at the requested proportion and shuffle.

    Group sizes are round(n * fraction_a) and the remainder; a fraction
    that leaves either group empty is rejected. Row order is shuffled by a
    seed derived from `seed`, and each row remembers its source group.
    """
    if not 0.0 < fraction_a < 1.0:
        raise DegenerateFractionError(f"fraction_a must be in (0, 1), got {fraction_a}")
    n_a = round(n * fraction_a)
    if n_a <= 0 or n_a >= n:
        raise DegenerateFractionError(
            f"fraction_a={fraction_a} leaves a group empty for n={n}"
        )
    ds_a = synth_group_a(n_a, derive_seed(seed, 1))
    ds_b = synth_group_b(n - n_a, derive_seed(seed, 2))
    X = np.vstack([ds_a.features, ds_b.features])
    y = np.concatenate([ds_a.labels, ds_b.labels])
    g = np.concatenate([ds_a.groups, ds_b.groups])
    order = np.random.default_rng(derive_seed(seed, 3)).permutation(n)
    return Dataset(
        features=X[order],
        labels=y[order],
        feature_names=SYNTH_FEATURES,
        class_names=SYNTH_CLASSES,
        groups=g[order],
    )


def load_iris() -> Dataset:
    """The bundled 150-row iris table (three species, four measurements)."""
    path = resources.files("gamap").joinpath("data/iris.csv")
    with resources.as_file(path) as p:
        return load_csv(p, label_column="species")


def load_csv(path, label_column: str, one_hot: bool = False) -> Dataset:
    """Read a headered CSV into a Dataset.

    Numeric columns pass through unchanged. Text columns raise unless
    `one_hot` is set, in which case each expands into indicator features
    named "column=value" in order of first appearance. Label classes sort
    numerically when every value parses as an integer, alphabetically
    otherwise.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise MalformedCsvError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 2:
        raise MalformedCsvError(f"{path}: need a header row plus at least one data row")
    header, body = rows[0], rows[1:]
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise MalformedCsvError(
                f"{path}: row {i + 1} has {len(row)} cells, expected {len(header)}"
            )
    if label_column not in header:
        raise UnknownLabelColumnError(
            f"label column {label_column!r} not in header {header}"
        )
    label_idx = header.index(label_column)

    label_values = [row[label_idx] for row in body]
    class_names, labels = _encode_labels(label_values)

    feature_names: list[str] = []
    columns: list[np.ndarray] = []
    for j, name in enumerate(header):
        if j == label_idx:
            continue
        cells = [row[j] for row in body]
        numeric = _try_floats(cells)
        if numeric is not None:
            feature_names.append(name)
            columns.append(numeric)
            continue
        if not one_hot:
            raise NonNumericWithoutOneHotError(
                f"column {name!r} is not numeric; pass one_hot to encode it"
            )
        seen: list[str] = []
        for cell in cells:
            if cell not in seen:
                seen.append(cell)
        for value in seen:
            feature_names.append(f"{name}={value}")
            columns.append(np.array([1.0 if c == value else 0.0 for c in cells]))
    if not columns:
        raise MalformedCsvError(f"{path}: no feature columns besides the label")
    return Dataset(
        features=np.column_stack(columns),
        labels=labels,
        feature_names=tuple(feature_names),
        class_names=tuple(class_names),
    )


def _try_floats(cells: list[str]) -> np.ndarray | None:
    try:
        return np.array([float(c) for c in cells], dtype=np.float64)
    except ValueError:
        return None


def _encode_labels(values: list[str]) -> tuple[list[str], np.ndarray]:
    try:
        as_int = [int(v) for v in values]
    except ValueError:
        classes = sorted(set(values))
        mapping = {c: i for i, c in enumerate(classes)}
        return classes, np.array([mapping[v] for v in values], dtype=np.int64)
    classes_int = sorted(set(as_int))
    mapping_int = {c: i for i, c in enumerate(classes_int)}
    return [str(c) for c in classes_int], np.array(
        [mapping_int[v] for v in as_int], dtype=np.int64
    )


def write_dataset_csv(dataset: Dataset, path, label_column: str = "label") -> None:
    """Header plus rows; the label column holds class names."""
    from .formats import atomic_write_text

    lines = [",".join([*dataset.feature_names, label_column])]
    for row, label in zip(dataset.features, dataset.labels):
        cells = [repr(float(v)) for v in row]
        cells.append(dataset.class_names[label])
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def train_test_split(
    dataset: Dataset, test_fraction: float, seed: int
) -> tuple[Dataset, Dataset]:
    """Deterministic stratified split: disjoint, exhaustive, seed-driven."""
    if not 0.0 < test_fraction < 1.0:
        raise DegenerateFractionError(
            f"test_fraction must be in (0, 1), got {test_fraction}"
        )
    rng = np.random.default_rng(derive_seed(seed, 4))
    test_idx: list[int] = []
    for c in range(len(dataset.class_names)):
        members = np.flatnonzero(dataset.labels == c)
        if members.size == 0:
            continue
        perm = members[rng.permutation(members.size)]
        n_test = round(test_fraction * members.size)
        test_idx.extend(int(i) for i in perm[:n_test])
    mask = np.zeros(dataset.n, dtype=bool)
    mask[test_idx] = True

    def subset(keep: np.ndarray) -> Dataset:
        return Dataset(
            features=dataset.features[keep],
            labels=dataset.labels[keep],
            feature_names=dataset.feature_names,
            class_names=dataset.class_names,
            groups=None if dataset.groups is None else dataset.groups[keep],
        )

    return subset(~mask), subset(mask)
