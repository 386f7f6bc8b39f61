"""Two-class datasets: container, CSV ingestion, and degeneracy checks.

A dataset is an N x p matrix of numeric features plus a class label per
observation. Labels are the integers 1 and 2 and each class must contain
at least two observations, since every downstream statistic divides by a
within-class standard deviation.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .output import fmt


def default_feature_names(p: int) -> tuple[str, ...]:
    return tuple(f"V{j + 1}" for j in range(p))


@dataclass(frozen=True)
class ClassedDataset:
    """Immutable two-class dataset.

    Parameters
    ----------
    x : ndarray, shape (N, p)
        Feature matrix, finite float64.
    y : ndarray, shape (N,)
        Class labels, values 1 and 2.
    feature_names : tuple of str, optional
        Unique names, defaults to V1..Vp.
    """

    x: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...] = ()

    def __post_init__(self):
        x = np.array(self.x, dtype=np.float64)
        y = np.array(self.y, dtype=np.int64)
        if x.ndim != 2:
            raise DataError(f"x must be 2-dimensional, got shape {x.shape}")
        if y.shape != (x.shape[0],):
            raise DataError(f"y has shape {y.shape}, expected ({x.shape[0]},)")
        if not np.all(np.isfinite(x)):
            bad = np.argwhere(~np.isfinite(x))[0]
            raise DataError(
                f"non-finite value at observation {bad[0] + 1}, feature {bad[1] + 1}"
            )
        bad_labels = np.setdiff1d(np.unique(y), [1, 2])
        if bad_labels.size:
            raise DataError(f"labels must be 1 or 2, found {bad_labels.tolist()}")
        n1 = int(np.sum(y == 1))
        n2 = int(np.sum(y == 2))
        if n1 < 2 or n2 < 2:
            raise DataError(
                f"each class needs at least 2 observations, got n1={n1}, n2={n2}"
            )
        names = self.feature_names or default_feature_names(x.shape[1])
        names = tuple(str(n) for n in names)
        if len(names) != x.shape[1]:
            raise DataError(
                f"{len(names)} feature names for {x.shape[1]} features"
            )
        if len(set(names)) != len(names):
            raise DataError("feature names must be unique")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @property
    def n1(self) -> int:
        return int(np.sum(self.y == 1))

    @property
    def n2(self) -> int:
        return int(np.sum(self.y == 2))

    def class_rows(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.y == label)


def _parse_cell(text: str, row: int, col: int, what: str) -> float:
    stripped = text.strip()
    if not stripped:
        raise DataError(f"missing {what} at row {row}, column {col}")
    try:
        value = float(stripped)
    except ValueError:
        raise DataError(
            f"cannot parse {what} {stripped!r} at row {row}, column {col}"
        ) from None
    if not np.isfinite(value):
        raise DataError(f"non-finite {what} at row {row}, column {col}")
    return value


def load_csv(path, has_header: bool = False, label_column: int = 0) -> ClassedDataset:
    """Read a delimited file into a ClassedDataset.

    One row per observation; `label_column` (0-based) holds the class label
    (1 or 2) and every other column is a feature. Row and column indices in
    error messages are 1-based file positions, counting the header row.
    """
    try:
        with open(path, newline="") as fh:
            raw = [row for row in csv.reader(fh)]
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from None
    if not raw:
        raise DataError(f"{path}: file is empty")
    header: list[str] | None = None
    if has_header:
        header = [c.strip() for c in raw[0]]
        raw = raw[1:]
    if not raw:
        raise DataError(f"{path}: no data rows")
    width = len(raw[0])
    if label_column < 0 or label_column >= width:
        raise DataError(
            f"label column {label_column} out of range for {width} columns"
        )
    offset = 2 if has_header else 1
    rows = []
    labels = []
    for i, row in enumerate(raw):
        rownum = i + offset
        if len(row) != width:
            raise DataError(
                f"row {rownum} has {len(row)} columns, expected {width}"
            )
        label = _parse_cell(row[label_column], rownum, label_column + 1, "label")
        if label not in (1.0, 2.0):
            raise DataError(
                f"label must be 1 or 2, got {fmt(label)} at row {rownum}"
            )
        labels.append(int(label))
        rows.append(
            [
                _parse_cell(cell, rownum, j + 1, "value")
                for j, cell in enumerate(row)
                if j != label_column
            ]
        )
    if header is not None:
        names = tuple(h for j, h in enumerate(header) if j != label_column)
    else:
        names = ()
    return ClassedDataset(np.array(rows, dtype=np.float64), np.array(labels), names)


def write_csv(dataset: ClassedDataset, path) -> None:
    """Write header + rows with the label in column 0; floats carry 17
    significant digits so a reload reproduces the matrix bit for bit."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y", *dataset.feature_names])
        for i in range(dataset.n):
            writer.writerow(
                [str(int(dataset.y[i])), *(fmt(float(v)) for v in dataset.x[i])]
            )


@dataclass(frozen=True)
class DegeneracyReport:
    """A feature whose standard deviation within one class is exactly zero."""

    feature: int
    name: str
    class_label: int


def validate(dataset: ClassedDataset) -> list[DegeneracyReport]:
    """List every (feature, class) with zero within-class variance.

    Such features make the standardized interaction observations undefined;
    moment computation rejects datasets that contain any.
    """
    reports = []
    for label in (1, 2):
        rows = dataset.x[dataset.y == label]
        sd = rows.std(axis=0, ddof=1)
        for j in np.flatnonzero(sd == 0.0):
            reports.append(
                DegeneracyReport(int(j), dataset.feature_names[j], label)
            )
    reports.sort(key=lambda r: (r.feature, r.class_label))
    return reports
