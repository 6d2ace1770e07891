"""Mixed-type tabular data: schema, CSV I/O and a seeded generator."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError
from .rng import substream

CONTINUOUS = "continuous"
NOMINAL = "nominal"


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    kind: str
    # None on a nominal column means "open": labels are discovered at load.
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in (CONTINUOUS, NOMINAL):
            raise DataError(f"column {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == CONTINUOUS and self.labels is not None:
            raise DataError(f"continuous column {self.name!r} cannot carry labels")
        if self.labels is not None:
            labels = tuple(str(l) for l in self.labels)
            if not labels:
                raise DataError(f"nominal column {self.name!r} has an empty label list")
            if len(set(labels)) != len(labels):
                raise DataError(f"nominal column {self.name!r} has duplicate labels")
            object.__setattr__(self, "labels", labels)

    @property
    def is_nominal(self) -> bool:
        return self.kind == NOMINAL


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """A binary-target dataset with continuous and nominal feature columns.

    ``values`` is an ``(s, p)`` float matrix in schema order; nominal columns
    hold label indices into ``schema[j].labels``. ``target`` is a boolean
    vector, True for the minority class.
    """

    schema: tuple[ColumnSchema, ...]
    values: np.ndarray
    target: np.ndarray
    minority_label: str
    majority_label: str
    target_name: str = "target"

    def __post_init__(self):
        schema = tuple(self.schema)
        object.__setattr__(self, "schema", schema)
        names = [col.name for col in schema]
        if len(set(names)) != len(names):
            raise DataError("column names must be unique")
        if self.target_name in names:
            raise DataError(f"target column {self.target_name!r} clashes with a feature column")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1 and len(schema) == 0:
            values = values.reshape(-1, 0)
        if values.ndim != 2 or values.shape[1] != len(schema):
            raise DataError(f"values shape {values.shape} does not match {len(schema)} columns")
        target = np.asarray(self.target, dtype=bool)
        if target.shape != (values.shape[0],):
            raise DataError("target length does not match row count")
        if not np.all(np.isfinite(values)):
            raise DataError("dataset contains missing or non-finite values")
        for j, col in enumerate(schema):
            if col.is_nominal:
                if col.labels is None:
                    raise DataError(f"nominal column {col.name!r} has no label list")
                codes = values[:, j]
                if np.any(codes != np.round(codes)) or np.any(codes < 0) or np.any(codes >= len(col.labels)):
                    raise DataError(f"nominal column {col.name!r} has out-of-range label indices")
        if self.minority_label == self.majority_label:
            raise DataError("minority and majority labels must differ")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "target", _frozen(target))

    # counts

    @property
    def s(self) -> int:
        return int(self.values.shape[0])

    @property
    def t(self) -> int:
        return int(self.target.sum())

    @property
    def c(self) -> int:
        return sum(1 for col in self.schema if not col.is_nominal)

    @property
    def n_nominal(self) -> int:
        return sum(1 for col in self.schema if col.is_nominal)

    @property
    def n_majority(self) -> int:
        return self.s - self.t

    @property
    def continuous_idx(self) -> np.ndarray:
        return np.array([j for j, col in enumerate(self.schema) if not col.is_nominal], dtype=np.intp)

    @property
    def nominal_idx(self) -> np.ndarray:
        return np.array([j for j, col in enumerate(self.schema) if col.is_nominal], dtype=np.intp)

    @property
    def column_names(self) -> list[str]:
        return [col.name for col in self.schema]

    def codes(self, j: int) -> np.ndarray:
        """Label indices of nominal column ``j`` as integers."""
        return self.values[:, j].astype(np.intp)

    # derived datasets

    def subset(self, rows: Sequence[int] | np.ndarray) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(self.schema, self.values[rows], self.target[rows],
                       self.minority_label, self.majority_label, self.target_name)

    def with_rows(self, values: np.ndarray, target: np.ndarray) -> "Dataset":
        """Return a copy with extra rows appended after the existing ones."""
        values = np.asarray(values, dtype=np.float64).reshape(-1, len(self.schema))
        return Dataset(self.schema, np.vstack([self.values, values]),
                       np.concatenate([self.target, np.asarray(target, dtype=bool)]),
                       self.minority_label, self.majority_label, self.target_name)

    def equals(self, other: "Dataset") -> bool:
        return (
            self.schema == other.schema
            and self.minority_label == other.minority_label
            and self.majority_label == other.majority_label
            and self.target_name == other.target_name
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
            and bool(np.array_equal(self.target, other.target))
        )

    def label_of(self, j: int, code: int) -> str:
        return self.schema[j].labels[int(code)]

    def target_labels(self) -> list[str]:
        return [self.minority_label if v else self.majority_label for v in self.target]


# ---------------------------------------------------------------- schema I/O


def read_schema(path: str | os.PathLike) -> tuple[list[ColumnSchema], str, str | None]:
    """Parse a schema sidecar.

    Two layouts are accepted::

        {"columns": {"C1": {"kind": "continuous"}, ...}, "target": "y", "minority_label": "min"}
        {"C1": {"kind": "continuous"}, ..., "target": "y", "minority_label": "min"}

    Nominal columns may list ``"labels"`` to declare a closed label set.
    Returns ``(columns, target, minority_label)``.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"schema {path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise DataError(f"schema {path}: expected a JSON object")
    target = raw.get("target")
    if not isinstance(target, str):
        raise DataError(f"schema {path}: missing 'target' key")
    minority = raw.get("minority_label")
    if "columns" in raw:
        spec = raw["columns"]
    else:
        spec = {k: v for k, v in raw.items() if isinstance(v, dict)}
    columns = []
    for name, entry in spec.items():
        if not isinstance(entry, dict) or "kind" not in entry:
            raise DataError(f"schema {path}: column {name!r} needs a 'kind'")
        labels = entry.get("labels")
        columns.append(ColumnSchema(name, entry["kind"], tuple(labels) if labels is not None else None))
    return columns, target, None if minority is None else str(minority)


def schema_to_dict(dataset: Dataset) -> dict:
    columns = {}
    for col in dataset.schema:
        entry = {"kind": col.kind}
        if col.is_nominal:
            entry["labels"] = list(col.labels)
        columns[col.name] = entry
    return {"columns": columns, "target": dataset.target_name, "minority_label": dataset.minority_label}


# ------------------------------------------------------------------- CSV I/O


def _parse_float(text: str, column: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"line {lineno}: non-numeric value {text!r} in continuous column {column!r}") from None
    if not math.isfinite(value):
        raise DataError(f"line {lineno}: missing or non-finite value in column {column!r}")
    return value


def load_csv(
    path: str | os.PathLike,
    schema: Sequence[ColumnSchema],
    target_column: str,
    minority_label: str | None = None,
    *,
    auto_minority: bool = False,
) -> Dataset:
    """Read a CSV file into a :class:`Dataset`.

    Columns are ordered as in the file header. Nominal columns whose schema
    entry has ``labels=None`` get their label list from first appearance in
    the file; closed label lists reject unseen labels. If ``minority_label``
    is None and ``auto_minority`` is set, the less frequent target value is
    used.
    """
    by_name = {col.name: col for col in schema}
    if len(by_name) != len(schema):
        raise DataError("schema column names must be unique")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, strict=True)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        except csv.Error as exc:
            raise DataError(f"{path}: malformed CSV ({exc})") from None
        header = [h.strip() for h in header]
        if target_column not in header:
            raise DataError(f"{path}: target column {target_column!r} not in header")
        features = [h for h in header if h != target_column]
        if len(set(header)) != len(header):
            raise DataError(f"{path}: duplicate column names in header")
        if set(features) != set(by_name):
            missing = sorted(set(by_name) - set(features))
            extra = sorted(set(features) - set(by_name))
            raise DataError(f"{path}: header does not match schema (missing {missing}, unexpected {extra})")
        cols = [by_name[name] for name in features]
        tpos = header.index(target_column)
        fpos = [header.index(name) for name in features]

        labels: list[list[str] | None] = [list(c.labels) if c.labels else [] for c in cols]
        closed = [c.labels is not None for c in cols]
        lookup = [{l: i for i, l in enumerate(ls)} for ls in labels]
        rows: list[list[float]] = []
        targets: list[str] = []
        try:
            for record in reader:
                lineno = reader.line_num
                if not record:
                    continue
                if len(record) != len(header):
                    raise DataError(f"line {lineno}: expected {len(header)} fields, got {len(record)}")
                tval = record[tpos].strip()
                if tval == "":
                    raise DataError(f"line {lineno}: missing target value")
                row = []
                for j, (col, pos) in enumerate(zip(cols, fpos)):
                    cell = record[pos].strip()
                    if cell == "":
                        raise DataError(f"line {lineno}: missing value in column {col.name!r}")
                    if col.is_nominal:
                        idx = lookup[j].get(cell)
                        if idx is None:
                            if closed[j]:
                                raise DataError(f"line {lineno}: unseen label {cell!r} in column {col.name!r}")
                            idx = len(labels[j])
                            labels[j].append(cell)
                            lookup[j][cell] = idx
                        row.append(float(idx))
                    else:
                        row.append(_parse_float(cell, col.name, lineno))
                rows.append(row)
                targets.append(tval)
        except csv.Error as exc:
            raise DataError(f"{path}: malformed CSV ({exc})") from None

    if not rows:
        raise DataError(f"{path}: no rows")
    distinct = list(dict.fromkeys(targets))
    if len(distinct) != 2:
        raise DataError(f"{path}: target column must have exactly 2 distinct values, found {len(distinct)}")
    if minority_label is None:
        if not auto_minority:
            raise DataError("minority_label is required (or enable auto_minority)")
        counts = Counter(targets)
        if counts[distinct[0]] == counts[distinct[1]]:
            raise DataError("cannot auto-detect minority label: classes are the same size")
        minority_label = min(distinct, key=lambda v: counts[v])
    if minority_label not in distinct:
        raise DataError(f"minority label {minority_label!r} not among target values {distinct}")
    majority_label = distinct[0] if distinct[1] == minority_label else distinct[1]

    final_schema = tuple(
        ColumnSchema(c.name, c.kind, tuple(labels[j]) if c.is_nominal else None) for j, c in enumerate(cols)
    )
    values = np.array(rows, dtype=np.float64).reshape(len(rows), len(cols))
    target = np.array([v == minority_label for v in targets], dtype=bool)
    return Dataset(final_schema, values, target, minority_label, majority_label, target_column)


def dataset_to_csv_text(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(dataset.column_names + [dataset.target_name])
    nominal = [col.is_nominal for col in dataset.schema]
    for row, is_min in zip(dataset.values, dataset.target):
        out = []
        for j, v in enumerate(row):
            # repr() is the shortest string that round-trips the double exactly
            out.append(dataset.schema[j].labels[int(v)] if nominal[j] else repr(float(v)))
        out.append(dataset.minority_label if is_min else dataset.majority_label)
        writer.writerow(out)
    return buf.getvalue()


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(dataset: Dataset, path: str | os.PathLike) -> None:
    try:
        atomic_write_text(path, dataset_to_csv_text(dataset))
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


# ----------------------------------------------------------------- generator


@dataclass(frozen=True)
class ContinuousSpec:
    name: str
    minority_mean: float
    minority_std: float
    majority_mean: float
    majority_std: float


@dataclass(frozen=True)
class NominalSpec:
    name: str
    labels: tuple[str, ...]
    minority_probs: tuple[float, ...]
    majority_probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "minority_probs", tuple(float(p) for p in self.minority_probs))
        object.__setattr__(self, "majority_probs", tuple(float(p) for p in self.majority_probs))
        for which in ("minority_probs", "majority_probs"):
            probs = getattr(self, which)
            if len(probs) != len(self.labels):
                raise DataError(f"{self.name}: {which} has {len(probs)} entries for {len(self.labels)} labels")
            if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-9:
                raise DataError(f"{self.name}: {which} must be non-negative and sum to 1")


@dataclass(frozen=True)
class GeneratorSpec:
    s: int
    imbalance_ratio: float
    continuous: tuple[ContinuousSpec, ...] = ()
    nominal: tuple[NominalSpec, ...] = ()
    seed: int = 0
    minority_label: str = "min"
    majority_label: str = "maj"
    target_name: str = "target"

    def __post_init__(self):
        object.__setattr__(self, "continuous", tuple(self.continuous))
        object.__setattr__(self, "nominal", tuple(self.nominal))
        if self.imbalance_ratio < 1:
            raise DataError("imbalance_ratio must be >= 1")
        if self.s < 2:
            raise DataError("s must be at least 2")
        if not self.continuous and not self.nominal:
            raise DataError("generator spec needs at least one feature")

    @property
    def n_minority(self) -> int:
        return max(1, int(round(self.s / (self.imbalance_ratio + 1.0))))

    @classmethod
    def from_dict(cls, raw: dict) -> "GeneratorSpec":
        try:
            cont = tuple(
                ContinuousSpec(
                    c["name"],
                    float(c["minority"]["mean"]), float(c["minority"]["std"]),
                    float(c["majority"]["mean"]), float(c["majority"]["std"]),
                )
                for c in raw.get("continuous", [])
            )
            nom = tuple(
                NominalSpec(n["name"], tuple(n["labels"]), tuple(n["minority"]), tuple(n["majority"]))
                for n in raw.get("nominal", [])
            )
            return cls(
                s=int(raw["s"]),
                imbalance_ratio=float(raw["imbalance_ratio"]),
                continuous=cont,
                nominal=nom,
                seed=int(raw.get("seed", 0)),
                minority_label=str(raw.get("minority_label", "min")),
                majority_label=str(raw.get("majority_label", "maj")),
                target_name=str(raw.get("target", "target")),
            )
        except (KeyError, TypeError) as exc:
            raise DataError(f"invalid generator spec: {exc}") from None

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "imbalance_ratio": self.imbalance_ratio,
            "seed": self.seed,
            "minority_label": self.minority_label,
            "majority_label": self.majority_label,
            "target": self.target_name,
            "continuous": [
                {"name": c.name,
                 "minority": {"mean": c.minority_mean, "std": c.minority_std},
                 "majority": {"mean": c.majority_mean, "std": c.majority_std}}
                for c in self.continuous
            ],
            "nominal": [
                {"name": n.name, "labels": list(n.labels),
                 "minority": list(n.minority_probs), "majority": list(n.majority_probs)}
                for n in self.nominal
            ],
        }


def generate_synthetic(spec: GeneratorSpec) -> Dataset:
    """Draw a dataset with class-conditional features.

    Continuous columns come first, then nominal ones. The row order is a
    seeded shuffle, so the class column is not sorted.
    """
    t = spec.n_minority
    n_maj = spec.s - t
    if n_maj < 1:
        raise DataError("generator spec yields no majority rows")
    is_min = np.concatenate([np.ones(t, dtype=bool), np.zeros(n_maj, dtype=bool)])
    columns = []
    schema = []
    for j, c in enumerate(spec.continuous):
        rng = substream(spec.seed, 1, j)
        col = np.empty(spec.s)
        col[:t] = rng.normal(c.minority_mean, c.minority_std, t)
        col[t:] = rng.normal(c.majority_mean, c.majority_std, n_maj)
        columns.append(col)
        schema.append(ColumnSchema(c.name, CONTINUOUS))
    for j, n in enumerate(spec.nominal):
        rng = substream(spec.seed, 2, j)
        col = np.empty(spec.s)
        col[:t] = rng.choice(len(n.labels), size=t, p=n.minority_probs)
        col[t:] = rng.choice(len(n.labels), size=n_maj, p=n.majority_probs)
        columns.append(col)
        schema.append(ColumnSchema(n.name, NOMINAL, n.labels))
    order = substream(spec.seed, 0).permutation(spec.s)
    values = np.column_stack(columns)[order]
    return Dataset(tuple(schema), values, is_min[order], spec.minority_label, spec.majority_label,
                   spec.target_name)
