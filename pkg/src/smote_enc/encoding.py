"""Numeric encoding of nominal labels by their association with the minority class.

Each label ``l`` of a nominal feature is scored as ``chi = (o - e') / e'``
where ``e`` is the number of training rows carrying ``l``, ``o`` the number
of those rows in the minority class and ``e' = e * ir`` the minority count
expected if ``l`` were independent of the class (``ir = t / s``). When the
data has continuous columns, ``chi`` is scaled by ``m``, the median of the
minority-class standard deviations of the continuous columns, so that label
distances are commensurate with continuous ones.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import SamplerError
from .tabular import Dataset

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabelStats:
    label: str
    e: int
    o: int
    e_prime: float
    chi: float
    encoded: float

    def to_dict(self) -> dict:
        return {"e": self.e, "o": self.o, "e_prime": self.e_prime, "chi": self.chi, "encoded": self.encoded}


@dataclass(frozen=True)
class EncodingModel:
    ir: float
    m: float | None
    t: int
    s: int
    c: int
    # column index -> label index -> stats
    per_feature: dict[int, dict[int, LabelStats]] = field(default_factory=dict)
    feature_names: dict[int, str] = field(default_factory=dict)
    scaled: bool = False

    @property
    def has_continuous(self) -> bool:
        return self.c > 0

    def value(self, column: int, code: int) -> float:
        try:
            return self.per_feature[column][code].encoded
        except KeyError:
            raise SamplerError(
                f"label index {code} of column {self.feature_names.get(column, column)!r} "
                "was not seen when fitting the encoding"
            ) from None

    def to_dict(self) -> dict:
        return {
            "ir": self.ir,
            "m": self.m,
            "t": self.t,
            "s": self.s,
            "c": self.c,
            "scaled_by_m": self.scaled,
            "features": {
                self.feature_names[j]: {st.label: st.to_dict() for st in stats.values()}
                for j, stats in self.per_feature.items()
            },
        }


def minority_stds(dataset: Dataset) -> np.ndarray:
    """Sample (n-1) standard deviation of each continuous column over minority rows."""
    if dataset.c == 0:
        raise SamplerError("no continuous features to take standard deviations of")
    if dataset.t < 2:
        raise SamplerError(f"need at least 2 minority rows for a sample standard deviation, got {dataset.t}")
    block = dataset.values[np.ix_(dataset.target, dataset.continuous_idx)]
    return block.std(axis=0, ddof=1)


def median_minority_std(dataset: Dataset) -> float:
    stds = minority_stds(dataset)
    if not np.any(stds > 0):
        raise SamplerError("all continuous features are constant within the minority class")
    return float(np.median(stds))


def fit_encoding(dataset: Dataset) -> EncodingModel:
    """Fit per-label statistics on ``dataset`` (the partition being resampled)."""
    t, s = dataset.t, dataset.s
    if t < 1:
        raise SamplerError("cannot fit an encoding without minority rows")
    ir = t / s
    m = None
    scaled = False
    if dataset.c > 0:
        stds = minority_stds(dataset)
        m = float(np.median(stds))
        if m > 0:
            scaled = True
        else:
            log.warning("median minority std is 0; nominal labels encoded by chi alone")

    per_feature: dict[int, dict[int, LabelStats]] = {}
    names = {}
    for j in dataset.nominal_idx:
        j = int(j)
        col = dataset.schema[j]
        codes = dataset.codes(j)
        e_counts = np.bincount(codes, minlength=len(col.labels))
        o_counts = np.bincount(codes[dataset.target], minlength=len(col.labels))
        stats = {}
        for code in np.flatnonzero(e_counts):
            e = int(e_counts[code])
            o = int(o_counts[code])
            e_prime = e * ir
            # (o - e*t/s) / (e*t/s) in integers: exact 0 for proportional labels, exact -1 when o == 0
            chi = (o * s - e * t) / (e * t)
            stats[int(code)] = LabelStats(col.labels[code], e, o, e_prime, chi, chi * m if scaled else chi)
        per_feature[j] = stats
        names[j] = col.name
    return EncodingModel(ir, m, t, s, dataset.c, per_feature, names, scaled)


def encode_dataset(dataset: Dataset, model: EncodingModel) -> tuple[np.ndarray, np.ndarray]:
    """Replace nominal cells by their encoded values.

    Returns ``(matrix, label_codes)``; ``label_codes`` is the ``(s, n_nominal)``
    integer record of the original label indices, kept so decoding never has
    to invert floats.
    """
    matrix = np.array(dataset.values, dtype=np.float64, copy=True)
    nominal = dataset.nominal_idx
    codes = np.empty((dataset.s, len(nominal)), dtype=np.intp)
    for k, j in enumerate(nominal):
        j = int(j)
        col_codes = dataset.codes(j)
        stats = model.per_feature.get(j, {})
        lut = np.full(len(dataset.schema[j].labels), np.nan)
        for code, st in stats.items():
            lut[code] = st.encoded
        encoded = lut[col_codes]
        if np.any(np.isnan(encoded)):
            bad = dataset.schema[j].labels[col_codes[np.isnan(encoded)][0]]
            raise SamplerError(f"label {bad!r} of column {dataset.schema[j].name!r} is not in the encoding")
        matrix[:, j] = encoded
        codes[:, k] = col_codes
    return matrix, codes


def inverse_encode(matrix: np.ndarray, label_codes: np.ndarray, template: Dataset,
                   target: np.ndarray) -> Dataset:
    """Rebuild a dataset from encoded rows plus their label records.

    Continuous columns come from ``matrix``; nominal columns come from
    ``label_codes`` (one column per nominal feature, in schema order).
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    label_codes = np.asarray(label_codes)
    nominal = template.nominal_idx
    if label_codes.shape != (matrix.shape[0], len(nominal)):
        raise SamplerError("label records are missing for some nominal cells")
    if np.any(label_codes < 0):
        raise SamplerError("label records are missing for some nominal cells")
    values = matrix.copy()
    for k, j in enumerate(nominal):
        values[:, j] = label_codes[:, k]
    return Dataset(template.schema, values, target, template.minority_label, template.majority_label,
                   template.target_name)
