"""SMOTE, SMOTE-NC, SMOTE-ENC and a one-hot + SMOTE adapter.

All samplers share one synthesis plan. Synthetic row ``j`` is seeded by
minority row ``j mod t`` (round-robin), or, when fewer than ``t`` rows are
requested, by a seeded sample of distinct minority rows. The neighbour
choice and the interpolation fraction for the ``q``-th synthetic of minority
row ``r`` are the ``q``-th draws of the substream ``(seed, 1, r)``, so the
output does not depend on the order rows are generated in.

Nominal values of synthetic rows are never interpolated. SMOTE-NC and
SMOTE-ENC take the most common label among the seed row's ``k`` nearest
minority neighbours (ties go to the nearest neighbour holding a tied label).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .encoding import EncodingModel, encode_dataset, fit_encoding, inverse_encode, median_minority_std
from .errors import SamplerError
from .neighbors import EUCLIDEAN, DistanceMetric, neighbor_table
from .rng import substream
from .tabular import Dataset

METHODS = ("smote", "smote_nc", "smote_enc", "one_hot_smote")


def normalize_method(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    if key not in METHODS:
        raise ValueError(f"unknown method {name!r}; choose from {', '.join(m.replace('_', '-') for m in METHODS)}")
    return key


@dataclass(frozen=True)
class SamplerConfig:
    """``ratio`` is the target minority/majority ratio; ``percent`` (if set)
    requests ``floor(percent/100 * t)`` synthetic rows instead."""

    method: str = "smote_enc"
    k: int = 5
    ratio: float = 1.0
    percent: float | None = None
    seed: int = 0
    raw_one_hot: bool = False

    def __post_init__(self):
        object.__setattr__(self, "method", normalize_method(self.method))
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.percent is not None:
            if not self.percent > 0:
                raise ValueError("percent must be > 0")
        elif not self.ratio > 0:
            raise ValueError("ratio must be > 0")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def label(self) -> str:
        return self.method.replace("_", "-")

    def n_synthetic(self, dataset: Dataset) -> int:
        t, n_maj = dataset.t, dataset.n_majority
        if self.percent is not None:
            return math.floor(Fraction(str(self.percent)) * t / 100)
        target = math.floor(Fraction(str(self.ratio)) * n_maj + Fraction(1, 2))
        if target < t:
            raise SamplerError(
                f"ratio {self.ratio} asks for {target} minority rows but {t} already exist; "
                "oversampling cannot reduce the minority class"
            )
        return target - t


@dataclass(frozen=True, eq=False)
class Provenance:
    """Per synthetic row: seed row, chosen neighbour (row indices into the
    input dataset) and interpolation fraction."""

    seed_index: np.ndarray
    neighbor_index: np.ndarray
    lam: np.ndarray

    def __len__(self):
        return len(self.lam)

    def to_dict(self) -> dict:
        return {
            "seed_index": [int(i) for i in self.seed_index],
            "neighbor_index": [int(i) for i in self.neighbor_index],
            "lambda": [float(x) for x in self.lam],
        }


@dataclass(frozen=True, eq=False)
class ResampleResult:
    dataset: Dataset
    provenance: Provenance
    n_original: int
    encoding: EncodingModel | None = None
    # minority row indices, their pairwise distances and k-NN lists
    trace: dict | None = None
    raw_matrix: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    @property
    def synthetic(self) -> Dataset:
        return self.dataset.subset(np.arange(self.n_original, self.dataset.s))


# ------------------------------------------------------------------ planning


def _check_minority(t: int, k: int) -> None:
    if t < 2:
        raise SamplerError(f"need at least 2 minority samples to interpolate, got {t}")
    if k >= t:
        raise SamplerError(
            f"k={k} needs at least {k + 1} minority samples, got {t}; reduce k or supply more minority samples"
        )


def synthesis_plan(t: int, k: int, n_synthetic: int, seed: int):
    """Seed rows, neighbour slots (0..k-1) and fractions for ``n_synthetic`` rows."""
    if n_synthetic < 0:
        raise ValueError("n_synthetic must be >= 0")
    if n_synthetic == 0:
        return np.zeros(0, np.intp), np.zeros(0, np.intp), np.zeros(0)
    if n_synthetic < t:
        seeds = np.sort(substream(seed, 0).choice(t, size=n_synthetic, replace=False)).astype(np.intp)
    else:
        seeds = np.arange(n_synthetic, dtype=np.intp) % t
    slots = np.empty(n_synthetic, dtype=np.intp)
    lam = np.empty(n_synthetic)
    for r in np.unique(seeds):
        where = np.flatnonzero(seeds == r)
        # one (slot, lambda) pair per ordinal, so ordinal q's draws never depend on the row's total
        u = substream(seed, 1, int(r)).random((len(where), 2))
        slots[where] = np.minimum((u[:, 0] * k).astype(np.intp), k - 1)
        lam[where] = u[:, 1]
    return seeds, slots, lam


def _interpolate(points: np.ndarray, seeds: np.ndarray, nbrs: np.ndarray, lam: np.ndarray) -> np.ndarray:
    a = points[seeds]
    b = points[nbrs]
    out = a + lam[:, None] * (b - a)
    # keep results inside the segment's bounding box despite rounding
    return np.clip(out, np.minimum(a, b), np.maximum(a, b))


def smote_core(minority_matrix, k: int, n_synthetic: int, seed: int = 0, *,
               metric: DistanceMetric = EUCLIDEAN):
    """Interpolate ``n_synthetic`` rows between minority rows and their k-NN.

    Returns ``(rows, seed_local, neighbor_local, lam)`` with indices local to
    ``minority_matrix``.
    """
    points = np.asarray(minority_matrix, dtype=np.float64)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    _check_minority(len(points), k)
    if n_synthetic == 0:
        empty = np.zeros(0, np.intp)
        return np.zeros((0, points.shape[1])), empty, empty, np.zeros(0)
    table = neighbor_table(points, k, metric)
    seeds, slots, lam = synthesis_plan(len(points), k, n_synthetic, seed)
    nbrs = table[seeds, slots]
    return _interpolate(points, seeds, nbrs, lam), seeds, nbrs, lam


def majority_vote(neighbor_labels: np.ndarray) -> int:
    """Most common label in a nearest-first list; ties go to the earliest."""
    labels = [int(v) for v in neighbor_labels]
    counts: dict[int, int] = {}
    for v in labels:
        counts[v] = counts.get(v, 0) + 1
    best = max(counts.values())
    return next(v for v in labels if counts[v] == best)


# ------------------------------------------------------------------- samplers


def _mixed_resample(dataset: Dataset, config: SamplerConfig, distance_points: np.ndarray,
                    metric: DistanceMetric, *, trace: bool, encoding=None) -> ResampleResult:
    """Neighbours from ``distance_points``; continuous columns interpolated,
    nominal columns voted."""
    minority = np.flatnonzero(dataset.target)
    t = len(minority)
    _check_minority(t, config.k)
    n_syn = config.n_synthetic(dataset)
    points = distance_points[minority]
    need_table = n_syn > 0 or trace
    table, dist = (neighbor_table(points, config.k, metric, return_distances=True)
                   if need_table else (np.zeros((t, config.k), np.intp), None))
    seeds, slots, lam = synthesis_plan(t, config.k, n_syn, config.seed)
    nbrs = table[seeds, slots]

    values = dataset.values[minority]
    synthetic = np.empty((n_syn, len(dataset.schema)))
    cont = dataset.continuous_idx
    if len(cont):
        synthetic[:, cont] = _interpolate(values[:, cont], seeds, nbrs, lam)
    for j in dataset.nominal_idx:
        votes = np.array([majority_vote(values[table[r], j]) for r in range(t)]) if n_syn else np.zeros(t)
        synthetic[:, j] = votes[seeds]

    out = dataset.with_rows(synthetic, np.ones(n_syn, dtype=bool))
    prov = Provenance(minority[seeds], minority[nbrs], lam)
    info = None
    if trace:
        info = {
            "minority_indices": [int(i) for i in minority],
            "distances": dist.tolist(),
            "neighbors": [[int(minority[i]) for i in row] for row in table],
        }
    return ResampleResult(out, prov, dataset.s, encoding=encoding, trace=info)


def smote(dataset: Dataset, config: SamplerConfig, *, trace: bool = False) -> ResampleResult:
    """Plain SMOTE; only defined for datasets without nominal features."""
    if dataset.n_nominal:
        raise SamplerError(
            "SMOTE cannot handle nominal features; use one-hot-smote or smote-enc for this dataset"
        )
    return _mixed_resample(dataset, config, dataset.values, EUCLIDEAN, trace=trace)


def smote_nc(dataset: Dataset, config: SamplerConfig, *, trace: bool = False) -> ResampleResult:
    if dataset.c == 0:
        raise SamplerError("SMOTE-NC requires at least one continuous feature")
    _check_minority(dataset.t, config.k)
    m = median_minority_std(dataset)
    mask = [col.is_nominal for col in dataset.schema]
    metric = DistanceMetric.nc(mask, m)
    result = _mixed_resample(dataset, config, dataset.values, metric, trace=trace)
    return replace(result, extra={"m": m})


def smote_enc(dataset: Dataset, config: SamplerConfig, *, trace: bool = False) -> ResampleResult:
    """Encode nominal labels, run SMOTE in the encoded space, vote, decode.

    Works with or without continuous features. Continuous columns are
    interpolated; encoded nominal coordinates only shape the neighbourhoods.
    """
    _check_minority(dataset.t, config.k)
    model = fit_encoding(dataset)
    matrix, codes = encode_dataset(dataset, model)
    result = _mixed_resample(dataset, config, matrix, EUCLIDEAN, trace=trace, encoding=model)
    if dataset.n_nominal:
        # decode through the label records, never through the floats
        out = result.dataset
        syn_codes = out.values[dataset.s:, dataset.nominal_idx].astype(np.intp)
        decoded = inverse_encode(out.values, np.vstack([codes, syn_codes]), dataset, out.target)
        result = replace(result, dataset=decoded)
    return result


def one_hot_expand(dataset: Dataset) -> tuple[np.ndarray, list[tuple[int, slice]]]:
    """Expand nominal columns into 0/1 indicator blocks; return the matrix and
    each original column's slice of it."""
    blocks = []
    spans = []
    pos = 0
    for j, col in enumerate(dataset.schema):
        if col.is_nominal:
            width = len(col.labels)
            block = np.zeros((dataset.s, width))
            block[np.arange(dataset.s), dataset.codes(j)] = 1.0
        else:
            width = 1
            block = dataset.values[:, j:j + 1]
        blocks.append(block)
        spans.append((j, slice(pos, pos + width)))
        pos += width
    matrix = np.hstack(blocks) if blocks else np.zeros((dataset.s, 0))
    return matrix, spans


def one_hot_smote(dataset: Dataset, config: SamplerConfig, *, trace: bool = False) -> ResampleResult:
    """SMOTE over one-hot indicators; labels recovered by per-feature argmax.

    With ``config.raw_one_hot`` the unrounded indicator matrix (originals then
    synthetics) is kept on ``result.raw_matrix``.
    """
    minority = np.flatnonzero(dataset.target)
    _check_minority(len(minority), config.k)
    expanded, spans = one_hot_expand(dataset)
    n_syn = config.n_synthetic(dataset)
    rows, seeds, nbrs, lam = smote_core(expanded[minority], config.k, n_syn, config.seed)
    synthetic = np.empty((n_syn, len(dataset.schema)))
    for j, sl in spans:
        if dataset.schema[j].is_nominal:
            synthetic[:, j] = np.argmax(rows[:, sl], axis=1) if n_syn else 0
        else:
            synthetic[:, j] = rows[:, sl.start]
    out = dataset.with_rows(synthetic, np.ones(n_syn, dtype=bool))
    prov = Provenance(minority[seeds], minority[nbrs], lam)
    info = None
    if trace:
        table, dist = neighbor_table(expanded[minority], config.k, return_distances=True)
        info = {
            "minority_indices": [int(i) for i in minority],
            "distances": dist.tolist(),
            "neighbors": [[int(minority[i]) for i in row] for row in table],
        }
    raw = np.vstack([expanded, rows]) if config.raw_one_hot else None
    return ResampleResult(out, prov, dataset.s, trace=info, raw_matrix=raw,
                          extra={"expanded_columns": expanded.shape[1]})


SAMPLERS = {
    "smote": smote,
    "smote_nc": smote_nc,
    "smote_enc": smote_enc,
    "one_hot_smote": one_hot_smote,
}


def resample(dataset: Dataset, config: SamplerConfig, *, trace: bool = False) -> ResampleResult:
    return SAMPLERS[config.method](dataset, config, trace=trace)
