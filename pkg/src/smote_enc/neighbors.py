"""Distances and exact k-nearest-neighbour search among minority rows."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SamplerError


@dataclass(frozen=True)
class DistanceMetric:
    """``euclidean`` over all columns, or ``nc``: Euclidean over continuous
    columns plus a fixed ``m**2`` for every nominal column whose labels differ.
    """

    kind: str = "euclidean"
    nominal_mask: tuple[bool, ...] | None = None
    m: float | None = None

    def __post_init__(self):
        if self.kind not in ("euclidean", "nc"):
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.kind == "nc":
            if self.nominal_mask is None:
                raise ValueError("nc metric needs the column kinds")
            object.__setattr__(self, "nominal_mask", tuple(bool(b) for b in self.nominal_mask))
            if all(self.nominal_mask):
                raise SamplerError("SMOTE-NC requires at least one continuous feature")
            if self.m is None or not self.m > 0:
                raise SamplerError(f"nc metric needs a positive penalty m, got {self.m}")

    @classmethod
    def nc(cls, nominal_mask, m: float) -> "DistanceMetric":
        return cls("nc", tuple(nominal_mask), float(m))


EUCLIDEAN = DistanceMetric()


def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def nc_distance(a, b, metric: DistanceMetric) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if metric.kind != "nc":
        raise ValueError("nc_distance needs an nc metric")
    if a.shape != b.shape or a.shape != (len(metric.nominal_mask),):
        raise ValueError("rows do not match the metric's schema")
    nom = np.asarray(metric.nominal_mask)
    cont = np.sum((a[~nom] - b[~nom]) ** 2)
    mismatches = np.count_nonzero(a[nom] != b[nom])
    return float(np.sqrt(cont + metric.m ** 2 * mismatches))


def distances_from(points: np.ndarray, i: int, metric: DistanceMetric = EUCLIDEAN) -> np.ndarray:
    """Distances from ``points[i]`` to every row of ``points``."""
    diff = points - points[i]
    if metric.kind == "euclidean":
        return np.sqrt(np.sum(diff ** 2, axis=1))
    nom = np.asarray(metric.nominal_mask)
    cont = np.sum(diff[:, ~nom] ** 2, axis=1)
    mismatches = np.count_nonzero(diff[:, nom] != 0, axis=1)
    return np.sqrt(cont + metric.m ** 2 * mismatches)


def pairwise_distances(points: np.ndarray, metric: DistanceMetric = EUCLIDEAN) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    return np.vstack([distances_from(points, i, metric) for i in range(len(points))]) if len(points) else \
        np.zeros((0, 0))


def _check_k(k: int, n: int) -> None:
    if k < 1 or k > n - 1:
        raise SamplerError(
            f"k={k} is out of range for {n} minority samples (need 1 <= k <= {n - 1}); "
            "reduce k or supply more minority samples"
        )


def knn_minority(points, query_index: int, k: int, metric: DistanceMetric = EUCLIDEAN) -> list[int]:
    """Indices of the ``k`` nearest other points, nearest first, ties by index."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    _check_k(k, len(points))
    d = distances_from(points, query_index, metric)
    order = np.argsort(d, kind="stable")
    return [int(i) for i in order[order != query_index][:k]]


def neighbor_table(points, k: int, metric: DistanceMetric = EUCLIDEAN,
                   return_distances: bool = False):
    """k-NN lists for every point at once; row ``i`` equals ``knn_minority(points, i, k)``."""
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    _check_k(k, n)
    table = np.empty((n, k), dtype=np.intp)
    dist = np.empty((n, n)) if return_distances else None
    for i in range(n):
        d = distances_from(points, i, metric)
        order = np.argsort(d, kind="stable")
        table[i] = order[order != i][:k]
        if return_distances:
            dist[i] = d
    return (table, dist) if return_distances else table
