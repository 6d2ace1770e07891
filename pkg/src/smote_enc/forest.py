"""Random forest of Gini CART trees for binary targets.

Trees are grown on bootstrap samples with a fresh random subset of
``ceil(sqrt(p))`` candidate features at every node. Each tree draws from its
own substream ``(seed, tree_index)``, so training is schedule-independent.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .rng import substream

LEAF = -1


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int | None = None
    min_samples_leaf: int = 1
    max_features: int | None = None  # None -> ceil(sqrt(p))
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")

    def features_per_split(self, p: int) -> int:
        if self.max_features is not None:
            return max(1, min(p, self.max_features))
        return max(1, math.ceil(math.sqrt(p)))

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "max_features": self.max_features,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class Tree:
    feature: np.ndarray  # LEAF for leaves
    threshold: np.ndarray  # go left iff x <= threshold
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # minority fraction of training rows in the node
    n_samples: np.ndarray
    importances: np.ndarray  # unnormalised, per feature
    n_train: int = 0

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.intp)
        active = self.feature[node] != LEAF
        while np.any(active):
            idx = np.flatnonzero(active)
            cur = node[idx]
            go_left = X[idx, self.feature[cur]] <= self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active[idx] = self.feature[node[idx]] != LEAF
        return node

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_samples": self.n_samples.tolist(),
        }


@dataclass(frozen=True, eq=False)
class TrainedForest:
    trees: list[Tree]
    feature_importances: np.ndarray
    n_features: int
    params: ForestParams = field(default_factory=ForestParams)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "n_features": self.n_features,
            "feature_importances": self.feature_importances.tolist(),
            "trees": [t.to_dict() for t in self.trees],
        }


def _gini(pos: np.ndarray, n: np.ndarray) -> np.ndarray:
    p = pos / n
    return 2.0 * p * (1.0 - p)


def _best_split(x: np.ndarray, y: np.ndarray, min_leaf: int):
    """Best Gini split of one feature: (weighted child impurity, threshold) or None."""
    n = len(x)
    order = np.argsort(x, kind="stable")
    xs = x[order]
    cum_pos = np.cumsum(y[order])[:-1]
    n_left = np.arange(1, n)
    valid = xs[:-1] < xs[1:]
    if min_leaf > 1:
        valid &= (n_left >= min_leaf) & (n - n_left >= min_leaf)
    if not np.any(valid):
        return None
    total_pos = y.sum()
    nl = n_left[valid].astype(np.float64)
    nr = n - nl
    pl = cum_pos[valid]
    pr = total_pos - pl
    score = (nl * _gini(pl, nl) + nr * _gini(pr, nr)) / n
    best = int(np.argmin(score))
    i = np.flatnonzero(valid)[best]
    lo, hi = xs[i], xs[i + 1]
    thr = lo + (hi - lo) / 2.0
    if not lo < thr < hi:
        thr = lo  # adjacent doubles: no midpoint exists, x <= lo still separates
    return float(score[best]), float(thr)


def _grow_tree(X: np.ndarray, y: np.ndarray, params: ForestParams, rng: np.random.Generator,
               sample: np.ndarray) -> Tree:
    n_features = X.shape[1]
    n_try = params.features_per_split(n_features)
    feature, threshold, left, right, value, n_samples = [], [], [], [], [], []
    importances = np.zeros(n_features)
    n_root = len(sample)

    def new_node(idx):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[idx].mean()))
        n_samples.append(len(idx))
        return len(feature) - 1

    stack = [(new_node(sample), sample, 0)]
    while stack:
        node, idx, depth = stack.pop()
        yi = y[idx]
        n = len(idx)
        pos = float(yi.sum())
        impurity = 2.0 * (pos / n) * (1.0 - pos / n)
        if impurity == 0.0 or n < 2 * params.min_samples_leaf:
            continue
        if params.max_depth is not None and depth >= params.max_depth:
            continue
        candidates = rng.choice(n_features, size=n_try, replace=False)
        best = None
        for f in candidates:
            found = _best_split(X[idx, f], yi, params.min_samples_leaf)
            if found is not None and (best is None or found[0] < best[0]):
                best = (found[0], found[1], int(f))
        if best is None:
            continue
        score, thr, f = best
        go_left = X[idx, f] <= thr
        li, ri = idx[go_left], idx[~go_left]
        importances[f] += (n / n_root) * (impurity - score)
        feature[node] = f
        threshold[node] = thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))

    return Tree(
        np.array(feature, dtype=np.intp),
        np.array(threshold),
        np.array(left, dtype=np.intp),
        np.array(right, dtype=np.intp),
        np.array(value),
        np.array(n_samples, dtype=np.intp),
        importances,
        n_root,
    )


def _train_one(X, y, params: ForestParams, i: int) -> Tree:
    rng = substream(params.seed, i)
    n = len(X)
    sample = rng.integers(0, n, size=n) if params.bootstrap else np.arange(n)
    return _grow_tree(X, y, params, rng, sample)


def train(X, y, params: ForestParams = ForestParams(), *, jobs: int = 1) -> TrainedForest:
    """Fit a forest. ``y`` is truthy for the minority (positive) class."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y).astype(np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("X must be a non-empty 2-D matrix")
    if len(y) != len(X):
        raise ValueError("X and y lengths differ")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite values")
    if y.min() == y.max():
        raise ValueError("y contains a single class")
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            trees = list(pool.map(lambda i: _train_one(X, y, params, i), range(params.n_trees)))
    else:
        trees = [_train_one(X, y, params, i) for i in range(params.n_trees)]
    total = np.mean([t.importances for t in trees], axis=0)
    s = total.sum()
    importances = total / s if s > 0 else np.zeros_like(total)
    return TrainedForest(trees, importances, X.shape[1], params)


def predict_proba(forest: TrainedForest, X) -> np.ndarray:
    """Minority-class probability: mean over trees of the leaf's minority share."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != forest.n_features:
        raise ValueError(f"expected {forest.n_features} columns, got shape {X.shape}")
    acc = np.zeros(len(X))
    for tree in forest.trees:
        acc += tree.predict_proba(X)
    return acc / len(forest.trees)


def feature_importances(forest: TrainedForest) -> np.ndarray:
    return forest.feature_importances.copy()
