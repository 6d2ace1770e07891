"""Repeated stratified cross-validation with in-fold resampling.

Every (repeat, fold) cell resamples only its training rows, trains a forest
on the result and scores the held-out rows. Cells draw from substreams keyed
by ``(seed, repeat, fold)``, so results do not depend on scheduling or on
``jobs``. Methods in one comparison share the same fold assignment, which
makes per-cell metrics paired samples for the t-test.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np
from scipy.special import betainc

from .encoding import EncodingModel
from .errors import SamplerError
from .forest import ForestParams, feature_importances, predict_proba, train
from .metrics import MetricReport, evaluate_scores, pr_curve_ap, roc_curve_auc
from .rng import derive_seed, substream
from .samplers import SamplerConfig, resample
from .tabular import Dataset

SCHEMA_VERSION = "1.0"
ALPHA = 0.05
METRIC_NAMES = ("precision", "recall", "f_beta", "roc_auc", "pr_auc")
TESTED_METRICS = ("precision", "recall", "f_beta")


@dataclass(frozen=True)
class CVConfig:
    folds: int = 5
    repeats: int = 10
    seed: int = 0
    threshold: float = 0.5
    beta: float = 1.0
    jobs: int = 1

    def __post_init__(self):
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")

    def to_dict(self) -> dict:
        return {"folds": self.folds, "repeats": self.repeats, "seed": self.seed,
                "threshold": self.threshold, "beta": self.beta}


@dataclass(frozen=True, eq=False)
class FoldResult:
    repeat: int
    fold: int
    report: MetricReport
    test_indices: np.ndarray
    scores: np.ndarray
    labels: np.ndarray
    train_indices: np.ndarray
    # provenance mapped back to row indices of the full dataset
    synthetic_seeds: np.ndarray
    synthetic_neighbors: np.ndarray
    importances: np.ndarray
    encoding: EncodingModel | None = None


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float
    mean_diff: float

    def to_dict(self) -> dict:
        return {"t": self.t, "df": self.df, "p_value": self.p, "mean_diff": self.mean_diff}


# --------------------------------------------------------------------- folds


def stratified_folds(labels, folds: int = 5, repeats: int = 1, seed: int = 0) -> np.ndarray:
    """Fold id of every row, one row of the result per repeat.

    Within each class the rows are shuffled and dealt to folds in turn, so a
    class's count in any fold is within one of its exact share. The majority
    deal starts where the minority deal stopped, which also evens out fold
    sizes.
    """
    labels = np.asarray(labels).astype(bool)
    pos = np.flatnonzero(labels)
    neg = np.flatnonzero(~labels)
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("stratified folds need both classes present")
    if min(len(pos), len(neg)) < folds:
        raise ValueError(
            f"each fold needs a minority row: {min(len(pos), len(neg))} rows in the smaller class for {folds} folds"
        )
    out = np.empty((repeats, len(labels)), dtype=np.intp)
    for r in range(repeats):
        rng = substream(seed, 0, r)
        p = rng.permutation(pos)
        n = rng.permutation(neg)
        out[r, p] = np.arange(len(p)) % folds
        out[r, n] = (np.arange(len(n)) + len(p)) % folds
    return out


# ------------------------------------------------------------------ pipeline


def _run_cell(dataset: Dataset, sampler: SamplerConfig, forest: ForestParams, cv: CVConfig,
              repeat: int, fold: int, assignment: np.ndarray) -> FoldResult:
    test = np.flatnonzero(assignment == fold)
    train_idx = np.flatnonzero(assignment != fold)
    train_set = dataset.subset(train_idx)
    cell_sampler = replace(sampler, seed=derive_seed(cv.seed, 1, repeat, fold))
    try:
        res = resample(train_set, cell_sampler)
    except SamplerError as exc:
        raise SamplerError(f"{sampler.label} (repeat {repeat}, fold {fold}): {exc}") from None
    cell_forest = replace(forest, seed=derive_seed(cv.seed, 2, repeat, fold))
    model = train(res.dataset.values, res.dataset.target, cell_forest)
    scores = predict_proba(model, dataset.values[test])
    labels = dataset.target[test]
    report = evaluate_scores(scores, labels, cv.threshold, cv.beta)
    return FoldResult(
        repeat, fold, report, test, scores, labels, train_idx,
        train_idx[res.provenance.seed_index], train_idx[res.provenance.neighbor_index],
        feature_importances(model), res.encoding,
    )


def _cell_job(args):
    return _run_cell(*args)


def run_pipeline(dataset: Dataset, sampler: SamplerConfig, forest: ForestParams, cv: CVConfig,
                 assignments: np.ndarray | None = None) -> list[FoldResult]:
    """Run every (repeat, fold) cell; results come back in (repeat, fold) order.

    ``sampler.seed`` and ``forest.seed`` are replaced by per-cell seeds
    derived from ``cv.seed``.
    """
    if assignments is None:
        assignments = stratified_folds(dataset.target, cv.folds, cv.repeats, cv.seed)
    jobs = [(dataset, sampler, forest, cv, r, f, assignments[r])
            for r in range(cv.repeats) for f in range(cv.folds)]
    if cv.jobs > 1:
        with ProcessPoolExecutor(cv.jobs) as pool:
            return list(pool.map(_cell_job, jobs))
    return [_cell_job(j) for j in jobs]


# -------------------------------------------------------------------- t-test


def student_t_sf2(t: float, df: int) -> float:
    """Two-tailed tail mass P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def paired_two_tailed_t_test(a, b) -> TTestResult:
    """Paired t-test on ``a - b``. Identical samples give t=0, p=1."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must be 1-D and of equal length")
    n = len(a)
    if n < 2:
        raise ValueError("need at least 2 pairs")
    d = a - b
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(0.0, n - 1, 1.0, 0.0)
        return TTestResult(math.copysign(math.inf, mean), n - 1, 0.0, mean)
    t = mean / (sd / math.sqrt(n))
    return TTestResult(t, n - 1, student_t_sf2(t, n - 1), mean)


# ---------------------------------------------------------------- comparison


def _mean_std(xs) -> dict:
    xs = np.asarray(xs, dtype=np.float64)
    return {"mean": float(xs.mean()), "std": float(xs.std(ddof=1)) if len(xs) > 1 else 0.0}


@dataclass(eq=False)
class MethodResult:
    name: str
    config: SamplerConfig
    folds: list[FoldResult] | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def metric(self, name: str) -> np.ndarray:
        return np.array([getattr(f.report, name) for f in self.folds])

    def pooled(self):
        scores = np.concatenate([f.scores for f in self.folds])
        labels = np.concatenate([f.labels for f in self.folds])
        return scores, labels

    def curves(self):
        scores, labels = self.pooled()
        roc, roc_auc = roc_curve_auc(scores, labels)
        pr, ap, baseline = pr_curve_ap(scores, labels)
        return roc, roc_auc, pr, ap, baseline


@dataclass(eq=False)
class ComparisonReport:
    dataset_info: dict
    cv: CVConfig
    forest: ForestParams
    methods: list[MethodResult]
    tests: list[dict] = field(default_factory=list)
    feature_names: list[str] = field(default_factory=list)

    def method(self, name: str) -> MethodResult:
        for m in self.methods:
            if m.name == name:
                return m
        raise KeyError(name)

    def to_dict(self) -> dict:
        methods = {}
        for m in self.methods:
            if not m.ok:
                methods[m.name] = {"status": "NA", "error": m.error}
                continue
            _, roc_auc, _, ap, baseline = m.curves()
            imp = np.mean([f.importances for f in m.folds], axis=0)
            methods[m.name] = {
                "status": "ok",
                "config": {"k": m.config.k, "ratio": m.config.ratio, "percent": m.config.percent},
                "summary": {name: _mean_std(m.metric(name)) for name in METRIC_NAMES},
                "roc_auc_pooled": roc_auc,
                "pr_auc_pooled": ap,
                "pr_baseline": baseline,
                "roc_auc_fold_mean": float(m.metric("roc_auc").mean()),
                "pr_auc_fold_mean": float(m.metric("pr_auc").mean()),
                "feature_importances": {n: float(v) for n, v in zip(self.feature_names, imp)},
                "folds": [
                    {"repeat": f.repeat, "fold": f.fold, **f.report.to_dict()} for f in m.folds
                ],
            }
        return {
            "schema_version": SCHEMA_VERSION,
            "dataset": self.dataset_info,
            "cv": self.cv.to_dict(),
            "forest": {**self.forest.to_dict(), "source": "library defaults unless overridden"},
            "alpha": ALPHA,
            "methods": methods,
            "tests": self.tests,
        }


def compare_methods(dataset: Dataset, methods: list[SamplerConfig], forest: ForestParams = ForestParams(),
                    cv: CVConfig = CVConfig()) -> ComparisonReport:
    """Evaluate each sampler on one shared set of folds and t-test every pair.

    A method whose preconditions fail on this dataset is kept in the report
    with status "NA" and the error message.
    """
    if not methods:
        raise ValueError("need at least one method")
    assignments = stratified_folds(dataset.target, cv.folds, cv.repeats, cv.seed)
    results = []
    for cfg in methods:
        try:
            folds = run_pipeline(dataset, cfg, forest, cv, assignments)
            results.append(MethodResult(cfg.label, cfg, folds))
        except SamplerError as exc:
            results.append(MethodResult(cfg.label, cfg, error=str(exc)))

    tests = []
    ok = [m for m in results if m.ok]
    for a, b in combinations(ok, 2):
        for name in TESTED_METRICS:
            res = paired_two_tailed_t_test(a.metric(name), b.metric(name))
            significant = res.p < ALPHA
            favours = None
            if significant:
                favours = a.name if res.mean_diff > 0 else b.name
            tests.append({
                "a": a.name, "b": b.name, "metric": name, **res.to_dict(),
                "significant": significant, "favours": favours,
            })
    info = {"s": dataset.s, "t": dataset.t, "c": dataset.c, "n_nominal": dataset.n_nominal,
            "minority_label": dataset.minority_label}
    return ComparisonReport(info, cv, forest, results, tests, dataset.column_names)
