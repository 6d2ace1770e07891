"""Threshold metrics and ranking curves for a binary minority-vs-rest task."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricReport:
    precision: float
    recall: float
    f_beta: float
    beta: float
    roc_auc: float
    pr_auc: float
    threshold: float

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f_beta": self.f_beta,
            "beta": self.beta,
            "roc_auc": self.roc_auc,
            "pr_auc": self.pr_auc,
            "threshold": self.threshold,
        }


def _check(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be 1-D and of equal length")
    return scores, labels


def f_beta(precision: float, recall: float, beta: float = 1.0) -> float:
    if beta <= 0:
        raise ValueError("beta must be > 0")
    if precision == 0 and recall == 0:
        return 0.0
    b2 = beta * beta
    return (1 + b2) * precision * recall / (b2 * precision + recall)


def precision_recall_fbeta(scores, labels, threshold: float = 0.5, beta: float = 1.0):
    """(precision, recall, F-beta) with positives predicted at ``score >= threshold``.

    0/0 precision or recall is reported as 0.
    """
    scores, labels = _check(scores, labels)
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    pred = scores >= threshold
    tp = int(np.sum(pred & labels))
    fp = int(np.sum(pred & ~labels))
    fn = int(np.sum(~pred & labels))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return precision, recall, f_beta(precision, recall, beta)


def _ranked_counts(scores, labels):
    """Cumulative TP/FP after each distinct score, highest score first."""
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    l = labels[order]
    last_of_group = np.r_[s[1:] != s[:-1], True]
    tp = np.cumsum(l)[last_of_group]
    fp = np.cumsum(~l)[last_of_group]
    return s[last_of_group], tp, fp


def roc_curve_auc(scores, labels):
    """ROC points ``(thresholds, fpr, tpr)`` starting at (0, 0) and the trapezoidal AUC.

    The first threshold is ``inf`` (nothing predicted positive).
    """
    scores, labels = _check(scores, labels)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs at least one positive and one negative")
    thr, tp, fp = _ranked_counts(scores, labels)
    tpr = np.r_[0.0, tp / n_pos]
    fpr = np.r_[0.0, fp / n_neg]
    thresholds = np.r_[np.inf, thr]
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return (thresholds, fpr, tpr), auc


def pr_curve_ap(scores, labels):
    """PR points ``(thresholds, recall, precision)`` and step-rule average precision.

    AP = sum over distinct thresholds of (R_i - R_{i-1}) * P_i. Also returns
    the no-skill baseline, the positive rate.
    """
    scores, labels = _check(scores, labels)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise ValueError("precision-recall curve needs at least one positive")
    thr, tp, fp = _ranked_counts(scores, labels)
    precision = tp / (tp + fp)
    recall = tp / n_pos
    ap = float(np.sum(np.diff(np.r_[0.0, recall]) * precision))
    baseline = n_pos / len(labels)
    return (thr, recall, precision), ap, baseline


def evaluate_scores(scores, labels, threshold: float = 0.5, beta: float = 1.0) -> MetricReport:
    p, r, f = precision_recall_fbeta(scores, labels, threshold, beta)
    _, roc = roc_curve_auc(scores, labels)
    _, ap, _ = pr_curve_ap(scores, labels)
    return MetricReport(p, r, f, beta, roc, ap, threshold)


def curve_csv(thresholds, x, y, x_name: str, y_name: str) -> str:
    lines = [f"threshold,{x_name},{y_name}"]
    for t, a, b in zip(thresholds, x, y):
        lines.append(f"{float(t)!r},{float(a)!r},{float(b)!r}")
    return "\n".join(lines) + "\n"
