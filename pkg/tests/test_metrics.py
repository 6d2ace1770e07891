import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smote_enc.metrics import (
    curve_csv,
    evaluate_scores,
    f_beta,
    pr_curve_ap,
    precision_recall_fbeta,
    roc_curve_auc,
)


def pairwise_auc(scores, labels):
    pos = [s for s, l in zip(scores, labels) if l]
    neg = [s for s, l in zip(scores, labels) if not l]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


def enumerated_ap(scores, labels):
    n_pos = sum(labels)
    ap, prev_recall = 0.0, 0.0
    for thr in sorted(set(scores), reverse=True):
        tp = sum(1 for s, l in zip(scores, labels) if s >= thr and l)
        fp = sum(1 for s, l in zip(scores, labels) if s >= thr and not l)
        recall = tp / n_pos
        ap += (recall - prev_recall) * tp / (tp + fp)
        prev_recall = recall
    return ap


def random_instance(rng, n=None, ties=False):
    n = n or int(rng.integers(2, 201))
    labels = rng.random(n) < rng.uniform(0.05, 0.6)
    labels[0], labels[-1] = True, False
    scores = rng.random(n)
    if ties:
        scores = np.round(scores, 1)
    return scores, labels


@pytest.mark.parametrize("p, r, beta, expected", [
    (0.8, 0.8, 1.0, 0.8),
    (0.5, 1.0, 2.0, 2.5 / 3),
    (0.0, 0.0, 1.0, 0.0),
    (1.0, 0.5, 1.0, 2 / 3),
])
def test_f_beta_values(p, r, beta, expected):
    assert f_beta(p, r, beta) == pytest.approx(expected, abs=1e-12)


def test_threshold_metrics():
    scores = [0.9, 0.8, 0.6, 0.4, 0.3, 0.1]
    labels = [1, 0, 1, 1, 0, 0]
    p, r, f = precision_recall_fbeta(scores, labels, 0.5)
    assert (p, r) == pytest.approx((2 / 3, 2 / 3)) and f == pytest.approx(2 / 3)
    # score equal to threshold counts as positive
    p, r, _ = precision_recall_fbeta([0.5, 0.2], [1, 0], 0.5)
    assert (p, r) == (1.0, 1.0)


def test_all_below_threshold_is_zero():
    assert precision_recall_fbeta([0.1, 0.2, 0.3], [1, 0, 1], 0.5) == (0.0, 0.0, 0.0)


def test_beta_limits():
    p, r = 0.9, 0.3
    assert f_beta(p, r, 0.01) == pytest.approx(p, rel=1e-3)
    assert f_beta(p, r, 100) == pytest.approx(r, rel=1e-3)
    assert f_beta(p, r, 0.5) > f_beta(p, r, 1.0) > f_beta(p, r, 2.0)


def test_roc_edge_cases():
    _, auc = roc_curve_auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
    assert auc == 1.0
    (thr, fpr, tpr), auc = roc_curve_auc([0.5] * 6, [1, 0, 0, 1, 0, 0])
    assert auc == 0.5 and len(fpr) == 2
    with pytest.raises(ValueError):
        roc_curve_auc([0.1, 0.2], [1, 1])


def test_pr_edge_cases():
    _, ap, base = pr_curve_ap([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
    assert ap == 1.0 and base == 0.5
    labels = np.array([True] + [False] * 10)
    _, ap, base = pr_curve_ap(np.full(11, 0.3), labels)
    assert ap == pytest.approx(1 / 11, abs=1e-12) and base == pytest.approx(1 / 11)
    assert round(ap, 2) == 0.09
    with pytest.raises(ValueError):
        pr_curve_ap([0.1, 0.2], [0, 0])


def test_against_oracles_100_instances():
    rng = np.random.default_rng(2024)
    for i in range(100):
        scores, labels = random_instance(rng, ties=i % 2 == 0)
        _, auc = roc_curve_auc(scores, labels)
        _, ap, _ = pr_curve_ap(scores, labels)
        assert abs(auc - pairwise_auc(scores.tolist(), labels.tolist())) <= 1e-9
        assert abs(ap - enumerated_ap(scores.tolist(), labels.tolist())) <= 1e-9


def test_sklearn_agrees():
    sk = pytest.importorskip("sklearn.metrics")
    rng = np.random.default_rng(1)
    for _ in range(20):
        scores, labels = random_instance(rng, ties=True)
        assert roc_curve_auc(scores, labels)[1] == pytest.approx(sk.roc_auc_score(labels, scores), abs=1e-12)
        assert pr_curve_ap(scores, labels)[1] == pytest.approx(sk.average_precision_score(labels, scores), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_rank_invariance_and_symmetry(seed):
    rng = np.random.default_rng(seed)
    scores, labels = random_instance(rng, n=60, ties=seed % 2 == 0)
    _, auc = roc_curve_auc(scores, labels)
    _, ap, _ = pr_curve_ap(scores, labels)
    transformed = np.exp(3 * scores) + 7
    assert roc_curve_auc(transformed, labels)[1] == pytest.approx(auc, abs=1e-12)
    assert pr_curve_ap(transformed, labels)[1] == pytest.approx(ap, abs=1e-12)
    # flip labels and negate scores: AUC unchanged
    assert roc_curve_auc(-scores, ~labels)[1] == pytest.approx(auc, abs=1e-12)
    # reversed scores: 1 - AUC (ties are symmetric too)
    assert roc_curve_auc(-scores, labels)[1] == pytest.approx(1 - auc, abs=1e-12)


def test_roc_curve_monotone():
    rng = np.random.default_rng(5)
    scores, labels = random_instance(rng, n=150, ties=True)
    (thr, fpr, tpr), _ = roc_curve_auc(scores, labels)
    assert np.all(np.diff(fpr) >= 0) and np.all(np.diff(tpr) >= 0)
    assert (fpr[0], tpr[0], fpr[-1], tpr[-1]) == (0, 0, 1, 1)
    assert np.all(np.diff(thr[1:]) < 0)


def test_evaluate_scores_and_csv():
    rep = evaluate_scores([0.9, 0.4, 0.6, 0.1], [1, 1, 0, 0], threshold=0.5, beta=2.0)
    for v in (rep.precision, rep.recall, rep.f_beta, rep.roc_auc, rep.pr_auc):
        assert 0.0 <= v <= 1.0
    assert rep.beta == 2.0 and rep.threshold == 0.5
    text = curve_csv([np.inf, 0.5], [0.0, 1.0], [0.0, 1.0], "fpr", "tpr")
    assert text.splitlines() == ["threshold,fpr,tpr", "inf,0.0,0.0", "0.5,1.0,1.0"]
