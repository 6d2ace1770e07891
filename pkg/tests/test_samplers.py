import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _contracts import check_result
from _factories import car_like, random_dataset
from smote_enc.errors import SamplerError
from smote_enc.samplers import (
    SamplerConfig,
    majority_vote,
    one_hot_expand,
    one_hot_smote,
    resample,
    smote,
    smote_core,
    smote_enc,
    smote_nc,
    synthesis_plan,
)
from smote_enc.tabular import ColumnSchema, Dataset


def continuous_only(seed, n=60, n_min=6, c=3):
    return random_dataset(seed, n=n, n_min=n_min, c=c, label_counts=())


def test_core_two_points_collinear():
    rows, seeds, nbrs, lam = smote_core([[0.0, 0.0], [1.0, 1.0]], 1, 1, seed=4)
    assert rows.shape == (1, 2)
    assert rows[0, 0] == rows[0, 1] and 0.0 <= rows[0, 0] <= 1.0
    assert rows[0, 0] == pytest.approx(lam[0] if seeds[0] == 0 else 1 - lam[0])


def test_core_zero_synthetics():
    rows, seeds, nbrs, lam = smote_core(np.eye(3), 1, 0)
    assert rows.shape == (0, 3) and len(seeds) == len(lam) == 0


def test_core_provenance_replay():
    pts = np.random.default_rng(5).normal(size=(10, 3))
    rows, seeds, nbrs, lam = smote_core(pts, 3, 100, seed=9)
    for row, s, n, l in zip(rows, seeds, nbrs, lam):
        d = pts[n] - pts[s]
        # recover lambda independently by projecting onto the segment
        l_hat = float(np.dot(row - pts[s], d) / np.dot(d, d))
        assert l_hat == pytest.approx(l, abs=1e-9)
        assert np.allclose(row, pts[s] + l_hat * d, atol=1e-9)


def test_core_preconditions():
    with pytest.raises(SamplerError, match="at least 2"):
        smote_core([[0.0]], 1, 1)
    with pytest.raises(SamplerError, match="reduce k"):
        smote_core([[0.0], [1.0]], 2, 1)


def test_round_robin_seed_counts():
    seeds, slots, lam = synthesis_plan(7, 3, 23, seed=0)
    counts = np.bincount(seeds, minlength=7)
    assert counts.max() - counts.min() <= 1 and counts.sum() == 23
    assert np.all((slots >= 0) & (slots < 3))


def test_fewer_synthetics_than_seeds_uses_distinct_rows():
    seeds, _, _ = synthesis_plan(10, 3, 4, seed=1)
    assert len(set(seeds.tolist())) == 4


def test_plan_depends_only_on_seed_row_and_ordinal():
    # the first q synthetics of a row do not change when more rows are requested
    s1, k1, l1 = synthesis_plan(5, 2, 10, seed=3)
    s2, k2, l2 = synthesis_plan(5, 2, 15, seed=3)
    for r in range(5):
        assert np.array_equal(l1[s1 == r], l2[s2 == r][:2])
        assert np.array_equal(k1[s1 == r], k2[s2 == r][:2])


def test_majority_vote_tie_goes_to_nearest():
    assert majority_vote([2, 1, 1, 2, 3]) == 2
    assert majority_vote([1, 2, 2]) == 2
    assert majority_vote([4]) == 4


def test_smote_balances_continuous_data():
    ds = random_dataset(0, n=100, n_min=10, c=2, label_counts=())
    res = smote(ds, SamplerConfig("smote", k=5))
    assert res.dataset.t == res.dataset.n_majority == 90


def test_smote_rejects_nominal(table1_ds):
    with pytest.raises(SamplerError, match="one-hot-smote or smote-enc"):
        smote(table1_ds, SamplerConfig("smote", k=1))


def test_percent_mode():
    ds = random_dataset(1, n=50, n_min=10, c=2, label_counts=())
    res = smote(ds, SamplerConfig("smote", k=3, percent=200))
    assert len(res.provenance) == 20
    assert len(smote(ds, SamplerConfig("smote", k=3, percent=55)).provenance) == 5


def test_ratio_cannot_shrink_minority():
    ds = random_dataset(1, n=50, n_min=10, c=2, label_counts=())
    with pytest.raises(SamplerError, match="cannot reduce"):
        smote(ds, SamplerConfig("smote", k=3, ratio=0.1))


def test_smote_nc_rejects_all_nominal(car_ds):
    with pytest.raises(SamplerError, match="SMOTE-NC requires at least one continuous feature"):
        smote_nc(car_ds, SamplerConfig("smote_nc"))


def test_smote_enc_balances_all_nominal(car_ds):
    cfg = SamplerConfig("smote_enc", seed=2)
    res = smote_enc(car_ds, cfg, trace=True)
    assert res.dataset.t == res.dataset.n_majority
    check_result(car_ds, cfg, res)


def test_smote_nc_table1_vote_is_the_neighbour_label(table1_ds):
    cfg = SamplerConfig("smote_nc", k=1, seed=0)
    res = smote_nc(table1_ds, cfg)
    assert len(res.provenance) == 1
    seed_row = int(res.provenance.seed_index[0])
    neighbour = 1 - seed_row  # only two minority rows: i1 (a) and i2 (b)
    assert res.dataset.values[5, 3] == table1_ds.values[neighbour, 3]
    assert res.extra["m"] == pytest.approx(31.82, abs=0.01)


def test_smote_enc_table1_uses_encoded_distance(table1_ds):
    res = smote_enc(table1_ds, SamplerConfig("smote_enc", k=1), trace=True)
    assert res.trace["minority_indices"] == [0, 1]
    assert res.trace["distances"][0][1] == pytest.approx(114.72, abs=0.02)
    assert res.trace["neighbors"] == [[1], [0]]
    assert res.encoding.per_feature[3][0].encoded == pytest.approx(7.95, abs=0.01)


@pytest.mark.parametrize("seed", range(5))
def test_nominal_free_methods_coincide(seed):
    ds = continuous_only(seed)
    cfg = dict(k=4, seed=seed)
    a = smote(ds, SamplerConfig("smote", **cfg))
    b = smote_enc(ds, SamplerConfig("smote_enc", **cfg))
    c = smote_nc(ds, SamplerConfig("smote_nc", **cfg))
    assert np.array_equal(a.dataset.values, b.dataset.values)
    assert np.array_equal(a.dataset.values, c.dataset.values)
    assert np.array_equal(a.provenance.lam, b.provenance.lam)


def test_one_hot_expansion_width():
    ds = random_dataset(3, n=40, n_min=8, c=1, label_counts=(3,))
    expanded, spans = one_hot_expand(ds)
    assert expanded.shape == (40, 4)
    assert np.array_equal(expanded[:, 1:].argmax(axis=1), ds.codes(1))


def test_one_hot_argmax_mapping():
    # indicators (0.7, 0.3, 0.0) must map to the first label
    schema = (ColumnSchema("n", "nominal", ("a", "b", "c")),)
    ds = Dataset(schema, np.array([[0.0], [1.0], [2.0], [2.0]]), [True, True, False, False], "min", "maj")
    res = one_hot_smote(ds, SamplerConfig("one_hot_smote", k=1, percent=50, seed=0, raw_one_hot=True))
    raw = res.raw_matrix[-1]
    assert raw[2] == 0.0
    assert res.dataset.values[-1, 0] == int(np.argmax(raw))


def test_one_hot_forest_cover_shape():
    ds = random_dataset(4, n=300, n_min=30, c=10, label_counts=(40, 4))
    cfg = SamplerConfig("one_hot_smote", k=5, seed=1)
    res = one_hot_smote(ds, cfg)
    assert res.extra["expanded_columns"] - len(ds.schema) == 42
    assert res.dataset.t == res.dataset.n_majority
    check_result(ds, cfg, res)


def test_determinism(table1_ds):
    ds = random_dataset(9, n=80, n_min=12, c=2, label_counts=(4, 3))
    for method in ("smote_nc", "smote_enc", "one_hot_smote"):
        cfg = SamplerConfig(method, k=3, seed=11)
        a, b = resample(ds, cfg), resample(ds, cfg)
        assert np.array_equal(a.dataset.values, b.dataset.values)
        assert np.array_equal(a.provenance.lam, b.provenance.lam)


def test_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig("adasyn")
    with pytest.raises(ValueError):
        SamplerConfig(k=0)
    with pytest.raises(ValueError):
        SamplerConfig(percent=0)
    assert SamplerConfig("smote-enc").method == "smote_enc"


def test_inter_label_distances():
    """NC charges the same for any label swap; ENC's gap depends on the feature's label distribution."""
    rng = np.random.default_rng(0)
    n = 200
    target = np.zeros(n, dtype=bool)
    target[:40] = True
    f1 = np.where(target, rng.choice(3, n, p=[0.8, 0.1, 0.1]), rng.choice(3, n, p=[0.2, 0.4, 0.4]))
    f2 = rng.choice(3, n)
    schema = (ColumnSchema("x", "continuous"), ColumnSchema("f1", "nominal", ("a", "b", "c")),
              ColumnSchema("f2", "nominal", ("a", "b", "c")))
    ds = Dataset(schema, np.column_stack([rng.normal(size=n), f1, f2]), target, "min", "maj")

    from smote_enc.encoding import fit_encoding, median_minority_std
    from smote_enc.neighbors import DistanceMetric, nc_distance

    m = median_minority_std(ds)
    metric = DistanceMetric.nc([False, True, True], m)
    assert nc_distance([0, 0, 0], [0, 1, 0], metric) == nc_distance([0, 0, 0], [0, 0, 1], metric) == m

    model = fit_encoding(ds)
    gap1 = abs(model.per_feature[1][0].encoded - model.per_feature[1][1].encoded)
    gap2 = abs(model.per_feature[2][0].encoded - model.per_feature[2][1].encoded)
    assert gap1 != pytest.approx(gap2, rel=0.05)
    # f1's gap only depends on f1's counts: scrambling f2 leaves it unchanged
    ds2 = Dataset(schema, np.column_stack([ds.values[:, :2], rng.permutation(f2)]), target, "min", "maj")
    model2 = fit_encoding(ds2)
    assert abs(model2.per_feature[1][0].encoded - model2.per_feature[1][1].encoded) == gap1


method_st = st.sampled_from(["smote", "smote_nc", "smote_enc", "one_hot_smote"])


@settings(max_examples=120, deadline=None)
@given(seed=st.integers(0, 10**6), method=method_st, k=st.integers(1, 5), c=st.integers(0, 3),
       labels=st.lists(st.integers(1, 5), max_size=3), n_min=st.integers(6, 15),
       amount=st.one_of(st.floats(0.4, 1.5).map(lambda r: ("ratio", round(r, 3))),
                        st.integers(1, 400).map(lambda p: ("percent", p))))
def test_sampler_contracts(seed, method, k, c, labels, n_min, amount):
    if method == "smote":
        labels = []
    if method in ("smote", "smote_nc") and c == 0:
        c = 1
    if c == 0 and not labels:
        labels = [3]
    ds = random_dataset(seed, n=60, n_min=n_min, c=c, label_counts=tuple(labels))
    kind, value = amount
    if kind == "ratio":
        value = max(value, ds.t / ds.n_majority)
        cfg = SamplerConfig(method, k=k, ratio=value, seed=seed)
    else:
        cfg = SamplerConfig(method, k=k, percent=value, seed=seed)
    res = resample(ds, cfg, trace=True)
    check_result(ds, cfg, res)
