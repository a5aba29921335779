import numpy as np
import pytest

from lifnet.core import LifParams, NetworkConfig, SpikeTrain, forward, init_weights
from lifnet.data import Dataset, generate_synthetic, separable_spec
from lifnet.encoding import EncoderConfig, FeatureStats, encode, normalize_features
from lifnet.experiment import DEFAULTS, network_config
from lifnet.errors import ConfigError, InputError
from lifnet.learning.bal import BalParams, bal_select, n_queries, seed_indices, train_bal
from lifnet.learning.information import mutual_information
from lifnet.learning.sgl import SglParams, train_sgl


def _problem(n=80, d=8, seed=0):
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 2
    signs = np.where(np.arange(d) % 2, 1.0, -1.0)
    x = 0.5 + 0.25 * np.where(labels[:, None] == 1, 1.0, -1.0) * signs + 0.05 * rng.standard_normal((n, d))
    lif = LifParams(tau_m=3.0, v_th=0.3)
    return Dataset(np.clip(x, 0, 1), labels), NetworkConfig(d_in=d, h1=48, h2=24, lif=(lif, lif), t_steps=10)


def test_n_queries():
    assert n_queries(10, 0.25) == 3
    assert n_queries(8, 0.25) == 2
    assert n_queries(5, 1.0) == 5


def test_seed_indices():
    labels = np.array([0, 1, 1, 0, 0, 1, 0, 1, 0, 1])
    np.testing.assert_array_equal(seed_indices(labels, 0.1), [0, 1])
    np.testing.assert_array_equal(seed_indices(labels, 0.5), [0, 1, 2, 3, 4, 5])


def test_params_validation():
    for kw in ({"u_decay": 0.0}, {"u_decay": 1.5}, {"bins": 1}, {"query_fraction": 0.0}, {"u_init": -1.0}):
        with pytest.raises(ConfigError):
            BalParams(**kw)


class TestSelect:
    def setup_method(self):
        ds = generate_synthetic(separable_spec(n=60))
        self.cfg = network_config(16, DEFAULTS)
        self.w = init_weights(self.cfg, np.random.default_rng(0))
        self.u = (np.ones(self.w.w_hid.shape), np.ones(self.w.w_out.shape))
        x = normalize_features(ds.features, FeatureStats.fit(ds.features))
        self.pool = [encode(row, EncoderConfig(t_steps=10), i) for i, row in enumerate(x[:40])]

    def oracle_scores(self, params):
        out = []
        for train in self.pool:
            rec = forward(self.cfg, self.w, train)
            out.append(mutual_information(rec.spikes[1], rec.spikes[2], params.bins))
        return np.array(out)

    def test_full_fraction_returns_whole_pool(self):
        params = BalParams(query_fraction=1.0)
        assert sorted(bal_select(self.pool, self.cfg, self.w, self.u, params)) == list(range(40))

    def test_order_follows_information(self):
        params = BalParams(query_fraction=1.0)
        scores = self.oracle_scores(params)
        picked = bal_select(self.pool, self.cfg, self.w, self.u, params)
        np.testing.assert_array_equal(picked, np.argsort(-scores, kind="stable"))

    def test_two_sample_pool(self):
        params = BalParams(query_fraction=0.5)
        scores = self.oracle_scores(params)
        a, b = int(np.argmax(scores)), int(np.argmin(scores))
        assert scores[a] > scores[b]
        picked = bal_select([self.pool[b], self.pool[a]], self.cfg, self.w, self.u, params)
        np.testing.assert_array_equal(picked, [1])

    def test_silent_sample_ranks_last(self):
        params = BalParams(query_fraction=1.0)
        self.pool = [SpikeTrain(np.zeros((10, 16), dtype=np.uint8))] + self.pool
        scores = self.oracle_scores(params)
        assert scores[0] == 0.0 < scores.max()
        picked = bal_select(self.pool, self.cfg, self.w, self.u, params)
        # ties keep pool order, so the silent sample comes first among the zero scores
        zero = [k for k in picked if scores[k] == 0.0]
        assert zero[0] == 0
        assert all(scores[k] > 0 for k in picked[: len(picked) - len(zero)])
        assert 0 not in bal_select(self.pool, self.cfg, self.w, self.u, BalParams(query_fraction=0.1))

    def test_empty_pool(self):
        with pytest.raises(InputError):
            bal_select([], self.cfg, self.w, self.u, BalParams())


def test_zero_uncertainty_freezes_weights():
    ds, cfg = _problem()
    params = BalParams(u_init=0.0, query_fraction=0.5, epochs_per_round=3)
    model, report = train_bal(cfg, ds, params, 2, np.random.default_rng(4), val=ds)
    init = init_weights(cfg, np.random.default_rng(4))
    for a, b in zip(model.weights, init):
        np.testing.assert_array_equal(a, b)
    _, untrained = train_sgl(cfg, ds, SglParams(alpha=0.1), 0, np.random.default_rng(4), val=ds)
    assert report.final_val_accuracy == untrained.final_val_accuracy


def test_full_query_reduces_to_sgl():
    ds, cfg = _problem()
    enc = EncoderConfig(scheme="poisson", t_steps=10, seed=2)
    params = BalParams(u_init=1.0, u_decay=1.0, query_fraction=1.0, lr=0.02, alpha=0.1, epochs_per_round=4)
    bal, rb = train_bal(cfg, ds, params, 1, np.random.default_rng(8), enc, ds)
    sgl, rs = train_sgl(cfg, ds, params.sgl_params(), 4, np.random.default_rng(8), enc, ds)
    for a, b in zip(bal.weights, sgl.weights):
        np.testing.assert_array_equal(a, b)
    assert rb.accuracy_curve == rs.accuracy_curve
    assert rb.labels_queried == rb.pool_size == len(ds) - len(seed_indices(ds.labels, 0.1))


def test_uncertainty_decay_changes_trajectory():
    ds, cfg = _problem()
    base = dict(query_fraction=1.0, epochs_per_round=3)
    a, _ = train_bal(cfg, ds, BalParams(u_decay=1.0, **base), 1, np.random.default_rng(8))
    b, _ = train_bal(cfg, ds, BalParams(u_decay=0.5, **base), 1, np.random.default_rng(8))
    assert not np.array_equal(a.weights.w_out, b.weights.w_out)


def test_query_budget_and_accuracy():
    ds, cfg = _problem(n=120)
    params = BalParams(query_fraction=0.25, epochs_per_round=5)
    _, report = train_bal(cfg, ds, params, 2, np.random.default_rng(1), val=ds)
    assert report.labels_queried <= 0.5 * report.pool_size
    assert report.epochs_run == 10
    assert report.final_val_accuracy >= 0.85


def test_deterministic():
    ds, cfg = _problem()
    params = BalParams(query_fraction=0.3, epochs_per_round=2)
    a, ra = train_bal(cfg, ds, params, 2, np.random.default_rng(6))
    b, rb = train_bal(cfg, ds, params, 2, np.random.default_rng(6))
    for x, y in zip(a.weights, b.weights):
        np.testing.assert_array_equal(x, y)
    assert ra.to_dict() | {"wall_time_seconds": 0} == rb.to_dict() | {"wall_time_seconds": 0}
