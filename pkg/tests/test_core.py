import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lifnet.core import (
    LayerState,
    LifParams,
    NetworkConfig,
    SpikeTrain,
    Weights,
    decay_factor,
    forward,
    init_weights,
    lif_step,
    predict,
)
from lifnet.errors import ConfigError, DomainError


class TestDecayFactor:
    def test_tau_two(self):
        assert decay_factor(2.0) == pytest.approx(0.606530659712633, abs=1e-15)
        assert round(decay_factor(2.0), 5) == 0.60653

    def test_lower_end_of_range(self):
        assert decay_factor(1.1) == pytest.approx(0.402890321529133, abs=1e-15)

    def test_large_tau_approaches_one(self):
        assert decay_factor(1e12) == pytest.approx(1.0, abs=1e-11)
        assert decay_factor(math.inf) == 1.0

    @pytest.mark.parametrize("tau", [1.0, 0.5, 0.0, -3.0])
    def test_domain(self, tau):
        with pytest.raises(DomainError):
            decay_factor(tau)


class TestLifParams:
    def test_rejects_threshold_below_reset(self):
        with pytest.raises(ConfigError):
            LifParams(v_th=0.0, v_reset=0.0)

    def test_rejects_negative_bias(self):
        with pytest.raises(ConfigError):
            LifParams(bias=-0.01)

    def test_rejects_small_tau(self):
        with pytest.raises(ConfigError):
            LifParams(tau_m=1.0)


class TestLifStep:
    def test_rest_is_fixed_point(self):
        state, spikes = lif_step(LayerState.zeros(3), np.zeros(3), LifParams())
        assert np.all(state.v == 0) and np.all(spikes == 0)

    def test_threshold_start_decays_below(self):
        p = LifParams(tau_m=2.0, v_th=0.5)
        state, spikes = lif_step(LayerState(np.array([0.5])), np.zeros(1), p)
        assert state.v[0] == pytest.approx(0.303265329856317, abs=1e-15)
        assert spikes[0] == 0

    def test_crossing_spikes_and_resets(self):
        p = LifParams(tau_m=2.0, v_th=0.5, v_reset=0.0)
        state, spikes = lif_step(LayerState.zeros(1), np.array([0.5 + 1e-9]), p)
        assert spikes[0] == 1
        assert state.v[0] == p.v_reset

    def test_threshold_is_inclusive(self):
        p = LifParams(tau_m=2.0, v_th=0.5)
        _, spikes = lif_step(LayerState.zeros(1), np.array([0.5]), p)
        assert spikes[0] == 1


def test_zero_input_decay_matches_closed_form():
    p = LifParams(tau_m=2.7, v_th=1e9)
    state = LayerState(np.array([0.8, -0.3]))
    v0 = state.v.copy()
    for t in range(1, 201):
        state, spikes = lif_step(state, np.zeros(2), p)
        assert not spikes.any()
        np.testing.assert_allclose(state.v, v0 * np.exp(-t / 2.7), rtol=1e-12 * t)


def _tiny_config(**kw):
    lif = LifParams(tau_m=2.0, v_th=0.2)
    base = dict(d_in=1, h1=1, h2=1, lif=(lif, lif), t_steps=5, readout="spike-count", lif_out=lif)
    base.update(kw)
    return NetworkConfig(**base)


def _hand_step(w, decay, v_th, drive):
    """Scalar LIF loop written out independently of the library."""
    v, out = 0.0, []
    for x in drive:
        v = decay * v + w * x
        fired = v >= v_th
        out.append(int(fired))
        if fired:
            v = 0.0
    return out


class TestForward:
    def test_zero_input_gives_zero_output(self):
        cfg = NetworkConfig(d_in=4, h1=6, h2=5, t_steps=7)
        w = init_weights(cfg, np.random.default_rng(0))
        rec = forward(cfg, w, np.zeros((7, 4), dtype=np.uint8))
        assert all(s.data.sum() == 0 for s in rec.spikes)
        np.testing.assert_array_equal(rec.logits, [0.0, 0.0])

    def test_hand_stepped_chain(self):
        cfg = _tiny_config()
        w = Weights(np.array([[0.1]]), np.array([[1.0]]), np.array([[1.0, 0.5]]))
        rec = forward(cfg, w, np.ones((5, 1), dtype=np.uint8))
        decay = math.exp(-0.5)
        h1 = _hand_step(0.1, decay, 0.2, [1] * 5)
        assert h1 == [0, 0, 0, 1, 0]
        h2 = _hand_step(1.0, decay, 0.2, h1)
        out0 = _hand_step(1.0, decay, 0.2, h2)
        out1 = _hand_step(0.5, decay, 0.2, h2)
        assert rec.spikes[0].data[:, 0].tolist() == h1
        assert rec.spikes[1].data[:, 0].tolist() == h2
        assert rec.spikes[2].data.T.tolist() == [out0, out1]
        assert sum(h1) >= 1
        np.testing.assert_array_equal(rec.logits, [sum(out0), sum(out1)])

    def test_membrane_readout_is_final_potential(self):
        cfg = _tiny_config(readout="membrane-logit")
        w = Weights(np.array([[1.0]]), np.array([[1.0]]), np.array([[0.3, -0.3]]))
        rec = forward(cfg, w, np.ones((5, 1), dtype=np.uint8))
        decay = math.exp(-0.5)
        v = 0.0
        for s in rec.spikes[1].data[:, 0]:
            v = decay * v + 0.3 * s
        assert rec.logits[0] == pytest.approx(v, abs=1e-15)
        assert rec.logits[1] == pytest.approx(-v, abs=1e-15)
        np.testing.assert_array_equal(rec.traces[2][-1], rec.logits)

    def test_channel_permutation_symmetry(self, rng):
        cfg = NetworkConfig(d_in=6, h1=8, h2=5, t_steps=9)
        w = init_weights(cfg, rng)
        x = (rng.random((9, 6)) < 0.5).astype(np.uint8)
        perm = rng.permutation(6)
        a = forward(cfg, w, x)
        b = forward(cfg, Weights(w.w_in[perm], w.w_hid, w.w_out), x[:, perm])
        for sa, sb in zip(a.spikes, b.spikes):
            np.testing.assert_array_equal(sa.data, sb.data)
        for ta, tb in zip(a.traces, b.traces):
            np.testing.assert_allclose(ta, tb, rtol=0, atol=1e-12)

    def test_shape_mismatch(self, rng):
        cfg = NetworkConfig(d_in=3, h1=4, h2=4, t_steps=5)
        w = init_weights(cfg, rng)
        with pytest.raises(ConfigError):
            forward(cfg, w, np.zeros((5, 2), dtype=np.uint8))
        with pytest.raises(ConfigError):
            forward(cfg, Weights(w.w_in, w.w_hid[:3], w.w_out), np.zeros((5, 3), dtype=np.uint8))

    def test_record_shapes(self, rng):
        cfg = NetworkConfig(d_in=3, h1=7, h2=4, t_steps=6)
        rec = forward(cfg, init_weights(cfg, rng), (rng.random((6, 3)) < 0.5).astype(np.uint8))
        assert [s.data.shape for s in rec.spikes] == [(6, 7), (6, 4), (6, 2)]
        assert [t.shape for t in rec.traces] == [(6, 7), (6, 4), (6, 2)]

    def test_deterministic(self, rng):
        cfg = NetworkConfig(d_in=5, h1=9, h2=6, t_steps=8)
        w = init_weights(cfg, rng)
        x = (rng.random((8, 5)) < 0.4).astype(np.uint8)
        assert forward(cfg, w, x) == forward(cfg, w, x)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t_steps=st.integers(1, 30),
       readout=st.sampled_from(["spike-count", "membrane-logit"]))
def test_spikes_binary_and_reset_visible_in_trace(seed, t_steps, readout):
    rng = np.random.default_rng(seed)
    lif = LifParams(tau_m=float(rng.uniform(1.1, 3.0)), v_th=float(rng.uniform(0.2, 0.8)),
                    bias=float(rng.uniform(0, 0.05)))
    cfg = NetworkConfig(d_in=4, h1=6, h2=5, lif=(lif, lif), t_steps=t_steps, readout=readout)
    w = init_weights(cfg, rng)
    w = Weights(*(2 * m for m in w))
    x = (rng.random((t_steps, 4)) < 0.6).astype(np.uint8)
    rec = forward(cfg, w, x)
    for s in rec.spikes:
        assert set(np.unique(s.data)) <= {0, 1}
    # membrane after a spike restarts from v_reset: trace = decay*v_reset + r_m*I + bias
    pre = [x, rec.spikes[0].data]
    for layer, (trace, spikes, w_l) in enumerate(zip(rec.traces[:2], rec.spikes[:2], w[:2])):
        current = pre[layer].astype(float) @ w_l
        for t in range(1, t_steps):
            fired = spikes.data[t - 1] == 1
            expected = lif.decay * lif.v_reset + lif.r_m * current[t] + lif.bias
            np.testing.assert_allclose(trace[t][fired], expected[fired], atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(base=st.lists(st.integers(0, 1), min_size=8, max_size=8),
       extra=st.lists(st.integers(0, 1), min_size=8, max_size=8),
       w=st.floats(0.05, 1.5))
def test_monotone_drive_single_pathway(base, extra, w):
    cfg = _tiny_config(t_steps=8)
    weights = Weights(np.array([[w]]), np.array([[w]]), np.array([[w, w]]))
    low = np.array(base, dtype=np.uint8)[:, None]
    high = np.maximum(low, np.array(extra, dtype=np.uint8)[:, None])
    out_low = forward(cfg, weights, low).logits[0]
    out_high = forward(cfg, weights, high).logits[0]
    assert out_high >= out_low


class TestPredict:
    @pytest.mark.parametrize("logits,label", [((3, 1), 0), ((1, 3), 1), ((2, 2), 0)])
    def test_argmax_tie_to_zero(self, logits, label):
        assert predict(np.array(logits, dtype=float)) == label


class TestSpikeTrain:
    def test_rejects_non_binary(self):
        with pytest.raises(ConfigError):
            SpikeTrain(np.array([[0, 2]]))

    @pytest.mark.parametrize("t", [0, 1025])
    def test_rejects_length(self, t):
        with pytest.raises(ConfigError):
            SpikeTrain(np.zeros((t, 2)))

    def test_spike_times(self):
        s = SpikeTrain(np.array([[1, 0], [0, 0], [1, 1]]))
        assert s.spike_times() == [[0, 2], [2]]
        assert s.counts().tolist() == [2, 1]
