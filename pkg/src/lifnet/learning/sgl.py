"""Surrogate-gradient learning with a single feedback projection.

The output layer reads out final membrane potentials. Its error is gated by
a Gaussian surrogate of the spike nonlinearity, and the two upper weight
matrices are updated from the hidden spike counts::

    delta      = eta * (y - y_hat) * sg(v_out)
    dW_h2_out  = outer(h2, delta)
    dW_h1_h2   = outer(h1, W_h2_out @ delta)

The input projection stays at its random initialization. No
backpropagation through time is performed.
"""

import dataclasses
import time
from dataclasses import dataclass

import numpy as np

from lifnet.core import forward, init_weights
from lifnet.encoding import FeatureStats, encode, normalize_features
from lifnet.errors import ConfigError
from lifnet.learning.model import TrainedModel, TrainReport, check_training_set, match_encoder


@dataclass(frozen=True)
class SglParams:
    alpha: float = 1.0
    eta: float = 0.02
    # None: centre the surrogate on the output threshold.
    center: float = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError("alpha must be positive")
        if not self.eta >= 0:
            raise ConfigError("eta must be non-negative")

    def resolved_center(self, config):
        return config.output_lif.v_th if self.center is None else self.center


def surrogate_derivative(v, params, center=None):
    """``alpha * exp(-alpha * (v - center)**2)``."""
    c = params.center if center is None else center
    if c is None:
        raise ConfigError("surrogate center is unresolved; pass center explicitly")
    v = np.asarray(v, dtype=np.float64)
    return params.alpha * np.exp(-params.alpha * (v - c) ** 2)


def normalized_prediction(logits):
    """Shift logits to be non-negative and scale to sum 1; all-equal gives uniform."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.min()
    total = shifted.sum()
    if total == 0.0:
        return np.full(logits.shape, 1.0 / logits.size)
    return shifted / total


def one_hot(label, n=2):
    y = np.zeros(n)
    y[label] = 1.0
    return y


def sgl_error(y, y_hat, v_out, params, center=None):
    return params.eta * (np.asarray(y, float) - np.asarray(y_hat, float)) * surrogate_derivative(v_out, params, center)


def sgl_layer_updates(h1, h2, delta, w_h2_out):
    """Return ``(dW_h1_h2, dW_h2_out)`` for summed hidden activations ``h1``, ``h2``."""
    h1 = np.asarray(h1, dtype=np.float64)
    h2 = np.asarray(h2, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    if w_h2_out.shape != (h2.size, delta.size):
        raise ConfigError(f"w_h2_out has shape {w_h2_out.shape}, expected {(h2.size, delta.size)}")
    d_out = np.outer(h2, delta)
    d_hid = np.outer(h1, w_h2_out @ delta)
    return d_hid, d_out


def membrane_config(config):
    if config.readout == "membrane-logit":
        return config
    return dataclasses.replace(config, readout="membrane-logit")


def sgl_sample_deltas(config, weights, train, label, params):
    """Forward one encoded sample and return ``(dW_hid, dW_out, record)``.

    Both deltas are exactly zero when the normalized prediction equals the
    one-hot target.
    """
    record = forward(config, weights, train)
    y_hat = normalized_prediction(record.logits)
    delta = sgl_error(one_hot(label), y_hat, record.logits, params, params.resolved_center(config))
    h1, h2 = record.hidden_counts()
    d_hid, d_out = sgl_layer_updates(h1, h2, delta, weights.w_out)
    return d_hid, d_out, record


def train_sgl(config, train, params, epochs, rng, encoder=None, val=None):
    """Online surrogate-gradient training. Returns ``(TrainedModel, TrainReport)``.

    Weight init and per-epoch visiting order come from ``rng``; Poisson
    encodings are keyed by ``encoder.seed``. The accuracy curve holds the
    validation accuracy after each epoch (training accuracy if no
    validation set is given).
    """
    check_training_set(train)
    config = membrane_config(config)
    encoder = match_encoder(config, encoder)
    stats = FeatureStats.fit(train.features)
    x = normalize_features(train.features, stats)
    xv = normalize_features(val.features, stats) if val is not None else None
    weights = init_weights(config, rng)
    model = TrainedModel("sgl", config, encoder, stats, weights)

    curve = []
    elapsed = 0.0
    for epoch in range(epochs):
        start = time.perf_counter()
        for i in rng.permutation(len(train)):
            spk = encode(x[i], encoder, int(i), epoch)
            d_hid, d_out, _ = sgl_sample_deltas(config, weights, spk, int(train.labels[i]), params)
            weights.w_hid[...] += d_hid
            weights.w_out[...] += d_out
        elapsed += time.perf_counter() - start
        curve.append(_epoch_accuracy(model, train, val))

    report = TrainReport(
        rule="sgl",
        epochs_run=epochs,
        final_train_accuracy=model.accuracy(train),
        final_val_accuracy=model.accuracy(val) if val is not None else float("nan"),
        wall_time_seconds=elapsed,
        accuracy_curve=curve,
    )
    return model, report


def _epoch_accuracy(model, train, val):
    return model.accuracy(val if val is not None else train)
