"""Bio-inspired active learning.

Every trainable synapse carries an uncertainty. Each round the unlabelled
pool is scored by total output-layer uncertainty times the mutual
information between the output layer's presynaptic (hidden 2) and
postsynaptic trains, the top fraction is labelled, and the labelled set is
trained with the surrogate-gradient update scaled elementwise by the
uncertainty. Each synapse that moves has its uncertainty decayed.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from lifnet.core import forward, init_weights
from lifnet.encoding import FeatureStats, encode, normalize_features
from lifnet.errors import ConfigError, InputError
from lifnet.learning.information import mutual_information
from lifnet.learning.model import TrainedModel, TrainReport, check_training_set, match_encoder
from lifnet.learning.sgl import SglParams, membrane_config, sgl_sample_deltas


@dataclass(frozen=True)
class BalParams:
    u_init: float = 1.0
    u_decay: float = 0.999
    bins: int = 4
    query_fraction: float = 0.5
    lr: float = 0.02
    alpha: float = 0.1
    center: float = None
    seed_fraction: float = 0.1
    epochs_per_round: int = 10

    def __post_init__(self):
        if not self.u_init >= 0:
            raise ConfigError("u_init must be non-negative")
        if not 0.0 < self.u_decay <= 1.0:
            raise ConfigError("u_decay must lie in (0, 1]")
        if self.bins < 2:
            raise ConfigError("bins must be >= 2")
        if not 0.0 < self.query_fraction <= 1.0:
            raise ConfigError("query_fraction must lie in (0, 1]")
        if not 0.0 < self.seed_fraction < 1.0:
            raise ConfigError("seed_fraction must lie in (0, 1)")
        if self.epochs_per_round < 0:
            raise ConfigError("epochs_per_round must be >= 0")

    def sgl_params(self):
        return SglParams(alpha=self.alpha, eta=self.lr, center=self.center)


def n_queries(pool_size, query_fraction):
    return min(pool_size, math.ceil(query_fraction * pool_size - 1e-12))


def bal_select(pool_trains, config, weights, uncertainty, params):
    """Rank pool samples by expected information and return the top indices.

    ``pool_trains`` is a sequence of encoded input rasters; the returned
    positions index into it, best first, ties broken by position.
    """
    if len(pool_trains) == 0:
        raise InputError("pool is empty")
    u_out = float(np.sum(uncertainty[-1]))
    scores = np.empty(len(pool_trains))
    for k, train in enumerate(pool_trains):
        record = forward(config, weights, train)
        scores[k] = u_out * mutual_information(record.spikes[1], record.spikes[2], params.bins)
    order = np.argsort(-scores, kind="stable")
    return order[:n_queries(len(pool_trains), params.query_fraction)]


def seed_indices(labels, seed_fraction):
    """First ``ceil(fraction * n_class)`` samples of each class, in dataset order."""
    chosen = []
    for cls in (0, 1):
        members = np.flatnonzero(labels == cls)
        if members.size:
            chosen.append(members[:max(1, math.ceil(seed_fraction * members.size))])
    return np.sort(np.concatenate(chosen))


def train_bal(config, train, params, rounds, rng, encoder=None, val=None):
    """Pool-based active training. Returns ``(TrainedModel, TrainReport)``.

    With ``query_fraction=1``, ``u_init=1``, ``u_decay=1`` and one round this
    reproduces :func:`~lifnet.learning.sgl.train_sgl` run for
    ``epochs_per_round`` epochs on the same ``rng``.
    """
    check_training_set(train)
    config = membrane_config(config)
    encoder = match_encoder(config, encoder)
    sgl = params.sgl_params()
    stats = FeatureStats.fit(train.features)
    x = normalize_features(train.features, stats)
    weights = init_weights(config, rng)
    model = TrainedModel("bal", config, encoder, stats, weights)
    u_hid = np.full(weights.w_hid.shape, float(params.u_init))
    u_out = np.full(weights.w_out.shape, float(params.u_init))

    labeled = seed_indices(train.labels, params.seed_fraction)
    pool = np.setdiff1d(np.arange(len(train)), labeled)
    pool_size = pool.size
    queried = 0
    epoch = 0
    curve = []
    elapsed = 0.0
    for _ in range(rounds):
        start = time.perf_counter()
        if pool.size:
            trains = [encode(x[i], encoder, int(i), epoch) for i in pool]
            picked = pool[bal_select(trains, config, weights, (u_hid, u_out), params)]
            queried += picked.size
            labeled = np.sort(np.concatenate([labeled, picked]))
            pool = np.setdiff1d(pool, picked)
        elapsed += time.perf_counter() - start
        for _ in range(params.epochs_per_round):
            start = time.perf_counter()
            for i in labeled[rng.permutation(labeled.size)]:
                spk = encode(x[i], encoder, int(i), epoch)
                d_hid, d_out, _ = sgl_sample_deltas(config, weights, spk, int(train.labels[i]), sgl)
                _gated_update(weights.w_hid, u_hid, d_hid, params.u_decay)
                _gated_update(weights.w_out, u_out, d_out, params.u_decay)
            elapsed += time.perf_counter() - start
            epoch += 1
            curve.append(model.accuracy(val if val is not None else train))

    report = TrainReport(
        rule="bal",
        epochs_run=epoch,
        final_train_accuracy=model.accuracy(train),
        final_val_accuracy=model.accuracy(val) if val is not None else float("nan"),
        wall_time_seconds=elapsed,
        accuracy_curve=curve,
        labels_queried=int(queried),
        pool_size=int(pool_size),
    )
    return model, report


def _gated_update(w, u, delta, decay):
    w += u * delta
    moved = delta != 0
    u[moved] *= decay
