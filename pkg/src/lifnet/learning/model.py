"""Trained-network container, evaluation, the shared training report and persistence."""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from lifnet.core import LifParams, NetworkConfig, Weights, forward, predict
from lifnet.encoding import EVAL_STREAM, EncoderConfig, FeatureStats, encode, normalize_features
from lifnet.errors import ConfigError, InputError

RULES = ("sgl", "tempotron", "bal")


@dataclass
class TrainReport:
    rule: str
    epochs_run: int
    final_train_accuracy: float
    final_val_accuracy: float
    wall_time_seconds: float
    accuracy_curve: list = field(default_factory=list)
    labels_queried: int = None
    pool_size: int = None

    def to_dict(self):
        """Plain dict; NaN accuracies (no validation set) become ``None``."""
        d = asdict(self)
        for key in ("final_train_accuracy", "final_val_accuracy"):
            if d[key] is not None and math.isnan(d[key]):
                d[key] = None
        return d


@dataclass
class TrainedModel:
    """Everything needed to classify raw feature vectors.

    For the tempotron rule ``weights.w_out`` holds the two output tempotron
    units (one column per class) and ``tempotron`` their parameters.
    """

    rule: str
    config: NetworkConfig
    encoder: EncoderConfig
    stats: FeatureStats
    weights: Weights
    tempotron: object = None

    def classify(self, x_norm, sample_index, stream=EVAL_STREAM, epoch=0):
        train = encode(x_norm, self.encoder, sample_index, epoch, stream)
        record = forward(self.config, self.weights, train)
        if self.rule == "tempotron":
            from lifnet.learning.tempotron import tempotron_predict
            return tempotron_predict(record.spikes[1].data, self.weights.w_out, self.tempotron)
        return predict(record)

    def predict(self, dataset, stream=EVAL_STREAM):
        x = normalize_features(dataset.features, self.stats)
        return np.array([self.classify(row, i, stream) for i, row in enumerate(x)], dtype=np.int64)

    def accuracy(self, dataset, stream=EVAL_STREAM):
        if len(dataset) == 0:
            return float("nan")
        return float(np.mean(self.predict(dataset, stream) == dataset.labels))


def check_training_set(dataset):
    if dataset is None or len(dataset) == 0:
        raise InputError("training dataset is empty")


def match_encoder(config, encoder):
    if encoder is None:
        return EncoderConfig(t_steps=config.t_steps)
    if encoder.t_steps != config.t_steps:
        raise ConfigError(f"encoder t_steps ({encoder.t_steps}) != network t_steps ({config.t_steps})")
    return encoder


def config_to_dict(config):
    d = asdict(config)
    d["lif"] = [asdict(p) for p in config.lif]
    d["lif_out"] = asdict(config.lif_out) if config.lif_out is not None else None
    return d


def config_from_dict(d):
    d = dict(d)
    d["lif"] = tuple(LifParams(**p) for p in d["lif"])
    d["lif_out"] = LifParams(**d["lif_out"]) if d.get("lif_out") else None
    return NetworkConfig(**d)


def save_model(model, path):
    meta = {
        "rule": model.rule,
        "config": config_to_dict(model.config),
        "encoder": asdict(model.encoder),
        "tempotron": asdict(model.tempotron) if model.tempotron is not None else None,
    }
    np.savez(path, w_in=model.weights.w_in, w_hid=model.weights.w_hid, w_out=model.weights.w_out,
             mins=model.stats.mins, maxs=model.stats.maxs, meta=np.array(json.dumps(meta)))


def load_model(path):
    from lifnet.learning.tempotron import TempotronParams

    with np.load(path, allow_pickle=False) as z:
        meta = json.loads(str(z["meta"]))
        weights = Weights(z["w_in"], z["w_hid"], z["w_out"])
        stats = FeatureStats(z["mins"], z["maxs"])
    tempotron = TempotronParams(**meta["tempotron"]) if meta["tempotron"] else None
    return TrainedModel(meta["rule"], config_from_dict(meta["config"]),
                        EncoderConfig(**meta["encoder"]), stats, weights, tempotron)
