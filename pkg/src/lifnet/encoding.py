"""Feature normalization and spike encoders (Bernoulli-Poisson and even-spaced rate)."""

from dataclasses import dataclass

import numpy as np

from lifnet.core import SpikeTrain
from lifnet.errors import ConfigError

SCHEMES = ("poisson", "rate")


@dataclass(frozen=True)
class FeatureStats:
    """Per-dimension min and max used to map raw features into [0, 1]."""

    mins: np.ndarray
    maxs: np.ndarray

    @classmethod
    def fit(cls, features):
        features = np.asarray(features, dtype=np.float64)
        return cls(features.min(axis=0), features.max(axis=0))

    def __post_init__(self):
        if np.any(self.maxs < self.mins):
            raise ConfigError("feature stats have max < min in some dimension")


def normalize_features(raw, stats):
    """Min-max scale and clamp to [0, 1]; constant dimensions map to 0.

    Works on a single vector or on a row-per-sample matrix.
    """
    raw = np.asarray(raw, dtype=np.float64)
    span = stats.maxs - stats.mins
    flat = span == 0
    scaled = (raw - stats.mins) / np.where(flat, 1.0, span)
    scaled = np.where(flat, 0.0, scaled)
    return np.clip(scaled, 0.0, 1.0)


@dataclass(frozen=True)
class EncoderConfig:
    scheme: str = "rate"
    t_steps: int = 10
    gain: float = 1.0
    seed: int = 0
    # False: each sample keeps one Poisson draw for the whole run.
    resample_each_epoch: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.t_steps < 1:
            raise ConfigError("t_steps must be >= 1")
        if not self.gain >= 0.0:
            raise ConfigError("gain must be non-negative")


def _probabilities(features, gain):
    p = gain * np.asarray(features, dtype=np.float64)
    if p.size and (p.max() > 1.0 or p.min() < 0.0):
        raise ConfigError(f"gain * feature must lie in [0, 1], got range [{p.min()}, {p.max()}]")
    return p


def poisson_encode(features, cfg, rng):
    """Independent Bernoulli(gain * f_j) spike at every step of every channel."""
    p = _probabilities(features, cfg.gain)
    return SpikeTrain(rng.random((cfg.t_steps, p.size)) < p, check=False)


def rate_spike_counts(features, cfg):
    p = _probabilities(features, cfg.gain)
    return np.floor(p * cfg.t_steps + 0.5).astype(np.int64)


def rate_encode(features, cfg):
    """Deterministic: ``round(gain * f_j * T)`` spikes per channel, evenly spaced.

    Channel j fires at step t iff ``floor((t+1)k/T) > floor(t k/T)``.
    """
    k = rate_spike_counts(features, cfg)
    t = np.arange(cfg.t_steps)[:, None]
    raster = (t + 1) * k // cfg.t_steps > t * k // cfg.t_steps
    return SpikeTrain(raster, check=False)


TRAIN_STREAM = 0
EVAL_STREAM = 1


def sample_rng(seed, sample_index, epoch=0, stream=TRAIN_STREAM):
    """Independent generator keyed by (seed, stream, sample, epoch)."""
    key = np.random.SeedSequence((seed, stream, sample_index, epoch))
    return np.random.Generator(np.random.PCG64(key))


def encode(features, cfg, sample_index=0, epoch=0, stream=TRAIN_STREAM):
    """Encode one normalized feature vector with the configured scheme.

    Poisson draws are keyed by sample position and epoch, so a sample's
    train does not depend on visiting order or on which other samples exist.
    """
    if cfg.scheme == "rate":
        return rate_encode(features, cfg)
    if not cfg.resample_each_epoch:
        epoch = 0
    return poisson_encode(features, cfg, sample_rng(cfg.seed, sample_index, epoch, stream))
