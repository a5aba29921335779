"""Plug-in entropy and mutual information of spike rasters.

A raster is reduced to one symbol per timestep: its population spike count,
bucketed into ``bins`` equal-width buckets over ``[0, channels]``.
"""

import numpy as np

from lifnet.core import SpikeTrain
from lifnet.errors import ConfigError, InputError
from lifnet.kernels import plugin_entropies


def _data(train):
    return train.data if isinstance(train, SpikeTrain) else np.asarray(train)


def population_symbols(train, bins):
    if bins < 2:
        raise ConfigError(f"bins must be >= 2, got {bins}")
    raster = _data(train)
    channels = raster.shape[1]
    counts = raster.sum(axis=1, dtype=np.int64)
    if channels == 0:
        return np.zeros_like(counts)
    return np.minimum(counts * bins // channels, bins - 1)


def spike_entropy(train, bins):
    """Entropy in bits of the per-step population-count symbol."""
    sym = population_symbols(train, bins)
    h, _, _ = plugin_entropies(sym, np.zeros_like(sym), bins, 1)
    return h


def mutual_information(pre, post, bins):
    """``H(post) - H(post | pre)`` in bits from the paired per-step symbols.

    The estimate is clipped into ``[0, min(H(pre), H(post))]`` to absorb
    rounding in the last bit.
    """
    a, b = _data(pre), _data(post)
    if a.shape[0] != b.shape[0]:
        raise InputError(f"trains differ in length: {a.shape[0]} vs {b.shape[0]}")
    h_pre, h_post, h_joint = plugin_entropies(population_symbols(a, bins),
                                              population_symbols(b, bins), bins, bins)
    mi = h_pre + h_post - h_joint
    return float(min(max(mi, 0.0), h_pre, h_post))
