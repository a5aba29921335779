"""Tempotron readout on top of a frozen random spiking projection.

Each output unit sums difference-of-exponential PSP kernels over the
presynaptic spike times. On an error (fired when it should stay silent, or
the reverse) every weight moves by ``+-lambda * sum K(t_max - t_i)`` over the
spikes preceding the potential's peak. Two units are trained one-vs-rest
and the class with the higher peak potential wins.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from lifnet.core import forward, init_weights
from lifnet.encoding import FeatureStats, encode, normalize_features
from lifnet.errors import ConfigError, DomainError
from lifnet.learning.model import TrainedModel, TrainReport, check_training_set, match_encoder


@dataclass(frozen=True)
class TempotronParams:
    tau_m: float = 3.0
    tau_s: float = 0.75
    lambda_lr: float = 0.01
    v_th: float = 1.0
    # None: use the network's t_steps
    t_window: int = None

    def __post_init__(self):
        if not self.tau_m > self.tau_s > 0:
            raise ConfigError(f"need tau_m > tau_s > 0, got tau_m={self.tau_m}, tau_s={self.tau_s}")
        if not self.lambda_lr > 0:
            raise ConfigError("lambda_lr must be positive")

    @classmethod
    def with_ratio(cls, tau_m, ratio=4.0, **kw):
        """Synaptic constant as a fixed fraction of the membrane constant."""
        return cls(tau_m=tau_m, tau_s=tau_m / ratio, **kw)

    def window(self, t_steps):
        return t_steps if self.t_window is None else self.t_window


def _check_taus(tau_m, tau_s):
    if not tau_m > tau_s > 0:
        raise DomainError(f"need tau_m > tau_s > 0, got tau_m={tau_m}, tau_s={tau_s}")


def psp_peak_time(tau_m, tau_s):
    _check_taus(tau_m, tau_s)
    return tau_m * tau_s / (tau_m - tau_s) * math.log(tau_m / tau_s)


def psp_norm(tau_m, tau_s):
    """V0 such that the kernel peaks at exactly 1."""
    t_peak = psp_peak_time(tau_m, tau_s)
    return 1.0 / (math.exp(-t_peak / tau_m) - math.exp(-t_peak / tau_s))


def psp_kernel(dt, tau_m, tau_s):
    """Normalized PSP kernel; zero for ``dt < 0``. Accepts scalars or arrays."""
    v0 = psp_norm(tau_m, tau_s)
    dt = np.asarray(dt, dtype=np.float64)
    pos = np.maximum(dt, 0.0)
    k = np.where(dt >= 0, v0 * (np.exp(-pos / tau_m) - np.exp(-pos / tau_s)), 0.0)
    return float(k) if k.ndim == 0 else k


def kernel_matrix(t_window, t_steps, tau_m, tau_s):
    """``K[t, s] = psp_kernel(t - s)`` for query times 0..t_window, spike steps 0..t_steps-1."""
    t = np.arange(t_window + 1)[:, None]
    s = np.arange(t_steps)[None, :]
    return psp_kernel(t - s, tau_m, tau_s)


def tempotron_potential(weights, spike_times, params, t):
    """Potential at time ``t`` by direct summation over input spikes (resting level 0)."""
    total = 0.0
    for w, times in zip(weights, spike_times):
        for ti in times:
            if ti <= t:
                total += w * psp_kernel(t - ti, params.tau_m, params.tau_s)
    return total


def _raster_from_times(spike_times, t_steps):
    raster = np.zeros((t_steps, len(spike_times)))
    for j, times in enumerate(spike_times):
        for ti in times:
            raster[int(ti), j] += 1.0
    return raster


def _grid_steps(spike_times):
    return int(max((max(ts) for ts in spike_times if len(ts)), default=0)) + 1


def potential_trace(raster, weights, kmat):
    """Potential on the query grid for one unit (vector weights) or several (matrix)."""
    return kmat @ (np.asarray(raster, dtype=np.float64) @ weights)


def peak_index(trace):
    """Earliest post-rest argmax of each column; 0 for an identically zero column.

    Time 0 is excluded because the potential there is always at rest, and
    picking it would freeze a unit whose potential never rises above rest.
    """
    trace = np.asarray(trace)
    idx = 1 + np.argmax(trace[1:], axis=0)
    return np.where(np.any(trace != 0.0, axis=0), idx, 0)


def tempotron_t_max(weights, spike_times, params):
    """Grid time of the peak potential (see :func:`peak_index`); 0 when there are no spikes."""
    if not any(len(ts) for ts in spike_times):
        return 0
    t_steps = _grid_steps(spike_times)
    kmat = kernel_matrix(params.window(t_steps), t_steps, params.tau_m, params.tau_s)
    trace = potential_trace(_raster_from_times(spike_times, t_steps), np.asarray(weights, float), kmat)
    return int(peak_index(trace))


def tempotron_update(weights, spike_times, label, fired, params):
    """Weight change for one unit. ``label`` 1 means the unit should fire."""
    weights = np.asarray(weights, dtype=np.float64)
    if bool(label) == bool(fired):
        return np.zeros_like(weights)
    t_max = tempotron_t_max(weights, spike_times, params)
    sign = 1.0 if label else -1.0
    delta = np.zeros_like(weights)
    for j, times in enumerate(spike_times):
        early = np.asarray([ti for ti in times if ti < t_max], dtype=np.float64)
        if early.size:
            delta[j] = sign * params.lambda_lr * psp_kernel(t_max - early, params.tau_m, params.tau_s).sum()
    return delta


def unit_responses(raster, w_units, kmat):
    """Per-unit ``(t_max, peak)`` on the grid for a presynaptic raster."""
    trace = potential_trace(raster, w_units, kmat)
    t_max = peak_index(trace)
    return t_max, trace[t_max, np.arange(trace.shape[1])]


def tempotron_predict(raster, w_units, params):
    t_steps = raster.shape[0]
    kmat = kernel_matrix(params.window(t_steps), t_steps, params.tau_m, params.tau_s)
    _, peaks = unit_responses(raster, w_units, kmat)
    return 1 if peaks[1] > peaks[0] else 0


def tempotron_step(raster, label, w_units, params, kmat):
    """Apply the error-driven update to both units in place. Returns the weight change."""
    raster = np.asarray(raster, dtype=np.float64)
    t_max, peaks = unit_responses(raster, w_units, kmat)
    delta = np.zeros_like(w_units)
    for k in range(w_units.shape[1]):
        target = label == k
        fired = peaks[k] >= params.v_th
        if target != fired:
            sign = 1.0 if target else -1.0
            # kmat row t_max is zero for spikes at or after t_max
            delta[:, k] = sign * params.lambda_lr * (kmat[t_max[k]] @ raster)
    w_units += delta
    return delta


def train_tempotron(config, train, params, epochs, rng, encoder=None, val=None):
    """Train two output tempotrons on hidden-layer-2 spikes; hidden weights stay random.

    Both units start from the same random weight vector, so relabelling the
    classes exactly swaps the trained units.
    """
    check_training_set(train)
    encoder = match_encoder(config, encoder)
    stats = FeatureStats.fit(train.features)
    x = normalize_features(train.features, stats)
    hidden = init_weights(config, rng)
    bound = 1.0 / math.sqrt(config.h2)
    start_w = rng.uniform(-bound, bound, size=config.h2)
    w_units = np.column_stack([start_w, start_w])
    weights = hidden._replace(w_out=w_units)
    kmat = kernel_matrix(params.window(config.t_steps), config.t_steps, params.tau_m, params.tau_s)
    model = TrainedModel("tempotron", config, encoder, stats, weights, params)

    curve = []
    elapsed = 0.0
    for epoch in range(epochs):
        start = time.perf_counter()
        for i in rng.permutation(len(train)):
            record = forward(config, weights, encode(x[i], encoder, int(i), epoch))
            tempotron_step(record.spikes[1].data, int(train.labels[i]), w_units, params, kmat)
        elapsed += time.perf_counter() - start
        curve.append(model.accuracy(val if val is not None else train))

    report = TrainReport(
        rule="tempotron",
        epochs_run=epochs,
        final_train_accuracy=model.accuracy(train),
        final_val_accuracy=model.accuracy(val) if val is not None else float("nan"),
        wall_time_seconds=elapsed,
        accuracy_curve=curve,
    )
    return model, report
