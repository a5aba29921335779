"""Discrete-time leaky integrate-and-fire layers and the three-layer network.

Membrane update per step (exponential Euler, dt = 1 step)::

    v' = exp(-1/tau_m) * v + r_m * I + bias

A neuron spikes when ``v' >= v_th`` and starts the next step at ``v_reset``.
There is no refractory period.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from lifnet.errors import ConfigError, DomainError
from lifnet.kernels import lif_forward

MAX_T_STEPS = 1024
READOUT_MODES = ("spike-count", "membrane-logit")


def decay_factor(tau_m):
    """Per-step membrane decay ``exp(-1/tau_m)`` for ``tau_m > 1``."""
    if not tau_m > 1.0:
        raise DomainError(f"tau_m must be > 1.0, got {tau_m!r}")
    return math.exp(-1.0 / tau_m)


@dataclass(frozen=True)
class LifParams:
    tau_m: float = 2.0
    v_th: float = 0.5
    v_reset: float = 0.0
    r_m: float = 1.0
    bias: float = 0.0

    def __post_init__(self):
        if not self.tau_m > 1.0:
            raise ConfigError(f"tau_m must be > 1.0, got {self.tau_m!r}")
        if not self.v_th > self.v_reset:
            raise ConfigError(f"v_th ({self.v_th}) must exceed v_reset ({self.v_reset})")
        if not self.bias >= 0.0:
            raise ConfigError(f"bias must be >= 0, got {self.bias!r}")

    @property
    def decay(self):
        return decay_factor(self.tau_m)


class SpikeTrain:
    """Binary spike raster, timestep-major (``t_steps x channels``)."""

    __slots__ = ("data",)

    def __init__(self, data, check=True):
        data = np.asarray(data)
        if check:
            if data.ndim != 2:
                raise ConfigError(f"spike raster must be 2-D, got shape {data.shape}")
            if not 1 <= data.shape[0] <= MAX_T_STEPS:
                raise ConfigError(f"t_steps must lie in [1, {MAX_T_STEPS}], got {data.shape[0]}")
            if data.size and not np.isin(data, (0, 1)).all():
                raise ConfigError("spike raster entries must be 0 or 1")
        self.data = data.astype(np.uint8, copy=False)

    @property
    def t_steps(self):
        return self.data.shape[0]

    @property
    def channels(self):
        return self.data.shape[1]

    def counts(self):
        """Spikes per channel, summed over time."""
        return self.data.sum(axis=0, dtype=np.int64)

    def spike_times(self):
        """List with the sorted spike steps of each channel."""
        return [np.flatnonzero(col).tolist() for col in self.data.T]

    def __eq__(self, other):
        return isinstance(other, SpikeTrain) and np.array_equal(self.data, other.data)

    def __repr__(self):
        return f"SpikeTrain(t_steps={self.t_steps}, channels={self.channels}, spikes={int(self.data.sum())})"


def _raster(train):
    return train.data if isinstance(train, SpikeTrain) else np.asarray(train, dtype=np.uint8)


@dataclass
class LayerState:
    v: np.ndarray

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n))


def lif_step(state, input_current, params):
    """Advance one layer by one step. Returns ``(new_state, spikes)``."""
    v = params.decay * state.v + params.r_m * np.asarray(input_current, dtype=np.float64) + params.bias
    spikes = (v >= params.v_th).astype(np.uint8)
    return LayerState(np.where(spikes == 1, params.v_reset, v)), spikes


@dataclass(frozen=True)
class NetworkConfig:
    d_in: int
    h1: int = 64
    h2: int = 32
    n_out: int = 2
    lif: tuple = (LifParams(), LifParams())
    t_steps: int = 10
    readout: str = "membrane-logit"
    lif_out: LifParams = None

    def __post_init__(self):
        for name in ("d_in", "h1", "h2", "n_out"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.n_out != 2:
            raise ConfigError("only binary classification (n_out == 2) is supported")
        if len(self.lif) != 2:
            raise ConfigError("lif must hold one LifParams per hidden layer")
        if not 1 <= self.t_steps <= MAX_T_STEPS:
            raise ConfigError(f"t_steps must lie in [1, {MAX_T_STEPS}]")
        if self.readout not in READOUT_MODES:
            raise ConfigError(f"readout must be one of {READOUT_MODES}, got {self.readout!r}")

    @property
    def output_lif(self):
        """Output-layer neuron parameters: ``lif_out`` or hidden layer 2's without bias."""
        if self.lif_out is not None:
            return self.lif_out
        p = self.lif[1]
        return LifParams(tau_m=p.tau_m, v_th=p.v_th, v_reset=p.v_reset, r_m=p.r_m, bias=0.0)

    @property
    def shapes(self):
        return ((self.d_in, self.h1), (self.h1, self.h2), (self.h2, self.n_out))

    def layer_arrays(self):
        layers = (self.lif[0], self.lif[1], self.output_lif)
        return tuple(np.array([getattr(p, attr) for p in layers], dtype=np.float64)
                     for attr in ("decay", "r_m", "bias", "v_th", "v_reset"))


class Weights(NamedTuple):
    """Synaptic matrices input->h1, h1->h2, h2->out (rows: presynaptic)."""

    w_in: np.ndarray
    w_hid: np.ndarray
    w_out: np.ndarray

    def copy(self):
        return Weights(self.w_in.copy(), self.w_hid.copy(), self.w_out.copy())

    def all_finite(self):
        return all(np.isfinite(w).all() for w in self)


def init_weights(config, rng):
    """Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for every layer."""
    mats = []
    for fan_in, fan_out in config.shapes:
        bound = 1.0 / math.sqrt(fan_in)
        mats.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
    return Weights(*mats)


def check_weights(config, weights):
    if len(weights) != 3:
        raise ConfigError(f"expected 3 weight matrices, got {len(weights)}")
    for k, (w, shape) in enumerate(zip(weights, config.shapes)):
        if np.shape(w) != shape:
            raise ConfigError(f"weight matrix {k} has shape {np.shape(w)}, expected {shape}")


@dataclass(frozen=True)
class ForwardRecord:
    spikes: tuple  # SpikeTrain for h1, h2, out
    traces: tuple  # T x N float arrays, pre-reset potentials
    logits: np.ndarray = field(repr=False)

    def __eq__(self, other):
        if not isinstance(other, ForwardRecord):
            return NotImplemented
        return (all(a == b for a, b in zip(self.spikes, other.spikes))
                and all(np.array_equal(a, b) for a, b in zip(self.traces, other.traces))
                and np.array_equal(self.logits, other.logits))

    def hidden_counts(self):
        """Per-neuron spike counts of both hidden layers, as float vectors."""
        return (self.spikes[0].data.sum(axis=0, dtype=np.float64),
                self.spikes[1].data.sum(axis=0, dtype=np.float64))


def forward(config, weights, train):
    """Simulate ``config.t_steps`` steps of the network on an input raster.

    In ``spike-count`` readout the output neurons are ordinary LIF units and
    the logits are their spike counts. In ``membrane-logit`` readout they
    integrate without resetting and the logits are the final potentials;
    their recorded spike raster then marks the steps at or above threshold.
    """
    x = _raster(train)
    if x.ndim != 2 or x.shape[1] != config.d_in:
        raise ConfigError(f"input has shape {x.shape}, expected (T, {config.d_in})")
    if x.shape[0] != config.t_steps:
        raise ConfigError(f"input has {x.shape[0]} steps, config expects {config.t_steps}")
    check_weights(config, weights)
    spiking_out = config.readout == "spike-count"
    s1, s2, s3, m1, m2, m3 = lif_forward(x, *weights, *config.layer_arrays(), spiking_out)
    logits = s3.sum(axis=0).astype(np.float64) if spiking_out else m3[-1].copy()
    spikes = tuple(SpikeTrain(s, check=False) for s in (s1, s2, s3))
    return ForwardRecord(spikes, (m1, m2, m3), logits)


def predict(record):
    """Index of the larger logit; ties go to class 0."""
    logits = record.logits if isinstance(record, ForwardRecord) else np.asarray(record)
    return 1 if logits[1] > logits[0] else 0
