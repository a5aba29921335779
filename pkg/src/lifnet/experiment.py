"""Turn a flat parameter assignment into a configured training run."""

import math

import numpy as np

from lifnet.core import LifParams, NetworkConfig
from lifnet.encoding import EncoderConfig
from lifnet.errors import ConfigError
from lifnet.learning.bal import BalParams, train_bal
from lifnet.learning.model import RULES
from lifnet.learning.sgl import SglParams, train_sgl
from lifnet.learning.tempotron import TempotronParams, train_tempotron

DEFAULTS = {
    "tau_m": 3.0,
    "v_th": 0.3,
    "bias": 0.0,
    "h1": 96,
    "h2": 48,
    "t_steps": 10,
    "scheme": "rate",
    "gain": 1.0,
    # sgl
    "eta": 0.02,
    "alpha": 0.1,
    # tempotron
    "lambda_lr": 0.01,
    "unit_v_th": 1.0,
    "tau_ratio": 4.0,
    # bal
    "lr": 0.02,
    "u_decay": 0.999,
    "query_fraction": 0.25,
    "bins": 4,
    "rounds": 2,
    "seed_fraction": 0.1,
}


def resolve(params):
    """Fill unspecified keys from :data:`DEFAULTS`; reject unknown keys."""
    unknown = set(params) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown parameters: {sorted(unknown)}")
    return {**DEFAULTS, **params}


def network_config(d_in, p, readout="membrane-logit"):
    lif = LifParams(tau_m=p["tau_m"], v_th=p["v_th"], bias=p["bias"])
    return NetworkConfig(d_in=d_in, h1=int(p["h1"]), h2=int(p["h2"]), lif=(lif, lif),
                         t_steps=int(p["t_steps"]), readout=readout)


def train_rule(rule, params, train, val, epochs, seed):
    """Train ``rule`` with ``params`` (missing keys take defaults). Returns ``(model, report)``.

    BAL spreads ``epochs`` over its query rounds (``ceil(epochs / rounds)``
    epochs after each query).
    """
    if rule not in RULES:
        raise ConfigError(f"unknown rule {rule!r}; expected one of {RULES}")
    if epochs < 0:
        raise ConfigError("epochs must be >= 0")
    p = resolve(params)
    rng = np.random.default_rng(seed)
    encoder = EncoderConfig(scheme=p["scheme"], t_steps=int(p["t_steps"]), gain=p["gain"], seed=seed)
    if rule == "sgl":
        config = network_config(train.n_features, p)
        return train_sgl(config, train, SglParams(alpha=p["alpha"], eta=p["eta"]), epochs, rng,
                         encoder, val)
    if rule == "tempotron":
        config = network_config(train.n_features, p, readout="spike-count")
        tp = TempotronParams.with_ratio(p["tau_m"], p["tau_ratio"], lambda_lr=p["lambda_lr"],
                                        v_th=p["unit_v_th"])
        return train_tempotron(config, train, tp, epochs, rng, encoder, val)
    rounds = int(p["rounds"])
    if rounds < 1:
        raise ConfigError("rounds must be >= 1")
    bp = BalParams(u_decay=p["u_decay"], bins=int(p["bins"]), query_fraction=p["query_fraction"],
                   lr=p["lr"], alpha=p["alpha"], seed_fraction=p["seed_fraction"],
                   epochs_per_round=math.ceil(epochs / rounds))
    config = network_config(train.n_features, p)
    return train_bal(config, train, bp, rounds, rng, encoder, val)


def make_objective(rule, train, val, epochs, fixed=None):
    """Objective for :func:`lifnet.hpo.run_study`: sampled params merged over ``fixed``."""
    fixed = dict(fixed or {})

    def objective(params, seed):
        return train_rule(rule, {**fixed, **params}, train, val, epochs, seed)[1]

    return objective
