"""Seeded random search over a box of hyperparameters.

Trial ``i`` draws every dimension from a generator keyed only by
``(base_seed, i)``, so a trial's parameters never depend on which other
trials ran, in what order, or on how many threads were used.
"""

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from lifnet.errors import ConfigError, StudyError


@dataclass(frozen=True)
class Uniform:
    low: float
    high: float

    def __post_init__(self):
        if self.high < self.low:
            raise ConfigError(f"empty interval [{self.low}, {self.high}]")

    def sample(self, rng):
        if self.low == self.high:
            return float(self.low)
        return float(min(self.low + (self.high - self.low) * rng.random(), self.high))

    def contains(self, value):
        return self.low <= value <= self.high


@dataclass(frozen=True)
class IntUniform:
    low: int
    high: int

    def __post_init__(self):
        if self.high < self.low:
            raise ConfigError(f"empty interval [{self.low}, {self.high}]")

    def sample(self, rng):
        return int(rng.integers(self.low, self.high, endpoint=True))

    def contains(self, value):
        return self.low <= value <= self.high and int(value) == value


@dataclass(frozen=True)
class Choice:
    options: tuple

    def __post_init__(self):
        if not self.options:
            raise ConfigError("categorical dimension needs at least one option")

    def sample(self, rng):
        return self.options[int(rng.integers(len(self.options)))]

    def contains(self, value):
        return value in self.options


# Network and encoder ranges shared by every rule.
NETWORK_SPACE = {
    "tau_m": Uniform(1.1, 3.0),
    "v_th": Uniform(0.2, 0.8),
    "bias": Uniform(0.0, 0.05),
    "h1": IntUniform(64, 128),
    "h2": IntUniform(32, 64),
    "t_steps": IntUniform(5, 20),
    "scheme": Choice(("poisson", "rate")),
    "gain": Uniform(0.5, 1.0),
}

RULE_SPACES = {
    "sgl": {"eta": Uniform(0.005, 0.05), "alpha": Uniform(0.05, 0.5)},
    "tempotron": {"lambda_lr": Uniform(0.005, 0.05), "unit_v_th": Uniform(0.5, 1.5),
                  "tau_ratio": Uniform(4.0, 4.0)},
    "bal": {"lr": Uniform(0.005, 0.05), "alpha": Uniform(0.05, 0.5), "u_decay": Uniform(0.99, 1.0),
            "query_fraction": Uniform(0.15, 0.25), "bins": IntUniform(2, 8)},
}


@dataclass(frozen=True)
class SearchSpace:
    dims: dict

    @classmethod
    def for_rule(cls, rule, overrides=None):
        if rule not in RULE_SPACES:
            raise ConfigError(f"unknown rule {rule!r}")
        dims = {**NETWORK_SPACE, **RULE_SPACES[rule]}
        for name, dim in (overrides or {}).items():
            if name not in dims:
                raise ConfigError(f"unknown search dimension {name!r}")
            dims[name] = dim
        return cls(dims)

    def contains(self, params):
        return set(params) == set(self.dims) and all(self.dims[k].contains(v) for k, v in params.items())


def trial_rng(base_seed, trial_index):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((base_seed, trial_index))))


def trial_seed(base_seed, trial_index):
    """Training seed handed to the objective for this trial."""
    return int(np.random.SeedSequence((base_seed, trial_index, 1)).generate_state(1)[0])


def sample_trial(space, trial_index, base_seed):
    rng = trial_rng(base_seed, trial_index)
    return {name: space.dims[name].sample(rng) for name in sorted(space.dims)}


@dataclass
class Trial:
    trial_id: int
    params: dict
    seed: int
    report: object = None
    status: str = "complete"
    error: str = None

    @property
    def val_accuracy(self):
        return self.report.final_val_accuracy if self.report is not None else float("nan")

    def to_dict(self):
        return {
            "trial_id": self.trial_id,
            "params": self.params,
            "seed": self.seed,
            "status": self.status,
            "val_accuracy": self.val_accuracy if self.status == "complete" else None,
            "wall_time_seconds": self.report.wall_time_seconds if self.report is not None else None,
            "report": self.report.to_dict() if self.report is not None else None,
            "error": self.error,
        }


@dataclass
class StudyReport:
    trials: list
    best_trial_id: int
    wall_time_seconds: float = 0.0
    rule: str = None

    @property
    def best(self):
        return self.trials[self.best_trial_id]

    def to_dict(self):
        return {
            "rule": self.rule,
            "best_trial_id": self.best_trial_id,
            "wall_time_seconds": self.wall_time_seconds,
            "trials": [t.to_dict() for t in self.trials],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self):
        names = sorted({k for t in self.trials for k in t.params})
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["trial_id", "status", "val_accuracy", "wall_time_seconds", *names])
        for t in self.trials:
            d = t.to_dict()
            writer.writerow([t.trial_id, t.status, d["val_accuracy"], d["wall_time_seconds"],
                             *(t.params.get(k) for k in names)])
        return buf.getvalue()


def _run_one(objective, space, index, base_seed):
    params = sample_trial(space, index, base_seed)
    trial = Trial(index, params, trial_seed(base_seed, index))
    try:
        trial.report = objective(params, trial.seed)
        acc = trial.report.final_val_accuracy
        if acc is None or not math.isfinite(acc):
            raise ValueError(f"objective returned non-finite validation accuracy {acc!r}")
    except Exception as exc:  # a diverging trial must not end the study
        trial.status = "failed"
        trial.report = None
        trial.error = f"{type(exc).__name__}: {exc}"
    return trial


def best_trial_id(trials):
    complete = [t for t in trials if t.status == "complete"]
    if not complete:
        raise StudyError("every trial failed")
    # max() keeps the first maximal element; trials are in id order
    return max(complete, key=lambda t: t.val_accuracy).trial_id


def run_study(space, objective, n_trials=30, parallelism=1, base_seed=0, rule=None):
    """Evaluate ``objective(params, seed) -> TrainReport`` on ``n_trials`` sampled points."""
    if n_trials < 1:
        raise ConfigError("n_trials must be >= 1")
    start = time.perf_counter()
    if parallelism <= 1:
        trials = [_run_one(objective, space, i, base_seed) for i in range(n_trials)]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            futures = [pool.submit(_run_one, objective, space, i, base_seed) for i in range(n_trials)]
            trials = [f.result() for f in futures]
    trials.sort(key=lambda t: t.trial_id)
    return StudyReport(trials, best_trial_id(trials), time.perf_counter() - start, rule)
