"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--calls 2000] [--epochs 2]

Both backends run on identical inputs and their outputs are compared
before timing. Numba compile time is excluded by a warm-up call.
"""

import argparse
import platform
import time
import timeit

import numpy as np

from lifnet import _accel
from lifnet.core import init_weights
from lifnet.data import generate_synthetic, separable_spec, stratified_split
from lifnet.encoding import EncoderConfig, encode
from lifnet.experiment import DEFAULTS, network_config, train_rule
from lifnet.kernels import lif_forward, plugin_entropies


def forward_case(cfg, seed=0):
    rng = np.random.default_rng(seed)
    w = init_weights(cfg, rng)
    x = encode(rng.random(cfg.d_in), EncoderConfig(scheme="poisson", t_steps=cfg.t_steps)).data
    layers = cfg.layer_arrays()
    return lambda: lif_forward(x, w.w_in, w.w_hid, w.w_out, *layers, False)


def entropy_case(steps=20, bins=4, seed=0):
    rng = np.random.default_rng(seed)
    a, b = rng.integers(0, bins, steps), rng.integers(0, bins, steps)
    return lambda: plugin_entropies(a, b, bins, bins)


def per_call_us(fn, calls):
    fn()
    return min(timeit.repeat(fn, number=calls, repeat=3)) / calls * 1e6


def same_output(fn):
    results = {}
    for name in ("numba", "numpy"):
        _accel.set_backend(name)
        results[name] = fn()
    return all(np.allclose(a, b, rtol=0, atol=1e-12) for a, b in zip(results["numba"], results["numpy"]))


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--calls", type=int, default=2000)
    ap.add_argument("--epochs", type=int, default=2)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    cfg = network_config(16, DEFAULTS)
    train, val = stratified_split(generate_synthetic(separable_spec()), 0.8, 0)
    cases = {
        f"forward {cfg.d_in}-{cfg.h1}-{cfg.h2}-2, T={cfg.t_steps}": forward_case(cfg),
        "plug-in entropies, 20 steps": entropy_case(),
    }
    print(f"# {platform.machine()} python {platform.python_version()} numpy {np.__version__}")
    print(f"{'case':<36}{'numba us':>12}{'numpy us':>12}{'speedup':>10}  match")
    previous = _accel.get_backend()
    try:
        for label, fn in cases.items():
            match = same_output(fn)
            times = {}
            for name in ("numba", "numpy"):
                _accel.set_backend(name)
                times[name] = per_call_us(fn, args.calls)
            print(f"{label:<36}{times['numba']:>12.1f}{times['numpy']:>12.1f}"
                  f"{times['numpy'] / times['numba']:>9.1f}x  {match}")

        times = {}
        for name in ("numba", "numpy"):
            _accel.set_backend(name)
            train_rule("sgl", {}, train, val, 0, 0)
            start = time.perf_counter()
            _, report = train_rule("sgl", {}, train, val, args.epochs, 0)
            times[name] = (time.perf_counter() - start, report.final_val_accuracy)
        label = f"sgl training, {args.epochs} epochs (s)"
        print(f"{label:<36}{times['numba'][0]:>12.2f}{times['numpy'][0]:>12.2f}"
              f"{times['numpy'][0] / times['numba'][0]:>9.1f}x  {times['numba'][1] == times['numpy'][1]}")
    finally:
        _accel.set_backend(previous)


if __name__ == "__main__":
    main()
