"""``lifnet`` command line: gen-data, train, eval, hpo, bench.

Every value resolves from, in order of precedence: command-line flags, the
JSON object given by ``--config``, built-in defaults. Rule and network
hyperparameters go through repeatable ``--set key=value`` flags (or a
``"params"`` object in the config file).

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 runtime failure.
"""

import argparse
import datetime
import json
import platform
import sys
import time
from pathlib import Path

import numpy as np

from lifnet import _accel
from lifnet.data import generate_synthetic, load_csv, separable_spec, stratified_split, write_csv
from lifnet.errors import ConfigError, InputError, LifnetError, StudyError
from lifnet.experiment import DEFAULTS, make_objective, train_rule
from lifnet.hpo import SearchSpace, run_study
from lifnet.learning.model import RULES, load_model, save_model

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3

RULE_TITLES = {"sgl": "Surrogate Gradient", "tempotron": "Tempotron", "bal": "BAL"}

COMMON_DEFAULTS = {"seed": 0, "data": None, "out": None, "verbose": False}
DATA_DEFAULTS = {"n": 800, "d": 16, "separation": 6.0, "std": 0.1, "balance": 0.5,
                 "train_fraction": 0.8}
COMMAND_DEFAULTS = {
    "gen-data": {**DATA_DEFAULTS},
    "train": {**DATA_DEFAULTS, "rule": "sgl", "epochs": 30, "params": {}, "model_out": None},
    "eval": {"model": None},
    "hpo": {**DATA_DEFAULTS, "rule": "sgl", "trials": 30, "epochs": 10, "jobs": 1, "params": {},
            "csv_out": None},
    "bench": {**DATA_DEFAULTS, "rules": "sgl,tempotron,bal", "trials": 30, "epochs": 10, "jobs": 1,
              "params": {}, "markdown_out": None},
}


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _key_value(text):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), _parse_value(value.strip())


def build_parser():
    parser = _Parser(prog="lifnet", description=__doc__.split("\n\n")[0])
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="global seed (default 0)")
    common.add_argument("--data", default=None, help="feature CSV; synthetic data if omitted")
    common.add_argument("--out", default=None, help="output path")
    common.add_argument("--config", default=None, help="JSON file of option values")
    common.add_argument("--verbose", action="store_const", const=True, default=None)

    synth = _Parser(add_help=False)
    synth.add_argument("--n", type=int, default=None, help="synthetic sample count (800)")
    synth.add_argument("--d", type=int, default=None, help="synthetic feature dimension (16)")
    synth.add_argument("--separation", type=float, default=None,
                       help="distance between class means in std units (6.0)")
    synth.add_argument("--std", type=float, default=None, help="per-class std (0.1)")
    synth.add_argument("--balance", type=float, default=None, help="fraction of class 1 (0.5)")
    synth.add_argument("--train-fraction", type=float, default=None, help="train share (0.8)")

    params = _Parser(add_help=False)
    params.add_argument("--set", dest="set", action="append", type=_key_value, default=None,
                        metavar="KEY=VALUE", help="hyperparameter override, repeatable")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("gen-data", parents=[common, synth], help="write a synthetic dataset CSV")

    p = sub.add_parser("train", parents=[common, synth, params], help="train one rule")
    p.add_argument("--rule", default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--model-out", default=None, help="save the trained network (.npz)")

    p = sub.add_parser("eval", parents=[common], help="score a saved network on a CSV")
    p.add_argument("--model", default=None)

    for name, help_text in (("hpo", "random-search one rule"), ("bench", "HPO + retrain per rule")):
        p = sub.add_parser(name, parents=[common, synth, params], help=help_text)
        if name == "hpo":
            p.add_argument("--rule", default=None)
            p.add_argument("--csv-out", default=None, help="also write trials as CSV")
        else:
            p.add_argument("--rules", default=None, help="comma-separated (sgl,tempotron,bal)")
            p.add_argument("--markdown-out", default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--epochs", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None, help="concurrent trials")
    return parser


def resolve_options(args):
    """Merge flags over config file over defaults. Returns ``(options, sources)``."""
    defaults = {**COMMON_DEFAULTS, **COMMAND_DEFAULTS[args.command]}
    options = dict(defaults)
    sources = {k: "default" for k in defaults}
    if args.config:
        try:
            file_values = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from None
        if not isinstance(file_values, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in file_values.items():
            key = key.replace("-", "_")
            if key not in defaults:
                raise ConfigError(f"config file key {key!r} does not apply to '{args.command}'")
            options[key] = value
            sources[key] = "config"
    for key, value in vars(args).items():
        if key in ("command", "config", "set") or value is None:
            continue
        options[key] = value
        sources[key] = "flag"
    if getattr(args, "set", None):
        options["params"] = {**options.get("params", {}), **dict(args.set)}
        sources["params"] = "flag"
    if "params" in options:
        unknown = set(options["params"]) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown hyperparameters: {sorted(unknown)}")
    return options, sources


def _log(opts, msg):
    if opts.get("verbose"):
        print(msg, file=sys.stderr)


def _emit(text, path):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _synthetic(opts):
    spec = separable_spec(d=opts["d"], n=opts["n"], separation=opts["separation"], std=opts["std"],
                          class_balance=opts["balance"], seed=opts["seed"])
    return generate_synthetic(spec)


def _load_split(opts):
    dataset = load_csv(opts["data"]) if opts["data"] else _synthetic(opts)
    return stratified_split(dataset, opts["train_fraction"], opts["seed"])


def _check_rule(rule):
    if rule not in RULES:
        raise UsageError(f"unknown rule {rule!r}; choose from {', '.join(RULES)}")


def cmd_gen_data(opts):
    dataset = _synthetic(opts)
    out = opts["out"] or "data.csv"
    write_csv(dataset, out)
    c0, c1 = dataset.class_counts()
    print(f"wrote {out}: n={len(dataset)} d={dataset.n_features} class0={c0} class1={c1}")
    return EXIT_OK


def cmd_train(opts):
    _check_rule(opts["rule"])
    train, val = _load_split(opts)
    model, report = train_rule(opts["rule"], opts["params"], train, val, opts["epochs"], opts["seed"])
    if opts["model_out"]:
        save_model(model, opts["model_out"])
    _emit(json.dumps(report.to_dict(), indent=2) + "\n", opts["out"])
    return EXIT_OK


def cmd_eval(opts):
    if not opts["model"] or not opts["data"]:
        raise UsageError("eval needs --model and --data")
    try:
        model = load_model(opts["model"])
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"cannot load model {opts['model']}: {exc}") from None
    dataset = load_csv(opts["data"])
    result = {"rule": model.rule, "n": len(dataset), "accuracy": model.accuracy(dataset)}
    _emit(json.dumps(result, indent=2) + "\n", opts["out"])
    return EXIT_OK


def run_hpo(rule, opts, train, val):
    space = SearchSpace.for_rule(rule)
    fixed = {k: v for k, v in opts["params"].items() if k not in space.dims}
    pinned = {k: v for k, v in opts["params"].items() if k in space.dims}
    objective = make_objective(rule, train, val, opts["epochs"], fixed)
    if pinned:
        inner = objective

        def objective(params, seed):
            return inner({**params, **pinned}, seed)

    study = run_study(space, objective, opts["trials"], opts["jobs"], opts["seed"], rule=rule)
    for trial in study.trials:
        trial.params.update(pinned)
    return study


def cmd_hpo(opts):
    _check_rule(opts["rule"])
    if opts["trials"] < 1:
        raise UsageError("--trials must be >= 1")
    train, val = _load_split(opts)
    study = run_hpo(opts["rule"], opts, train, val)
    text = study.to_json(indent=2) + "\n"
    best = study.best
    summary = (f"best trial {best.trial_id}: val_accuracy={best.val_accuracy:.4f} "
               f"params={json.dumps(best.params, sort_keys=True)}")
    if opts["out"]:
        Path(opts["out"]).write_text(text, encoding="utf-8")
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    if opts["csv_out"]:
        Path(opts["csv_out"]).write_text(study.to_csv(), encoding="utf-8")
    return EXIT_OK


def markdown_table(report):
    lines = ["| Learning Rule | Accuracy (%) | Training Time (s) |",
             "|---|---:|---:|"]
    for row in report["rows"]:
        if row["status"] == "complete":
            lines.append(f"| {row['title']} | {row['accuracy_pct']:.2f} | {row['train_time_s']:.2f} |")
        else:
            lines.append(f"| {row['title']} | failed | - |")
    return "\n".join(lines) + "\n"


def bench_rows(opts, train, val, rules):
    rows = []
    for rule in rules:
        row = {"rule": rule, "title": RULE_TITLES[rule], "status": "complete", "best_params": None,
               "best_trial_id": None, "accuracy_pct": None, "train_time_s": None,
               "labels_queried": None, "error": None}
        try:
            study = run_hpo(rule, opts, train, val)
            best = study.best
            _, report = train_rule(rule, best.params, train, val, opts["epochs"], best.seed)
            row.update(best_params=best.params, best_trial_id=best.trial_id,
                       accuracy_pct=round(100.0 * report.final_val_accuracy, 2),
                       train_time_s=round(report.wall_time_seconds, 2),
                       labels_queried=report.labels_queried)
        except (LifnetError, ArithmeticError, ValueError) as exc:
            row.update(status="failed", error=f"{type(exc).__name__}: {exc}")
        rows.append(row)
    return rows


def cmd_bench(opts):
    rules = [r.strip() for r in str(opts["rules"]).split(",") if r.strip()]
    if not rules:
        raise UsageError("--rules is empty")
    for rule in rules:
        _check_rule(rule)
    train, val = _load_split(opts)
    rows = bench_rows(opts, train, val, rules)
    report = {
        "rows": rows,
        "settings": {k: opts[k] for k in ("trials", "epochs", "train_fraction", "params")},
        "environment": {
            "seed": opts["seed"],
            "machine": f"{platform.machine()} {platform.processor() or platform.system()}".strip(),
            "python": platform.python_version(),
            "numpy": np.__version__,
            "backend": _accel.get_backend(),
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
            "data": opts["data"] or "synthetic",
            "n_train": len(train),
            "n_val": len(val),
        },
    }
    table = markdown_table(report)
    sys.stdout.write(table)
    if opts["out"]:
        Path(opts["out"]).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    if opts["markdown_out"]:
        Path(opts["markdown_out"]).write_text(table, encoding="utf-8")
    if all(r["status"] == "failed" for r in rows):
        raise StudyError("every rule failed")
    return EXIT_OK


COMMANDS = {"gen-data": cmd_gen_data, "train": cmd_train, "eval": cmd_eval, "hpo": cmd_hpo,
            "bench": cmd_bench}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        opts, sources = resolve_options(args)
        for key in sorted(opts):
            _log(opts, f"[config] {key} = {opts[key]!r} ({sources.get(key, 'default')})")
        start = time.perf_counter()
        code = COMMANDS[args.command](opts)
        _log(opts, f"[done] {args.command} in {time.perf_counter() - start:.2f}s")
        return code
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (LifnetError, OSError, ArithmeticError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
