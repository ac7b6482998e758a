"""Command-line entry point: ``esnkit {generate,bench,train,predict}``.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
Diagnostics go to stderr; data goes to ``--out`` (or stdout for ``-``).
"""
import argparse
import csv
import io
import logging
import sys

import numpy as np

from . import bench, container, datasets
from .config import load_config
from .errors import ArgumentError, ConfigError, EsnError
from .esn import build_model, collect_states, knowledge_from_name
from .predict import predict_generative, predict_predictive
from .train import train_readout

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

logger = logging.getLogger("esnkit")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _write(out, text):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _sizes(text):
    try:
        sizes = [int(s) for s in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def cmd_generate(args):
    if args.system == "mackey-glass":
        kw = {k: getattr(args, k) for k in ("tau", "dt", "beta", "gamma", "n", "x0", "discard")
              if getattr(args, k) is not None}
        if args.interpolation:
            kw["interpolation"] = args.interpolation
        if args.subsample:
            kw["subsample"] = args.subsample
    else:
        kw = {k: getattr(args, k) for k in ("dt", "sigma", "rho", "beta", "discard") if getattr(args, k) is not None}
        if args.u0 is not None:
            kw["u0"] = args.u0
    series = datasets.SYSTEMS[args.system](args.length, **kw)
    _write(args.out, series.to_csv())
    return EXIT_OK


def cmd_bench(args):
    config = load_config(args.config)
    base = args.seed if args.seed is not None else config["model"]["seed"]
    seeds = [base + k for k in range(args.n_seeds)]
    records = bench.run_bench(config, args.sizes, seeds)
    _write(args.out, bench.report_csv(records))
    sys.stderr.write(bench.summary(config, records))
    return EXIT_OK


def _model_from_config(config, input_dim):
    m = config["model"]
    knowledge = None
    if m["variant"] == "hybrid":
        knowledge = knowledge_from_name(m["knowledge"], config.knowledge_params(input_dim))
    return build_model(
        m["reservoir_size"], input_dim,
        reservoir=config.reservoir_spec(), input_layer=config.input_spec(),
        variant=m["variant"], layers=m["layers"], leak_rate=m["leak_rate"],
        activation=m["activation"], modifier=config.modifier(), knowledge=knowledge, seed=m["seed"],
    )


def cmd_train(args):
    config = load_config(args.config)
    if args.seed is not None:
        config = config.replace("model", seed=args.seed)
    if config["data"]["standardize"]:
        raise ConfigError("standardization is only supported by bench; standardize the CSV beforehand",
                          "data.standardize")
    series = datasets.SeriesData.from_csv(args.data)
    train_len = config["train"]["train_len"]
    washout = config["model"]["washout"]
    if len(series) < train_len + 1:
        raise ConfigError(f"data has {len(series)} rows, need train_len + 1 = {train_len + 1}", "train.train_len")
    inputs, targets, _, _ = datasets.next_step_pairs(series, train_len, 0)
    model = _model_from_config(config, series.dim)
    states = collect_states(model, inputs, washout=washout)
    readout = train_readout(states, targets[:, washout:], config["train"]["lambda"], config["train"]["method"])
    meta = {
        "config_digest": config.digest(),
        "washout": str(washout),
        "variables": ",".join(series.variables),
    }
    container.save(args.out, model, readout, states.final_state, states.final_input, meta)
    return EXIT_OK


def _outputs_csv(names, outputs):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in outputs.T:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def cmd_predict(args):
    saved = container.load(args.model)
    model, readout = saved.model, saved.readout
    names = saved.meta.get("variables", "").split(",")
    if len(names) != readout.target_dim:
        names = [f"y{i}" for i in range(readout.target_dim)]
    if args.mode == "generative":
        if args.steps is None:
            raise UsageError("generative mode needs --steps")
        run = predict_generative(model, readout, saved.final_state, saved.final_input, args.steps)
    else:
        if args.data is None:
            raise UsageError("predictive mode needs --data")
        series = datasets.SeriesData.from_csv(args.data)
        x0 = saved.final_state if args.start == "final" else np.zeros(model.state_dim)
        run = predict_predictive(model, readout, x0, series)
    _write(args.out, _outputs_csv(names, run.outputs))
    return EXIT_OK


def build_parser():
    p = _Parser(prog="esnkit", description="Echo state network toolkit.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a dynamical-system series as CSV")
    g.add_argument("--system", required=True, choices=sorted(datasets.SYSTEMS))
    g.add_argument("--length", required=True, type=int)
    g.add_argument("--out", default="-")
    g.add_argument("--dt", type=float)
    g.add_argument("--discard", type=int)
    g.add_argument("--beta", type=float)
    g.add_argument("--tau", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--n", type=float)
    g.add_argument("--x0", type=float)
    g.add_argument("--interpolation", choices=("linear", "hermite"))
    g.add_argument("--subsample", type=int)
    g.add_argument("--sigma", type=float)
    g.add_argument("--rho", type=float)
    g.add_argument("--u0", type=float, nargs=3)
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="time train + predict across reservoir sizes")
    b.add_argument("--config")
    b.add_argument("--sizes", type=_sizes, default=list(bench.DEFAULT_SIZES))
    b.add_argument("--seed", type=int)
    b.add_argument("--n-seeds", type=int, default=1)
    b.add_argument("--out", default="-")
    b.set_defaults(func=cmd_bench)

    t = sub.add_parser("train", help="train a model on a CSV series")
    t.add_argument("--data", required=True)
    t.add_argument("--config")
    t.add_argument("--seed", type=int)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    r = sub.add_parser("predict", help="run a saved model")
    r.add_argument("--model", required=True)
    r.add_argument("--mode", choices=("generative", "predictive"), default="predictive")
    r.add_argument("--steps", type=int)
    r.add_argument("--data")
    r.add_argument("--start", choices=("final", "zero"), default="final",
                   help="predictive start state: end of training, or zeros")
    r.add_argument("--out", default="-")
    r.set_defaults(func=cmd_predict)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, ArgumentError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (EsnError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
