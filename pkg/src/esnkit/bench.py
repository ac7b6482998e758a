"""Next-step prediction benchmark over a sweep of reservoir sizes.

Each record times the training phase (state collection plus the readout
solve) and the prediction phase separately with ``time.perf_counter``;
matrix generation is outside both timers. Reported total is their sum.
"""
import csv
import io
import time
from dataclasses import dataclass

import numpy as np

from . import datasets
from .errors import EsnError
from .esn import build_model, collect_states, knowledge_from_name
from .predict import predict_predictive
from .train import train_readout

COLUMNS = ("size", "seed", "train_time_s", "predict_time_s", "total_time_s", "mse", "nrmse")
DEFAULT_SIZES = (100, 300, 500, 1000)


@dataclass(frozen=True)
class BenchRecord:
    size: object  # int, or "persistence" for the baseline row
    seed: object
    train_time_s: float
    predict_time_s: float
    total_time_s: float
    mse: float
    nrmse: float
    digest: str = ""
    error: str = ""

    @property
    def failed(self):
        return bool(self.error)


def nrmse(pred, target):
    """RMSE over all entries divided by the std of the targets."""
    mse = float(np.mean((pred - target) ** 2))
    return mse, float(np.sqrt(mse) / np.std(target))


def make_series(config):
    d = config["data"]
    tr, pr = config["train"]["train_len"], config["predict"]["predict_len"]
    gen = datasets.SYSTEMS[d["system"]]
    return gen(tr + pr + 1, **config.system_params())


def split(config, series):
    tr, pr = config["train"]["train_len"], config["predict"]["predict_len"]
    parts = datasets.next_step_pairs(series, tr, pr)
    if config["data"]["standardize"]:
        parts = datasets.standardize(*parts)
    return parts


def persistence_record(test_inputs, test_targets):
    """Baseline predicting the next value as the current one."""
    mse, score = nrmse(test_inputs, test_targets)
    return BenchRecord("persistence", "", 0.0, 0.0, 0.0, mse, score)


def _model_for(config, size, seed, input_dim):
    m = config["model"]
    knowledge = None
    if m["variant"] == "hybrid":
        knowledge = knowledge_from_name(m["knowledge"], config.knowledge_params(input_dim))
    return build_model(
        size, input_dim,
        reservoir=config.reservoir_spec(), input_layer=config.input_spec(),
        variant=m["variant"], layers=m["layers"], leak_rate=m["leak_rate"],
        activation=m["activation"], modifier=config.modifier(), knowledge=knowledge, seed=seed,
    )


def warm_up(config, parts):
    """Run a tiny model once so JIT compilation stays out of the timings."""
    U, Y = parts[0][:, :16], parts[1][:, :16]
    try:
        model = _model_for(config.replace("model", washout=0), 8, 0, U.shape[0])
        st = collect_states(model, U)
        ro = train_readout(st, Y, 1e-6)
        predict_predictive(model, ro, st.final_state, U)
    except EsnError:
        pass


def run_one(config, size, seed, parts):
    """Build, train and predict once; numeric failures are recorded, not raised."""
    tr_in, tr_tg, te_in, te_tg = parts
    washout = config["model"]["washout"]
    lam = config["train"]["lambda"]
    digest = config.digest()
    try:
        model = _model_for(config, size, seed, tr_in.shape[0])
        t0 = time.perf_counter()
        states = collect_states(model, tr_in, washout=washout)
        readout = train_readout(states, tr_tg[:, washout:], lam, method=config["train"]["method"])
        t1 = time.perf_counter()
        run = predict_predictive(model, readout, states.final_state, te_in)
        t2 = time.perf_counter()
    except (EsnError, np.linalg.LinAlgError) as exc:
        nan = float("nan")
        return BenchRecord(size, seed, nan, nan, nan, nan, nan, digest, f"{type(exc).__name__}: {exc}")
    train_s, predict_s = t1 - t0, t2 - t1
    mse, score = nrmse(run.outputs, te_tg)
    return BenchRecord(size, seed, train_s, predict_s, train_s + predict_s, mse, score, digest)


def run_bench(config, sizes=DEFAULT_SIZES, seeds=(0,)):
    """Records ordered by size then seed, followed by the persistence baseline."""
    series = make_series(config)
    parts = split(config, series)
    warm_up(config, parts)
    records = [run_one(config, size, seed, parts) for size in sorted(sizes) for seed in seeds]
    records.append(persistence_record(parts[2], parts[3]))
    return records


def _cell(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def report_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        w.writerow([_cell(getattr(r, c)) for c in COLUMNS])
    return buf.getvalue()


def summary(config, records):
    """Human-readable summary, including every assumed (unpinned) setting."""
    d, m = config["data"], config["model"]
    lines = [
        f"config digest {config.digest()}",
        f"task: next-step prediction, system={d['system']}, "
        f"train_len={config['train']['train_len']}, predict_len={config['predict']['predict_len']}, "
        f"lambda={config['train']['lambda']!r}",
        "assumed settings (not fixed by the benchmark protocol): "
        + ", ".join(f"{k}={v!r}" for k, v in sorted(config.system_params().items()) if k != "tau")
        + f", standardize={d['standardize']}, leak_rate={m['leak_rate']!r}, washout={m['washout']}, "
        "reservoir sizes chosen by the harness",
    ]
    base = next((r for r in records if r.size == "persistence"), None)
    for r in records:
        if r.size == "persistence":
            continue
        if r.failed:
            lines.append(f"size {r.size:>5} seed {r.seed}: FAILED ({r.error})")
            continue
        gain = f", {base.nrmse / r.nrmse:.0f}x better than persistence" if base and r.nrmse > 0 else ""
        lines.append(
            f"size {r.size:>5} seed {r.seed}: train {r.train_time_s:.3f}s + predict {r.predict_time_s:.3f}s "
            f"= {r.total_time_s:.3f}s, nrmse {r.nrmse:.3e}{gain}"
        )
    if base is not None:
        lines.append(f"persistence baseline: nrmse {base.nrmse:.3e}")
    return "\n".join(lines) + "\n"
