"""Versioned text container for trained models.

Layout::

    RCMODEL 1
    meta <n>                      n lines of "key value"
    modifier 3                    base / nonlinear / pad
    input_matrix <l> <rows> <cols>    rows of values
    reservoir <l> dense <n> <n>       rows of values
    reservoir <l> csr <n> <n> <nnz>   nnz lines "row col value"
    readout <rows> <cols>
    final_state <n>               one line
    final_input <d>               one line
    end

Floats are written with 17 significant digits so save -> load -> save is
byte-identical.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ModelFormatError
from .esn import EsnModel, knowledge_from_name
from .states import StateModifier
from .train import ReadoutLayer

MAGIC = "RCMODEL 1"


def _f(v):
    return "%.17g" % v


def _row(values):
    return " ".join(_f(v) for v in values)


@dataclass(frozen=True, eq=False)
class SavedModel:
    model: EsnModel
    readout: ReadoutLayer
    final_state: np.ndarray
    final_input: np.ndarray
    meta: dict


def dumps(model, readout, final_state, final_input, meta=None):
    """Serialize; ``meta`` holds extra string-valued fields (digest, names)."""
    meta = dict(meta or {})
    base = {
        "variant": model.variant,
        "layers": str(model.n_layers),
        "leak_rate": _f(model.leak_rate),
        "activation": model.activation,
        "lambda": _f(readout.lam),
    }
    if model.knowledge is not None:
        if model.knowledge.name == "custom":
            raise ValueError("custom knowledge models cannot be serialized; use a registered one")
        base["knowledge"] = model.knowledge.name
        for k, v in sorted(model.knowledge.params.items()):
            base[f"knowledge.{k}"] = _f(v) if isinstance(v, float) else str(v)
    for k, v in meta.items():
        if any(c.isspace() for c in k) or "\n" in str(v):
            raise ValueError(f"meta entry {k!r} must be a single token key and single-line value")
        base[k] = str(v)
    out = [MAGIC, f"meta {len(base)}"]
    out += [f"{k} {v}" for k, v in base.items()]
    mod = model.modifier
    out += ["modifier 3", f"base {mod.base}", f"nonlinear {mod.nonlinear}", f"pad {_f(mod.pad)}"]
    for l, (Win, W) in enumerate(zip(model.input_matrices, model.reservoirs)):
        out.append(f"input_matrix {l} {Win.shape[0]} {Win.shape[1]}")
        out += [_row(r) for r in Win]
        if sp.issparse(W):
            coo = W.tocoo()
            out.append(f"reservoir {l} csr {W.shape[0]} {W.shape[1]} {coo.nnz}")
            out += [f"{i} {j} {_f(v)}" for i, j, v in zip(coo.row, coo.col, coo.data)]
        else:
            out.append(f"reservoir {l} dense {W.shape[0]} {W.shape[1]}")
            out += [_row(r) for r in W]
    out.append(f"readout {readout.W_out.shape[0]} {readout.W_out.shape[1]}")
    out += [_row(r) for r in readout.W_out]
    fs = np.asarray(final_state, dtype=np.float64).ravel()
    fi = np.asarray(final_input, dtype=np.float64).ravel()
    out += [f"final_state {fs.size}", _row(fs), f"final_input {fi.size}", _row(fi), "end"]
    return "\n".join(out) + "\n"


class _Reader:
    def __init__(self, text):
        self.lines = text.split("\n")
        self.pos = 0

    def next(self, section):
        if self.pos >= len(self.lines):
            raise ModelFormatError("unexpected end of file", section)
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def header(self, name):
        parts = self.next(name).split()
        if not parts or parts[0] != name:
            raise ModelFormatError(f"expected block header {name!r}, got {' '.join(parts[:1]) or 'blank line'!r}", name)
        return parts[1:]

    def ints(self, parts, count, section):
        if len(parts) != count:
            raise ModelFormatError("malformed block header", section)
        try:
            return [int(p) for p in parts]
        except ValueError:
            raise ModelFormatError("non-integer dimension", section) from None

    def matrix(self, rows, cols, section):
        M = np.empty((rows, cols))
        for i in range(rows):
            M[i] = self.vector(cols, section)
        return M

    def vector(self, n, section):
        parts = self.next(section).split()
        if len(parts) != n:
            raise ModelFormatError(f"expected {n} values, got {len(parts)}", section)
        try:
            v = np.array([float(p) for p in parts])
        except ValueError:
            raise ModelFormatError("unparseable number", section) from None
        if not np.all(np.isfinite(v)):
            raise ModelFormatError("non-finite value", section)
        return v


def loads(text):
    r = _Reader(text)
    if r.next("magic") != MAGIC:
        raise ModelFormatError(f"missing {MAGIC!r} header", "magic")
    (n_meta,) = r.ints(r.header("meta"), 1, "meta")
    meta = {}
    for _ in range(n_meta):
        k, _, v = r.next("meta").partition(" ")
        meta[k] = v
    for key in ("variant", "layers", "leak_rate", "activation", "lambda"):
        if key not in meta:
            raise ModelFormatError(f"missing key {key!r}", "meta")
    r.header("modifier")
    try:
        mod_fields = dict(r.next("modifier").split(" ", 1) for _ in range(3))
        modifier = StateModifier(mod_fields["base"], mod_fields["nonlinear"], float(mod_fields["pad"]))
    except (ValueError, KeyError) as exc:
        raise ModelFormatError(str(exc), "modifier") from None
    try:
        layers = int(meta["layers"])
    except ValueError:
        raise ModelFormatError("layers is not an integer", "meta") from None
    ins, res = [], []
    for l in range(layers):
        _, rows, cols = r.ints(r.header("input_matrix"), 3, "input_matrix")
        ins.append(r.matrix(rows, cols, "input_matrix"))
        parts = r.header("reservoir")
        if len(parts) < 2 or parts[1] not in ("dense", "csr"):
            raise ModelFormatError("unknown storage kind", "reservoir")
        if parts[1] == "dense":
            _, rows, cols = r.ints([parts[0]] + parts[2:], 3, "reservoir")
            res.append(r.matrix(rows, cols, "reservoir"))
        else:
            _, rows, cols, nnz = r.ints([parts[0]] + parts[2:], 4, "reservoir")
            trip = [r.next("reservoir").split() for _ in range(nnz)]
            try:
                i = np.array([int(t[0]) for t in trip], dtype=np.int64)
                j = np.array([int(t[1]) for t in trip], dtype=np.int64)
                v = np.array([float(t[2]) for t in trip])
            except (ValueError, IndexError):
                raise ModelFormatError("malformed triplet", "reservoir") from None
            res.append(sp.csr_matrix((v, (i, j)), shape=(rows, cols)))
    rows, cols = r.ints(r.header("readout"), 2, "readout")
    W_out = r.matrix(rows, cols, "readout")
    (n,) = r.ints(r.header("final_state"), 1, "final_state")
    final_state = r.vector(n, "final_state")
    (d,) = r.ints(r.header("final_input"), 1, "final_input")
    final_input = r.vector(d, "final_input")
    if r.next("end") != "end":
        raise ModelFormatError("missing end marker", "end")

    knowledge = None
    if "knowledge" in meta:
        params = {k.split(".", 1)[1]: v for k, v in meta.items() if k.startswith("knowledge.")}
        params = {k: (int(v) if k == "dim" else float(v)) for k, v in params.items()}
        try:
            knowledge = knowledge_from_name(meta["knowledge"], params)
        except Exception as exc:
            raise ModelFormatError(str(exc), "meta") from None
    try:
        model = EsnModel(tuple(ins), tuple(res), float(meta["leak_rate"]), meta["activation"],
                         modifier, meta["variant"], knowledge)
        readout = ReadoutLayer(W_out, float(meta["lambda"]))
    except Exception as exc:
        raise ModelFormatError(str(exc), "model") from None
    extra = {k: v for k, v in meta.items()
             if k not in ("variant", "layers", "leak_rate", "activation", "lambda", "knowledge")
             and not k.startswith("knowledge.")}
    return SavedModel(model, readout, final_state, final_input, extra)


def save(path, model, readout, final_state, final_input, meta=None):
    text = dumps(model, readout, final_state, final_input, meta)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
