"""Generative (closed-loop) and predictive (open-loop) inference."""
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DimensionError, NumericOverflowError
from .esn import _as_series_tm, _split_state, run_reservoir

#: Generative runs abort once any state component exceeds this magnitude.
OVERFLOW_GUARD = 1e6


@dataclass(frozen=True, eq=False)
class PredictionRun:
    mode: str
    outputs: np.ndarray
    final_state: np.ndarray
    final_input: np.ndarray

    @property
    def n_steps(self):
        return self.outputs.shape[1]


def _check_readout(model, readout):
    d = model.modifier.feature_length(model.raw_dim, model.input_dim)
    if readout.feature_dim != d:
        raise DimensionError(f"readout expects {readout.feature_dim} features, model produces {d}")


def _raw_state(model, x, u):
    if model.knowledge is None:
        return x
    return np.concatenate([x, model.knowledge(u)])


def predict_generative(model, readout, x_start, u_start, steps, teacher=None):
    """Run the model autonomously for ``steps`` outputs.

    Each iteration emits ``v = W_out z(x, u)``, records it, then advances
    the state with ``v`` as the next input. ``x_start`` must already be the
    state driven by ``u_start`` (e.g. the final training state and input).
    ``teacher`` (D x steps) replaces the fed-back outputs with given inputs.
    """
    if steps < 1:
        raise ArgumentError(f"steps must be >= 1, got {steps}")
    _check_readout(model, readout)
    D = model.input_dim
    if readout.target_dim != D:
        raise DimensionError(
            f"closed loop needs readout outputs ({readout.target_dim}) to match model inputs ({D})"
        )
    x = np.concatenate(_split_state(model, x_start))
    u = np.asarray(u_start, dtype=np.float64).reshape(-1)
    if u.shape[0] != D:
        raise DimensionError(f"u_start has length {u.shape[0]}, model expects {D}")
    if teacher is not None:
        teacher = np.ascontiguousarray(np.atleast_2d(teacher).T, dtype=np.float64)
        if teacher.shape != (steps, D):
            raise DimensionError(f"teacher must be ({D}, {steps})")
    out = np.empty((steps, readout.target_dim))
    for k in range(steps):
        z = model.modifier.apply(_raw_state(model, x, u), u)
        v = readout.apply_tm(z[None, :])[0]
        if not np.all(np.isfinite(v)):
            raise NumericOverflowError("non-finite generative output", k)
        out[k] = v
        u = v if teacher is None else teacher[k]
        try:
            _, x = run_reservoir(model, np.ascontiguousarray(u[None, :]), x, guard=OVERFLOW_GUARD)
        except NumericOverflowError:
            raise NumericOverflowError("generative state diverged", k) from None
    return PredictionRun("generative", out.T, x, u.copy())


def predict_predictive(model, readout, x_start, inputs):
    """Drive the model with the given inputs and emit one output per input."""
    _check_readout(model, readout)
    U_tm = _as_series_tm(model, inputs)
    if U_tm.shape[0] < 1:
        raise ArgumentError("need at least one input")
    raw, final = run_reservoir(model, U_tm, x_start)
    Z_tm = model.modifier.apply(raw, U_tm)
    V = readout.apply_tm(np.ascontiguousarray(Z_tm))
    return PredictionRun("predictive", V.T, final, U_tm[-1].copy())
