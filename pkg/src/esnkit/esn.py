"""Echo state network assembly and state collection.

The recurrence is the leaky integrator

    x(t) = (1 - a) * x(t-1) + a * f(W x(t-1) + W_in u(t))

with no bias term. A deep model stacks layers, each driven by the current
state of the layer below; a hybrid model concatenates the output of a
knowledge model onto both the reservoir drive and the raw state.

Public functions take and return (features x time) matrices. Internally
everything is time-major so that each timestep is a contiguous row.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from . import kernels
from .datasets import SeriesData
from .errors import ArgumentError, DimensionError, NumericOverflowError
from .layers import LayerSpec
from .linalg import make_rng, substreams
from .states import StateModifier

ACTIVATIONS = {"tanh": kernels.TANH, "identity": kernels.IDENTITY}
VARIANTS = ("standard", "deep", "hybrid")


@dataclass(frozen=True)
class KnowledgeModel:
    """Approximate one-step predictor used by the hybrid variant.

    ``fn`` maps an input vector u(t) to a prediction of the next input.
    ``name`` and ``params`` identify built-ins so models can be saved.
    """

    fn: Callable
    output_dim: int
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, u):
        y = np.asarray(self.fn(np.asarray(u, dtype=np.float64)), dtype=np.float64).reshape(-1)
        if y.shape[0] != self.output_dim:
            raise DimensionError(f"knowledge model returned {y.shape[0]} values, expected {self.output_dim}")
        return y

    def batch(self, U_tm):
        out = np.empty((U_tm.shape[0], self.output_dim))
        for t in range(U_tm.shape[0]):
            out[t] = self(U_tm[t])
        return out


def lorenz_knowledge(dt=0.02, sigma=10.0, rho=28.0, beta=8.0 / 3.0, eps=0.05):
    """One RK4 step of a Lorenz model whose ``rho`` is off by a factor ``1 + eps``."""
    from .kernels import _numpy

    r = rho * (1.0 + eps)

    def fn(u):
        return _numpy.lorenz_rk4(1, dt, sigma, r, beta, u)[1]

    params = {"dt": dt, "sigma": sigma, "rho": rho, "beta": beta, "eps": eps}
    return KnowledgeModel(fn, 3, "lorenz", params)


def persistence_knowledge(dim):
    return KnowledgeModel(lambda u: u, dim, "persistence", {"dim": dim})


KNOWLEDGE_MODELS = {
    "lorenz": lorenz_knowledge,
    "persistence": persistence_knowledge,
}


def knowledge_from_name(name, params):
    if name not in KNOWLEDGE_MODELS:
        raise ArgumentError(f"unknown knowledge model {name!r}; expected one of {sorted(KNOWLEDGE_MODELS)}")
    return KNOWLEDGE_MODELS[name](**params)


def _as_matrix(W):
    if sp.issparse(W):
        W = W.tocsr()
        W.sort_indices()
        if not np.all(np.isfinite(W.data)):
            raise ArgumentError("matrix has non-finite entries")
        return W
    W = np.ascontiguousarray(W, dtype=np.float64)
    if W.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {W.shape}")
    if not np.all(np.isfinite(W)):
        raise ArgumentError("matrix has non-finite entries")
    return W


@dataclass(frozen=True, eq=False)
class EsnModel:
    """Immutable assembled model.

    ``input_matrices[l]`` and ``reservoirs[l]`` belong to layer ``l``; the
    standard and hybrid variants have exactly one layer.
    """

    input_matrices: tuple
    reservoirs: tuple
    leak_rate: float = 1.0
    activation: str = "tanh"
    modifier: StateModifier = StateModifier()
    variant: str = "standard"
    knowledge: Optional[KnowledgeModel] = None

    def __post_init__(self):
        ins = tuple(np.ascontiguousarray(_as_matrix(w)) for w in self.input_matrices)
        res = tuple(_as_matrix(w) for w in self.reservoirs)
        object.__setattr__(self, "input_matrices", ins)
        object.__setattr__(self, "reservoirs", res)
        if self.variant not in VARIANTS:
            raise ArgumentError(f"unknown variant {self.variant!r}")
        if self.activation not in ACTIVATIONS:
            raise ArgumentError(f"unknown activation {self.activation!r}")
        if not 0.0 <= self.leak_rate <= 1.0:
            raise ArgumentError(f"leak rate must lie in [0, 1], got {self.leak_rate}")
        if not ins or len(ins) != len(res):
            raise ArgumentError("need one input matrix per reservoir")
        if self.variant != "deep" and len(res) != 1:
            raise ArgumentError(f"{self.variant} variant takes a single reservoir")
        if (self.variant == "hybrid") != (self.knowledge is not None):
            raise ArgumentError("a knowledge model is required for, and only for, the hybrid variant")
        prev = None
        for l, (Win, W) in enumerate(zip(ins, res)):
            n = W.shape[0]
            if W.shape != (n, n):
                raise DimensionError(f"layer {l} reservoir is not square: {W.shape}")
            if Win.shape[0] != n:
                raise DimensionError(f"layer {l} input matrix has {Win.shape[0]} rows, reservoir has {n}")
            if prev is not None and Win.shape[1] != prev:
                raise DimensionError(f"layer {l} expects {Win.shape[1]} inputs but layer {l - 1} has {prev} units")
            prev = n
        if self.variant == "hybrid" and ins[0].shape[1] <= self.knowledge.output_dim:
            raise DimensionError("hybrid input matrix must cover [u; knowledge output]")

    @classmethod
    def standard(cls, input_matrix, reservoir, **kw):
        return cls((input_matrix,), (reservoir,), variant="standard", **kw)

    @classmethod
    def deep(cls, input_matrices, reservoirs, **kw):
        return cls(tuple(input_matrices), tuple(reservoirs), variant="deep", **kw)

    @classmethod
    def hybrid(cls, input_matrix, reservoir, knowledge, **kw):
        return cls((input_matrix,), (reservoir,), variant="hybrid", knowledge=knowledge, **kw)

    @property
    def input_matrix(self):
        return self.input_matrices[0]

    @property
    def reservoir(self):
        return self.reservoirs[0]

    @property
    def n_layers(self):
        return len(self.reservoirs)

    @property
    def layer_sizes(self):
        return tuple(W.shape[0] for W in self.reservoirs)

    @property
    def state_dim(self):
        """Length of the recurrent state (all layers concatenated)."""
        return sum(self.layer_sizes)

    @property
    def raw_dim(self):
        """Length of the raw state handed to the modifier."""
        extra = self.knowledge.output_dim if self.knowledge is not None else 0
        return self.state_dim + extra

    @property
    def input_dim(self):
        D = self.input_matrix.shape[1]
        return D - self.knowledge.output_dim if self.knowledge is not None else D

    def with_modifier(self, modifier):
        return EsnModel(self.input_matrices, self.reservoirs, self.leak_rate, self.activation,
                        modifier, self.variant, self.knowledge)


def build_model(reservoir_size, input_dim, *, reservoir=None, input_layer=None, variant="standard",
                layers=1, leak_rate=1.0, activation="tanh", modifier=None, knowledge=None, seed=0):
    """Assemble a model from layer specs with seeds derived from ``seed``.

    ``reservoir`` and ``input_layer`` are :class:`LayerSpec` objects whose own
    seeds are ignored in favour of substreams of ``seed``. Defaults are a
    dense uniform input layer and a dense ``rand_sparse`` reservoir of
    spectral radius 1.25.
    """
    reservoir = reservoir or LayerSpec("rand_sparse", {"density": 1.0, "radius": 1.25})
    input_layer = input_layer or LayerSpec("dense_uniform", {"scaling": 1.0})
    modifier = modifier or StateModifier()
    if variant != "deep" and layers != 1:
        raise ArgumentError(f"layers={layers} requires the deep variant")
    if layers < 1:
        raise ArgumentError("layers must be >= 1")
    streams = substreams(make_rng(seed), 2 * layers)
    ins, res = [], []
    drive = input_dim + (knowledge.output_dim if variant == "hybrid" else 0)
    for l in range(layers):
        in_seed = int(streams[2 * l].integers(2**63))
        res_seed = int(streams[2 * l + 1].integers(2**63))
        ins.append(LayerSpec(input_layer.kind, input_layer.params, in_seed).build_input(reservoir_size, drive))
        res.append(LayerSpec(reservoir.kind, reservoir.params, res_seed).build_reservoir(reservoir_size))
        drive = reservoir_size
    return EsnModel(tuple(ins), tuple(res), leak_rate, activation, modifier, variant,
                    knowledge if variant == "hybrid" else None)


def _layer_rollout(W, Win, U_tm, x0, alpha, act, guard):
    if sp.issparse(W):
        return kernels.leaky_rollout_csr(W.indptr, W.indices, W.data, Win, U_tm, x0, alpha, act, guard)
    return kernels.leaky_rollout(W, Win, U_tm, x0, alpha, act, guard)


def _as_series_tm(model, inputs):
    values = inputs.values if isinstance(inputs, SeriesData) else inputs
    U = np.asarray(values, dtype=np.float64)
    if U.ndim == 1:
        U = U[None, :]
    if U.shape[0] != model.input_dim:
        raise DimensionError(f"model expects {model.input_dim} input variables, got {U.shape[0]}")
    return np.ascontiguousarray(U.T)


def _split_state(model, x):
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != model.state_dim:
        raise DimensionError(f"state has length {x.shape[0]}, model state is {model.state_dim}")
    bounds = np.cumsum((0,) + model.layer_sizes)
    return [np.ascontiguousarray(x[a:b]) for a, b in zip(bounds[:-1], bounds[1:])]


def run_reservoir(model, U_tm, x0=None, guard=np.inf):
    """Drive the model over time-major inputs.

    Returns ``(raw_tm, final_state)`` where ``raw_tm`` has one row per
    timestep holding the raw state (layers concatenated, then the knowledge
    output for hybrids) and ``final_state`` is the recurrent state after the
    last step.
    """
    if x0 is None:
        x0 = np.zeros(model.state_dim)
    starts = _split_state(model, x0)
    act = ACTIVATIONS[model.activation]
    drive = U_tm
    K = None
    if model.knowledge is not None:
        K = model.knowledge.batch(U_tm)
        drive = np.ascontiguousarray(np.hstack([U_tm, K]))
    blocks = []
    for l, (Win, W) in enumerate(zip(model.input_matrices, model.reservoirs)):
        X, bad = _layer_rollout(W, Win, drive, starts[l], model.leak_rate, act, guard)
        if bad >= 0:
            what = "non-finite" if not np.all(np.isfinite(X[bad])) else "diverging"
            raise NumericOverflowError(f"{what} reservoir state in layer {l}", int(bad))
        blocks.append(X)
        drive = X
    final = np.concatenate([b[-1] for b in blocks]) if U_tm.shape[0] else np.asarray(x0, dtype=np.float64).copy()
    if K is not None:
        blocks.append(K)
    raw = blocks[0] if len(blocks) == 1 else np.ascontiguousarray(np.hstack(blocks))
    return raw, final


def step(model, x, u):
    """One recurrence step from state ``x`` with input ``u``; returns the new state."""
    u = np.asarray(u, dtype=np.float64).reshape(1, -1)
    if u.shape[1] != model.input_dim:
        raise DimensionError(f"model expects {model.input_dim} inputs, got {u.shape[1]}")
    _, final = run_reservoir(model, np.ascontiguousarray(u), x)
    return final


@dataclass(frozen=True, eq=False)
class StateMatrix:
    """Modified states for the retained timesteps.

    ``features`` is (d_z, T_eff) and ``raw_states`` is (raw_dim, T_eff);
    ``final_state`` and ``final_input`` are the recurrent state and input at
    the last timestep, the starting point for generative prediction.
    """

    features: np.ndarray
    raw_states: np.ndarray
    washout: int
    final_state: np.ndarray
    final_input: np.ndarray

    @property
    def n_steps(self):
        return self.features.shape[1]


def collect_states(model, inputs, washout=0, x0=None):
    """Run the model over ``inputs`` (D x T) and modify the retained states."""
    U_tm = _as_series_tm(model, inputs)
    T = U_tm.shape[0]
    if not 0 <= washout < T:
        raise ArgumentError(f"washout must lie in [0, {T}), got {washout}")
    raw, final = run_reservoir(model, U_tm, x0)
    raw = raw[washout:]
    feats = model.modifier.apply(raw, U_tm[washout:])
    return StateMatrix(feats.T, raw.T, washout, final, U_tm[-1].copy())


def output_dimension(model, modifier=None):
    """Feature length the readout sees for ``model`` (optionally another modifier)."""
    modifier = modifier or model.modifier
    return modifier.feature_length(model.raw_dim, model.input_dim)
