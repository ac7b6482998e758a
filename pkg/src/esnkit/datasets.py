"""Deterministic dynamical-system generators and next-step windowing."""
import csv
import io
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ArgumentError


@dataclass(frozen=True, eq=False)
class SeriesData:
    """Multivariate series stored as (variables x timesteps)."""

    values: np.ndarray
    dt: float = 1.0
    name: str = "series"
    variables: tuple = ()

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[1] < 1:
            raise ArgumentError(f"series must be (D, T) with T >= 1, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ArgumentError("series contains non-finite values")
        if not self.dt > 0:
            raise ArgumentError(f"dt must be positive, got {self.dt}")
        object.__setattr__(self, "values", v)
        if not self.variables:
            names = ("x",) if v.shape[0] == 1 else tuple(f"x{i}" for i in range(v.shape[0]))
            object.__setattr__(self, "variables", names)
        elif len(self.variables) != v.shape[0]:
            raise ArgumentError("one variable name per row required")

    @property
    def dim(self):
        return self.values.shape[0]

    def __len__(self):
        return self.values.shape[1]

    def to_csv(self, path=None):
        """Header of variable names, then one row per timestep.

        Floats are written with ``repr`` so they parse back exactly.
        """
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.variables)
        for row in self.values.T:
            w.writerow([repr(float(v)) for v in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path, dt=1.0, name=None):
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
        if len(rows) < 2:
            raise ArgumentError(f"{path}: need a header and at least one data row")
        header, body = rows[0], rows[1:]
        try:
            values = np.array([[float(v) for v in r] for r in body], dtype=np.float64)
        except ValueError as exc:
            raise ArgumentError(f"{path}: {exc}") from None
        if values.shape[1] != len(header):
            raise ArgumentError(f"{path}: ragged rows")
        return cls(values.T, dt, name or str(path), tuple(header))


def _positive(**kw):
    for k, v in kw.items():
        if not v > 0:
            raise ArgumentError(f"{k} must be positive, got {v}")


def mackey_glass(length, tau=17.0, dt=0.1, beta=0.2, gamma=0.1, n=10.0, x0=1.2,
                 discard=1000, interpolation="linear", subsample=1):
    """Mackey-Glass series integrated with fixed-step RK4.

    The delay is ``round(tau / dt)`` steps. Samples are taken every
    ``subsample`` integration steps after dropping the first ``discard``
    samples. ``interpolation="hermite"`` uses cubic Hermite delay values at
    stage midpoints, which restores fourth-order convergence.
    """
    _positive(length=length, tau=tau, dt=dt, beta=beta, gamma=gamma, n=n, subsample=subsample)
    if discard < 0:
        raise ArgumentError(f"discard must be >= 0, got {discard}")
    if interpolation not in ("linear", "hermite"):
        raise ArgumentError(f"unknown interpolation {interpolation!r}")
    lag = int(round(tau / dt))
    if lag < 1:
        raise ArgumentError(f"tau/dt rounds to {lag}; need a delay of at least one step")
    total = (discard + length - 1) * subsample
    x = kernels.mackey_glass_rk4(total, lag, float(dt), float(beta), float(gamma), float(n),
                                 float(x0), interpolation == "hermite")
    x = x[discard * subsample::subsample]
    return SeriesData(x[None, :length], dt * subsample, "mackey-glass", ("x",))


def lorenz(length, dt=0.02, sigma=10.0, rho=28.0, beta=8.0 / 3.0, u0=(1.0, 0.0, 0.0), discard=500):
    """Lorenz system integrated with classical RK4."""
    _positive(length=length, dt=dt)
    if discard < 0:
        raise ArgumentError(f"discard must be >= 0, got {discard}")
    u0 = np.asarray(u0, dtype=np.float64)
    if u0.shape != (3,):
        raise ArgumentError("u0 must have 3 components")
    out = kernels.lorenz_rk4(discard + length - 1, float(dt), float(sigma), float(rho), float(beta), u0)
    return SeriesData(out[discard:].T, dt, "lorenz", ("x", "y", "z"))


SYSTEMS = {"mackey-glass": mackey_glass, "lorenz": lorenz}


def next_step_pairs(series, train_len, predict_len):
    """Split into one-step-ahead (input, target) blocks.

    Training inputs are columns ``[0, train_len)`` with targets shifted by
    one; the test block starts right after, at column ``train_len``.
    """
    V = series.values if isinstance(series, SeriesData) else np.atleast_2d(series)
    if train_len < 1 or predict_len < 0:
        raise ArgumentError("train_len must be >= 1 and predict_len >= 0")
    need = train_len + predict_len + 1
    if V.shape[1] < need:
        raise ArgumentError(f"series has {V.shape[1]} samples, need {need}")
    a, b = train_len, train_len + predict_len
    return V[:, :a], V[:, 1:a + 1], V[:, a:b], V[:, a + 1:b + 1]


def standardize(train, *others):
    """Scale by the training block's per-variable mean and std."""
    mu = train.mean(axis=1, keepdims=True)
    sd = train.std(axis=1, keepdims=True)
    sd[sd == 0] = 1.0
    return tuple((a - mu) / sd for a in (train,) + others)
