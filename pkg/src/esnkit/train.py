"""Closed-form readout training."""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ArgumentError, DimensionError, SingularSystemError
from .linalg import solve_regularized_ls


@dataclass(frozen=True, eq=False)
class ReadoutLayer:
    """Linear readout ``v = W_out @ z``."""

    W_out: np.ndarray
    lam: float = 0.0

    def __post_init__(self):
        W = np.ascontiguousarray(np.atleast_2d(self.W_out), dtype=np.float64)
        if not np.all(np.isfinite(W)):
            raise ArgumentError("readout has non-finite entries")
        object.__setattr__(self, "W_out", W)

    @property
    def feature_dim(self):
        return self.W_out.shape[1]

    @property
    def target_dim(self):
        return self.W_out.shape[0]

    def apply_tm(self, Z_tm):
        """Outputs for time-major features, one row per timestep."""
        Z_tm = np.ascontiguousarray(Z_tm, dtype=np.float64)
        if Z_tm.shape[1] != self.feature_dim:
            raise DimensionError(f"readout expects {self.feature_dim} features, got {Z_tm.shape[1]}")
        return kernels.readout_apply(self.W_out, Z_tm)

    def __call__(self, Z):
        """Outputs (m x T) for features (d x T), or a vector for a vector."""
        Z = np.asarray(Z, dtype=np.float64)
        if Z.ndim == 1:
            return self.apply_tm(Z[None, :])[0]
        return self.apply_tm(Z.T).T


def train_readout(features, targets, lam=1e-8, method="auto"):
    """Fit ``W_out`` by one regularized least-squares solve.

    ``features`` is a :class:`~esnkit.esn.StateMatrix` or a (d x T) array;
    ``targets`` is (m x T) with matching columns.
    """
    Z = getattr(features, "features", features)
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    Y = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    if Z.shape[1] != Y.shape[1]:
        raise ArgumentError(f"features have {Z.shape[1]} columns, targets have {Y.shape[1]}")
    try:
        W = solve_regularized_ls(Z, Y, lam, method=method)
    except SingularSystemError as exc:
        raise SingularSystemError(f"{exc} (set lambda to a small positive value such as 1e-8)") from exc
    return ReadoutLayer(W, lam)
