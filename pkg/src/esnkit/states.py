"""State-to-feature maps applied before training and before every readout.

Vectors may also be passed as time-major 2-D arrays (rows are timesteps);
all maps act row by row, so batched and single-step calls agree bitwise.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DimensionError

BASES = ("default", "extended", "padded", "padded_extended")
NONLINEAR = ("none", "nlat1", "nlat2", "nlat3")


def nonlinear_transform(variant, z):
    """Apply one of the ``nlat`` feature transforms.

    With 1-based positions: ``nlat1`` squares odd positions; ``nlat2`` sets
    even positions i >= 4 to ``z[i-1] * z[i-2]``; ``nlat3`` sets even
    positions 2 <= i <= len-1 to ``z[i-1] * z[i+1]``. Right-hand sides
    always read the untransformed vector.
    """
    z = np.asarray(z, dtype=np.float64)
    n = z.shape[-1]
    if variant == "none":
        return z
    if variant not in NONLINEAR:
        raise ArgumentError(f"unknown nonlinear transform {variant!r}")
    if variant != "nlat1" and n < 3:
        raise ArgumentError(f"{variant} needs at least 3 features, got {n}")
    out = z.copy()
    # 0-based: odd 1-based positions are even indices
    if variant == "nlat1":
        out[..., 0::2] = z[..., 0::2] ** 2
    elif variant == "nlat2":
        idx = np.arange(3, n, 2)
        out[..., idx] = z[..., idx - 1] * z[..., idx - 2]
    else:
        idx = np.arange(1, n - 1, 2)
        out[..., idx] = z[..., idx - 1] * z[..., idx + 1]
    return out


@dataclass(frozen=True)
class StateModifier:
    base: str = "default"
    nonlinear: str = "none"
    pad: float = 1.0

    def __post_init__(self):
        if self.base not in BASES:
            raise ArgumentError(f"unknown modifier {self.base!r}; expected one of {BASES}")
        if self.nonlinear not in NONLINEAR:
            raise ArgumentError(f"unknown nonlinear transform {self.nonlinear!r}")
        if not np.isfinite(self.pad):
            raise ArgumentError("pad value must be finite")

    @property
    def uses_input(self):
        return self.base in ("extended", "padded_extended")

    @property
    def padded(self):
        return self.base in ("padded", "padded_extended")

    def feature_length(self, state_dim, input_dim):
        return state_dim + int(self.padded) + (input_dim if self.uses_input else 0)

    def apply(self, x, u):
        """Feature vector(s) z from state(s) ``x`` and input(s) ``u``."""
        x = np.asarray(x, dtype=np.float64)
        u = np.asarray(u, dtype=np.float64)
        if x.ndim != u.ndim or (x.ndim == 2 and x.shape[0] != u.shape[0]):
            raise DimensionError(f"state shape {x.shape} does not pair with input shape {u.shape}")
        parts = [x]
        if self.padded:
            parts.insert(0, np.full(x.shape[:-1] + (1,), self.pad))
        if self.uses_input:
            parts.append(u)
        z = np.concatenate(parts, axis=-1) if len(parts) > 1 else x.copy()
        return nonlinear_transform(self.nonlinear, z)


def apply_modifier(modifier, x, u):
    return modifier.apply(x, u)
