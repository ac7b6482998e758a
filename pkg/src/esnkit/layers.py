"""Input-layer and reservoir constructors.

Every constructor is a pure function of its arguments; the ``rng`` argument
accepts either a seed or a ``numpy.random.Generator``. The string kinds in
:data:`INPUT_KINDS` and :data:`RESERVOIR_KINDS` are the config vocabulary.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, CannotRescaleError
from .linalg import make_rng, rescale_spectral_radius, sparse_uniform, substreams

INPUT_KINDS = ("dense_uniform", "weighted", "minimal")
RESERVOIR_KINDS = ("rand_sparse", "simple_cycle", "delay_line", "delay_line_backward", "pseudo_svd")


def _check_dims(res_size, in_size):
    if res_size < 1 or in_size < 1:
        raise ArgumentError(f"dimensions must be positive, got res_size={res_size}, in_size={in_size}")


def _check_scaling(scaling):
    if not scaling > 0:
        raise ArgumentError(f"scaling must be positive, got {scaling}")


def dense_uniform_input(res_size, in_size, scaling=1.0, rng=0):
    """Entries i.i.d. uniform on ``[-scaling, scaling]``."""
    _check_dims(res_size, in_size)
    _check_scaling(scaling)
    return make_rng(rng).uniform(-scaling, scaling, size=(res_size, in_size))


def weighted_input(res_size, in_size, scaling=1.0, rng=0):
    """One nonzero per row; rows are split into contiguous per-input groups.

    Group size is ``res_size // in_size``; leftover rows join the last group.
    """
    _check_dims(res_size, in_size)
    _check_scaling(scaling)
    if res_size < in_size:
        raise ArgumentError(f"weighted input needs res_size >= in_size ({res_size} < {in_size})")
    group = res_size // in_size
    cols = np.minimum(np.arange(res_size) // group, in_size - 1)
    W = np.zeros((res_size, in_size))
    W[np.arange(res_size), cols] = make_rng(rng).uniform(-scaling, scaling, size=res_size)
    return W


def pi_sign_bits(count):
    """Binary sequence from the decimal digits of pi (digit >= 5 -> 1)."""
    import mpmath

    with mpmath.workdps(count + 10):
        digits = mpmath.nstr(mpmath.pi, count + 5, strip_zeros=False).replace(".", "")
    return np.array([int(d) >= 5 for d in digits[:count]], dtype=np.int8)


def minimal_input(res_size, in_size, weight=0.1, signs=None, rng=0):
    """All entries ``+weight`` or ``-weight``.

    ``signs`` is an optional binary sequence read row-major (0 -> minus,
    1 -> plus). Without it the signs are fair coin flips from ``rng``.
    """
    _check_dims(res_size, in_size)
    if not weight > 0:
        raise ArgumentError(f"weight must be positive, got {weight}")
    count = res_size * in_size
    if signs is None:
        bits = make_rng(rng).random(count) < 0.5
    else:
        bits = np.asarray(signs).ravel()
        if bits.size < count:
            raise ArgumentError(f"sign sequence has {bits.size} entries, need {count}")
        bits = bits[:count] != 0
    return np.where(bits, weight, -weight).reshape(res_size, in_size).astype(np.float64)


def rand_sparse_reservoir(size, density=1.0, radius=1.25, rng=0, attempts=3):
    """Uniform ``[-1, 1]`` entries at the given density, rescaled to ``radius``.

    Returns a dense array when ``density == 1`` and CSR otherwise. If a draw
    has zero spectral radius a fresh substream is tried, ``attempts`` times.
    """
    if size < 1:
        raise ArgumentError(f"size must be >= 1, got {size}")
    if not radius > 0:
        raise ArgumentError(f"radius must be positive, got {radius}")
    streams = substreams(make_rng(rng), attempts + 1)
    last = None
    for stream in streams:
        W = sparse_uniform(size, size, density, -1.0, 1.0, stream)
        if density == 1.0:
            W = W.toarray()
        try:
            return rescale_spectral_radius(W, radius)
        except CannotRescaleError as exc:
            last = exc
    raise CannotRescaleError(f"{attempts + 1} draws all had zero spectral radius") from last


def _check_size(size):
    if size < 2:
        raise ArgumentError(f"size must be >= 2, got {size}")


def simple_cycle_reservoir(size, weight=0.9):
    """Unidirectional ring with all edge weights ``weight``."""
    _check_size(size)
    W = delay_line_reservoir(size, weight)
    W[0, size - 1] = weight
    return W


def delay_line_reservoir(size, weight=0.9):
    """Weights ``weight`` on the subdiagonal only (nilpotent)."""
    _check_size(size)
    W = np.zeros((size, size))
    idx = np.arange(size - 1)
    W[idx + 1, idx] = weight
    return W


def delay_line_backward_reservoir(size, weight=0.9, feedback=0.1):
    """Delay line plus ``feedback`` on the superdiagonal."""
    W = delay_line_reservoir(size, weight)
    idx = np.arange(size - 1)
    W[idx, idx + 1] = feedback
    return W


def pseudo_svd_reservoir(size, max_value=1.0, sparsity=0.1, rng=0):
    """Diagonal of singular values mixed by random Givens rotations.

    Starts from ``diag(s)`` with ``s`` uniform on ``(0, max_value]`` and
    left-multiplies by plane rotations on random index pairs (angles uniform
    on ``[0, 2*pi)``) until the zero-entry fraction is at most ``sparsity``
    or ``size**2`` rotations have been applied. Singular values are
    unchanged by construction.
    """
    _check_size(size)
    if not max_value > 0:
        raise ArgumentError(f"max_value must be positive, got {max_value}")
    if not 0.0 < sparsity < 1.0:
        raise ArgumentError(f"sparsity must lie in (0, 1), got {sparsity}")
    rng = make_rng(rng)
    # 1 - uniform[0, 1) lies in (0, 1]
    s = max_value * (1.0 - rng.random(size))
    W = np.diag(s)
    total = size * size
    zeros = total - size
    for _ in range(total):
        if zeros / total <= sparsity:
            break
        i, j = rng.choice(size, size=2, replace=False)
        theta = rng.uniform(0.0, 2.0 * np.pi)
        c, sn = np.cos(theta), np.sin(theta)
        ri, rj = W[i].copy(), W[j].copy()
        W[i] = c * ri - sn * rj
        W[j] = sn * ri + c * rj
        zeros = total - np.count_nonzero(W)
    return W


@dataclass(frozen=True)
class LayerSpec:
    """A named constructor plus its parameters and seed."""

    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    _INPUT_PARAMS = {
        "dense_uniform": ("scaling",),
        "weighted": ("scaling",),
        "minimal": ("weight", "signs"),
    }
    _RESERVOIR_PARAMS = {
        "rand_sparse": ("density", "radius"),
        "simple_cycle": ("weight",),
        "delay_line": ("weight",),
        "delay_line_backward": ("weight", "feedback"),
        "pseudo_svd": ("max_value", "sparsity"),
    }

    def __post_init__(self):
        allowed = {**self._INPUT_PARAMS, **self._RESERVOIR_PARAMS}.get(self.kind)
        if allowed is None:
            raise ArgumentError(f"unknown layer kind {self.kind!r}")
        extra = set(self.params) - set(allowed)
        if extra:
            raise ArgumentError(f"{self.kind} does not accept {sorted(extra)}")
        if self.kind == "minimal" and self.params.get("signs", "random") not in ("random", "pi"):
            raise ArgumentError("minimal signs must be 'random' or 'pi'")

    @property
    def is_input(self):
        return self.kind in self._INPUT_PARAMS

    def build_input(self, res_size, in_size):
        if not self.is_input:
            raise ArgumentError(f"{self.kind} is not an input layer")
        p = dict(self.params)
        if self.kind == "dense_uniform":
            return dense_uniform_input(res_size, in_size, rng=self.seed, **p)
        if self.kind == "weighted":
            return weighted_input(res_size, in_size, rng=self.seed, **p)
        signs = p.pop("signs", "random")
        bits = pi_sign_bits(res_size * in_size) if signs == "pi" else None
        return minimal_input(res_size, in_size, signs=bits, rng=self.seed, **p)

    def build_reservoir(self, size):
        if self.is_input:
            raise ArgumentError(f"{self.kind} is not a reservoir")
        p = self.params
        if self.kind == "rand_sparse":
            return rand_sparse_reservoir(size, rng=self.seed, **p)
        if self.kind == "pseudo_svd":
            return pseudo_svd_reservoir(size, rng=self.seed, **p)
        build = {
            "simple_cycle": simple_cycle_reservoir,
            "delay_line": delay_line_reservoir,
            "delay_line_backward": delay_line_backward_reservoir,
        }[self.kind]
        return build(size, **p)
