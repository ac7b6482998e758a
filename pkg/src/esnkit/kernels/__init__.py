"""Hot loops behind the public API.

Two interchangeable implementations exist: compiled numba kernels and a
plain numpy path. The numba path is used when numba imports and the
environment variable ``ESNKIT_DISABLE_NUMBA`` is unset (or ``0``). Both are
importable explicitly for benchmarking via :func:`get_backend`.
"""
import os
import types

from . import _numpy

TANH = _numpy.TANH
IDENTITY = _numpy.IDENTITY

_NAMES = (
    "leaky_rollout",
    "leaky_rollout_csr",
    "readout_apply",
    "power_iteration",
    "mackey_glass_rk4",
    "lorenz_rk4",
)


def numba_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _disabled_by_env():
    return os.environ.get("ESNKIT_DISABLE_NUMBA", "").strip() not in ("", "0")


def get_backend(name=None):
    """Return a namespace holding the kernels of backend ``name``.

    ``name`` is ``"numba"``, ``"numpy"`` or None for the active default.
    """
    if name is None:
        name = BACKEND
    if name == "numpy":
        mod = _numpy
    elif name == "numba":
        if not numba_available():
            raise ImportError("numba backend requested but numba is not installed")
        from . import _numba as mod
    else:
        raise ValueError(f"unknown backend {name!r}")
    return types.SimpleNamespace(name=name, **{n: getattr(mod, n) for n in _NAMES})


BACKEND = "numba" if numba_available() and not _disabled_by_env() else "numpy"
_active = get_backend(BACKEND)

leaky_rollout = _active.leaky_rollout
leaky_rollout_csr = _active.leaky_rollout_csr
readout_apply = _active.readout_apply
power_iteration = _active.power_iteration
mackey_glass_rk4 = _active.mackey_glass_rk4
lorenz_rk4 = _active.lorenz_rk4
