"""Numeric primitives: RNG streams, sparse sampling, spectral radius, ridge solve.

Dense matrices are C-ordered float64 ``numpy.ndarray``; sparse matrices are
``scipy.sparse.csr_matrix``. Randomness always comes from an explicit
``numpy.random.Generator`` (PCG64), never from global state.
"""
import logging

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from . import kernels
from .errors import (
    ArgumentError,
    CannotRescaleError,
    ConvergenceError,
    DimensionError,
    SingularSystemError,
)

logger = logging.getLogger(__name__)

#: Largest size for which the default method uses a dense eigensolver.
DENSE_EIG_LIMIT = 4000


def make_rng(seed):
    """PCG64 generator seeded from a 64-bit unsigned integer."""
    if isinstance(seed, np.random.Generator):
        return seed
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ArgumentError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def substreams(rng, count):
    """Independent child generators, deterministic given ``rng``'s seed."""
    return rng.spawn(count)


def is_sparse(A):
    return sp.issparse(A)


def to_dense(A):
    if sp.issparse(A):
        return np.ascontiguousarray(A.toarray(), dtype=np.float64)
    return np.ascontiguousarray(A, dtype=np.float64)


def _square(A):
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    return A.shape[0]


def sparse_uniform(rows, cols, density, lo, hi, rng):
    """Random CSR matrix; each entry is nonzero with probability ``density``.

    Nonzero values are uniform on ``[lo, hi]``. The positions mask is drawn
    first (row-major), then the values, so the stream layout is fixed.
    """
    if rows < 1 or cols < 1:
        raise ArgumentError(f"dimensions must be positive, got {rows}x{cols}")
    if not 0.0 < density <= 1.0:
        raise ArgumentError(f"density must lie in (0, 1], got {density}")
    if not lo < hi:
        raise ArgumentError(f"empty range ({lo}, {hi})")
    rng = make_rng(rng)
    mask = rng.random((rows, cols)) < density
    r, c = np.nonzero(mask)
    vals = rng.uniform(lo, hi, size=r.size)
    keep = vals != 0.0
    return sp.csr_matrix((vals[keep], (r[keep], c[keep])), shape=(rows, cols))


def _triangular_radius(A):
    if not np.any(np.tril(A, -1)) or not np.any(np.triu(A, 1)):
        return float(np.max(np.abs(np.diag(A))))
    return None


def spectral_radius(A, tol=1e-10, max_iter=None, method="auto", restarts=2):
    """Largest eigenvalue modulus of a square matrix.

    ``method="power"`` runs deterministic two-vector power iteration from
    the normalized all-ones vector, restarting from a perturbed vector when
    it stalls; it needs a well separated dominant eigenvalue (or pair).
    ``method="dense"`` uses the LAPACK Hessenberg-QR eigensolver.
    ``"auto"`` picks dense up to :data:`DENSE_EIG_LIMIT` and power beyond.
    Triangular matrices short-circuit to the largest absolute diagonal entry.
    """
    n = _square(A)
    if tol <= 0:
        raise ArgumentError("tol must be positive")
    if max_iter is None:
        max_iter = 10 * n
    if max_iter < 1:
        raise ArgumentError("max_iter must be >= 1")
    if method == "auto":
        method = "dense" if n <= DENSE_EIG_LIMIT else "power"

    if method == "dense":
        D = to_dense(A)
        tri = _triangular_radius(D)
        if tri is not None:
            return tri
        return float(np.max(np.abs(scipy.linalg.eigvals(D, check_finite=False))))
    if method != "power":
        raise ArgumentError(f"unknown method {method!r}")

    if sp.issparse(A):
        A = A.tocsr()
        tri = None
    else:
        A = to_dense(A)
        tri = _triangular_radius(A)
    if tri is not None:
        return tri
    if n == 1:
        return float(abs(to_dense(A)[0, 0]))
    if sp.issparse(A):
        # kernels are dense-only; the sparse path stays in scipy
        run = _numpy_power_sparse
    else:
        run = kernels.power_iteration
    start = np.ones(n)
    est = np.nan
    for attempt in range(restarts + 1):
        est, ok, iters = run(A, start, tol, max_iter)
        if ok:
            return float(est)
        logger.debug("power iteration stalled after %d iterations (attempt %d)", iters, attempt)
        start = np.ones(n) + 0.5 ** (attempt + 1) * np.cos(np.arange(n) * (attempt + 1.0))
    raise ConvergenceError("power iteration did not converge", float(est))


def _numpy_power_sparse(A, start, tol, max_iter):
    from .kernels import _numpy

    return _numpy.power_iteration(A, start, tol, max_iter)


def rescale_spectral_radius(A, target, **kwargs):
    """Return ``A * target / rho(A)``; sparse input stays sparse."""
    if target <= 0:
        raise ArgumentError(f"target must be positive, got {target}")
    rho = spectral_radius(A, **kwargs)
    if rho <= np.finfo(float).tiny:
        raise CannotRescaleError("spectral radius is zero; matrix cannot be rescaled")
    if rho == target:
        return A.copy()
    return A * (target / rho)


def solve_regularized_ls(Z, Y, lam, method="auto"):
    """Ridge readout ``W = argmin ||W Z - Y||_F^2 + lam ||W||_F^2``.

    ``Z`` is (d, T) features, ``Y`` is (m, T) targets; returns (m, d).
    ``method="cholesky"`` factors ``Z Z^T + lam I``; ``"qr"`` solves the
    stacked least-squares problem ``[Z^T; sqrt(lam) I]``. ``"auto"`` tries
    Cholesky and falls back to QR when the factorization fails.
    """
    Z = to_dense(Z)
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    if Z.ndim != 2 or Y.ndim != 2:
        raise DimensionError("Z and Y must be 2-D")
    if Z.shape[1] != Y.shape[1]:
        raise DimensionError(
            f"Z has {Z.shape[1]} columns but Y has {Y.shape[1]}"
        )
    if Z.shape[1] < 1:
        raise ArgumentError("need at least one column")
    if lam < 0:
        raise ArgumentError(f"lambda must be >= 0, got {lam}")
    if method not in ("auto", "cholesky", "qr"):
        raise ArgumentError(f"unknown method {method!r}")

    if method in ("auto", "cholesky"):
        G = Z @ Z.T
        G[np.diag_indices_from(G)] += lam
        B = Y @ Z.T
        try:
            cf = scipy.linalg.cho_factor(G, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            if method == "cholesky":
                raise SingularSystemError(
                    "Z Z^T + lambda I is not positive definite; retry with lambda > 0"
                ) from None
        else:
            diag = np.abs(np.diag(cf[0]))
            if lam > 0 or diag.min() > np.sqrt(Z.shape[0] * np.finfo(float).eps) * diag.max():
                return scipy.linalg.cho_solve(cf, B.T, check_finite=False).T
            if method == "cholesky":
                raise SingularSystemError("normal equations are numerically singular; retry with lambda > 0")
    return _solve_qr(Z, Y, lam)


def _solve_qr(Z, Y, lam):
    d, T = Z.shape
    A = Z.T
    rhs = Y.T
    if lam > 0:
        A = np.vstack([A, np.sqrt(lam) * np.eye(d)])
        rhs = np.vstack([rhs, np.zeros((d, Y.shape[0]))])
    if A.shape[0] < d:
        raise SingularSystemError(
            f"{T} samples cannot determine {d} features without regularization; retry with lambda > 0"
        )
    Q, R = scipy.linalg.qr(A, mode="economic", check_finite=False)
    diag = np.abs(np.diag(R))
    if diag.max() == 0.0 or diag.min() <= d * np.finfo(float).eps * diag.max():
        raise SingularSystemError("feature matrix is rank deficient; retry with lambda > 0")
    return scipy.linalg.solve_triangular(R, Q.T @ rhs, check_finite=False).T
