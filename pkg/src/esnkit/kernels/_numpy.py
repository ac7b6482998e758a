"""Reference kernels in plain numpy.

Every function here has a twin in ``_numba`` with the same signature and
return convention. Recurrences return ``(result, bad_step)`` where
``bad_step`` is -1 on success, otherwise the first step whose state was
non-finite or exceeded ``guard`` in absolute value.
"""
import numpy as np

TANH = 0
IDENTITY = 1


def _activate(pre, act):
    if act == TANH:
        return np.tanh(pre)
    return pre


def _bad(x, guard):
    return not np.all(np.isfinite(x)) or np.max(np.abs(x)) > guard


@np.errstate(over="ignore", invalid="ignore")
def leaky_rollout(W, Win, U, x0, alpha, act, guard):
    """Drive a dense reservoir with the rows of ``U`` (time-major)."""
    T = U.shape[0]
    X = np.empty((T, x0.shape[0]))
    x = x0.copy()
    beta = 1.0 - alpha
    for t in range(T):
        pre = W @ x + Win @ U[t]
        x = beta * x + alpha * _activate(pre, act)
        X[t] = x
        if _bad(x, guard):
            return X, t
    return X, -1


@np.errstate(over="ignore", invalid="ignore")
def leaky_rollout_csr(indptr, indices, data, Win, U, x0, alpha, act, guard):
    """Same as :func:`leaky_rollout` with the reservoir in CSR arrays."""
    from scipy.sparse import csr_matrix

    n = x0.shape[0]
    W = csr_matrix((data, indices, indptr), shape=(n, n))
    T = U.shape[0]
    X = np.empty((T, n))
    x = x0.copy()
    beta = 1.0 - alpha
    for t in range(T):
        pre = W @ x + Win @ U[t]
        x = beta * x + alpha * _activate(pre, act)
        X[t] = x
        if _bad(x, guard):
            return X, t
    return X, -1


def readout_apply(W_out, Z):
    # one matvec per row keeps single-step and batched calls bit-identical
    V = np.empty((Z.shape[0], W_out.shape[0]))
    for t in range(Z.shape[0]):
        V[t] = W_out @ Z[t]
    return V


def _second_vector(q1):
    n = q1.shape[0]
    v = np.linspace(-1.0, 1.0, n)
    v = v - (q1 @ v) * q1
    nv = np.linalg.norm(v)
    if nv <= 1e-12:
        v = np.zeros(n)
        v[np.argmin(np.abs(q1))] = 1.0
        v = v - (q1 @ v) * q1
        nv = np.linalg.norm(v)
    return v / nv


def _ritz_modulus(h11, h12, h21, h22):
    tr = h11 + h22
    det = h11 * h22 - h12 * h21
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        s = np.sqrt(disc)
        return max(abs(tr + s), abs(tr - s)) / 2.0
    return np.sqrt(det)


def power_iteration(A, x0, tol, max_iter):
    """Two-vector power (subspace) iteration for the dominant modulus.

    A 2-dimensional block captures either a real dominant eigenvalue or a
    complex-conjugate pair; the estimate is the larger Ritz modulus of the
    2x2 projection. Returns ``(estimate, converged, iterations)``.
    """
    q1 = x0 / np.linalg.norm(x0)
    q2 = _second_vector(q1)
    prev = np.inf
    for it in range(max_iter):
        y1 = A @ q1
        y2 = A @ q2
        est = _ritz_modulus(q1 @ y1, q1 @ y2, q2 @ y1, q2 @ y2)
        if abs(est - prev) <= tol * abs(est):
            return est, True, it + 1
        prev = est
        n1 = np.linalg.norm(y1)
        if n1 == 0.0:
            y1, y2 = y2, y1
            n1 = np.linalg.norm(y1)
            if n1 == 0.0:
                return 0.0, True, it + 1
        q1 = y1 / n1
        y2 = y2 - (q1 @ y2) * q1
        n2 = np.linalg.norm(y2)
        if n2 <= 1e-14 * n1:
            q2 = _second_vector(q1)
        else:
            q2 = y2 / n2
    return prev, False, max_iter


def _mg_rhs(x, xd, beta, gamma, n):
    return beta * xd / (1.0 + xd**n) - gamma * x


def mackey_glass_rk4(n_steps, lag, dt, beta, gamma, n, x0, hermite):
    """Fixed-step RK4 for the Mackey-Glass delay equation.

    ``lag`` (>= 1) is the delay in steps. Delayed values at stage midpoints
    come from the stored trajectory, interpolated linearly or, with
    ``hermite``, by cubic Hermite using the stored derivatives. History
    before t=0 is the constant ``x0`` (zero derivative). Returns
    ``n_steps + 1`` samples starting at t=0.
    """
    x = np.empty(n_steps + 1)
    dx = np.empty(n_steps + 1)
    x[0] = x0
    for k in range(n_steps):
        j = k - lag
        xk = x[k]
        xa = x[j] if j >= 0 else x0
        k1 = _mg_rhs(xk, xa, beta, gamma, n)
        dx[k] = k1
        xb = x[j + 1] if j >= -1 else x0
        if hermite:
            fa = dx[j] if j >= 0 else 0.0
            fb = dx[j + 1] if j >= 0 else 0.0
            xm = 0.5 * (xa + xb) + dt * (fa - fb) / 8.0
        else:
            xm = 0.5 * (xa + xb)
        k2 = _mg_rhs(xk + 0.5 * dt * k1, xm, beta, gamma, n)
        k3 = _mg_rhs(xk + 0.5 * dt * k2, xm, beta, gamma, n)
        k4 = _mg_rhs(xk + dt * k3, xb, beta, gamma, n)
        x[k + 1] = xk + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return x


def _lorenz_rhs(s, sigma, rho, beta):
    return np.array([
        sigma * (s[1] - s[0]),
        s[0] * (rho - s[2]) - s[1],
        s[0] * s[1] - beta * s[2],
    ])


def lorenz_rk4(n_steps, dt, sigma, rho, beta, u0):
    """Classical RK4 for the Lorenz system; returns ``(n_steps + 1, 3)``."""
    out = np.empty((n_steps + 1, 3))
    s = u0.astype(np.float64).copy()
    out[0] = s
    for k in range(n_steps):
        k1 = _lorenz_rhs(s, sigma, rho, beta)
        k2 = _lorenz_rhs(s + 0.5 * dt * k1, sigma, rho, beta)
        k3 = _lorenz_rhs(s + 0.5 * dt * k2, sigma, rho, beta)
        k4 = _lorenz_rhs(s + dt * k3, sigma, rho, beta)
        s = s + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        out[k + 1] = s
    return out
