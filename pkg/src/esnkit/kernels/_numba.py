"""Compiled twins of the kernels in ``_numpy``.

Semantics and return conventions match ``_numpy`` exactly; only the
arithmetic path differs (BLAS via ``np.dot`` for dense products, explicit
loops for CSR products and elementwise work).
"""
import numpy as np
from numba import njit

TANH = 0
IDENTITY = 1


@njit(cache=True)
def _advance(x, pre, alpha, act, guard):
    beta = 1.0 - alpha
    bad = False
    for i in range(x.shape[0]):
        f = np.tanh(pre[i]) if act == TANH else pre[i]
        v = beta * x[i] + alpha * f
        x[i] = v
        if not np.isfinite(v) or abs(v) > guard:
            bad = True
    return bad


@njit(cache=True)
def leaky_rollout(W, Win, U, x0, alpha, act, guard):
    T = U.shape[0]
    X = np.empty((T, x0.shape[0]))
    x = x0.copy()
    for t in range(T):
        pre = np.dot(W, x) + np.dot(Win, U[t])
        bad = _advance(x, pre, alpha, act, guard)
        X[t] = x
        if bad:
            return X, t
    return X, -1


@njit(cache=True)
def leaky_rollout_csr(indptr, indices, data, Win, U, x0, alpha, act, guard):
    n = x0.shape[0]
    T = U.shape[0]
    X = np.empty((T, n))
    x = x0.copy()
    pre = np.empty(n)
    for t in range(T):
        drive = np.dot(Win, U[t])
        for i in range(n):
            acc = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                acc += data[k] * x[indices[k]]
            pre[i] = acc + drive[i]
        bad = _advance(x, pre, alpha, act, guard)
        X[t] = x
        if bad:
            return X, t
    return X, -1


@njit(cache=True)
def readout_apply(W_out, Z):
    V = np.empty((Z.shape[0], W_out.shape[0]))
    for t in range(Z.shape[0]):
        V[t] = np.dot(W_out, Z[t])
    return V


@njit(cache=True)
def _second_vector(q1):
    n = q1.shape[0]
    v = np.linspace(-1.0, 1.0, n)
    v = v - np.dot(q1, v) * q1
    nv = np.linalg.norm(v)
    if nv <= 1e-12:
        v = np.zeros(n)
        v[np.argmin(np.abs(q1))] = 1.0
        v = v - np.dot(q1, v) * q1
        nv = np.linalg.norm(v)
    return v / nv


@njit(cache=True)
def _ritz_modulus(h11, h12, h21, h22):
    tr = h11 + h22
    det = h11 * h22 - h12 * h21
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        s = np.sqrt(disc)
        return max(abs(tr + s), abs(tr - s)) / 2.0
    return np.sqrt(det)


@njit(cache=True)
def power_iteration(A, x0, tol, max_iter):
    q1 = x0 / np.linalg.norm(x0)
    q2 = _second_vector(q1)
    prev = np.inf
    for it in range(max_iter):
        y1 = np.dot(A, q1)
        y2 = np.dot(A, q2)
        est = _ritz_modulus(np.dot(q1, y1), np.dot(q1, y2),
                            np.dot(q2, y1), np.dot(q2, y2))
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
        y2 = y2 - np.dot(q1, y2) * q1
        n2 = np.linalg.norm(y2)
        if n2 <= 1e-14 * n1:
            q2 = _second_vector(q1)
        else:
            q2 = y2 / n2
    return prev, False, max_iter


@njit(cache=True)
def _mg_rhs(x, xd, beta, gamma, n):
    return beta * xd / (1.0 + xd**n) - gamma * x


@njit(cache=True)
def mackey_glass_rk4(n_steps, lag, dt, beta, gamma, n, x0, hermite):
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


@njit(cache=True)
def _lorenz_rhs(s, sigma, rho, beta):
    out = np.empty(3)
    out[0] = sigma * (s[1] - s[0])
    out[1] = s[0] * (rho - s[2]) - s[1]
    out[2] = s[0] * s[1] - beta * s[2]
    return out


@njit(cache=True)
def lorenz_rk4(n_steps, dt, sigma, rho, beta, u0):
    out = np.empty((n_steps + 1, 3))
    s = u0.copy()
    out[0] = s
    for k in range(n_steps):
        k1 = _lorenz_rhs(s, sigma, rho, beta)
        k2 = _lorenz_rhs(s + 0.5 * dt * k1, sigma, rho, beta)
        k3 = _lorenz_rhs(s + 0.5 * dt * k2, sigma, rho, beta)
        k4 = _lorenz_rhs(s + dt * k3, sigma, rho, beta)
        s = s + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        out[k + 1] = s
    return out
