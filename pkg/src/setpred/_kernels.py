"""Hot numeric kernels for classifier training.

Each kernel is a plain loop-style function that numba can compile. When
numba is importable (and SETPRED_NUMBA is not set to 0/false/off) the
public names are @njit-compiled; otherwise the interpreted versions are
used. Both paths run the same float64 operations in the same order, so
they agree to within libm rounding (tested at 1e-12); a single process
always runs one selected path. `benchmarks/bench_kernels.py` compares the
two for speed.

All fitting kernels are deterministic: seeded initial parameters are drawn
by the caller and passed in.
"""

from __future__ import annotations

import os

import numpy as np


def numba_requested() -> bool:
    return os.environ.get("SETPRED_NUMBA", "1").strip().lower() not in (
        "0", "false", "off", "no",
    )


NUMBA_ENABLED = False
if numba_requested():
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False


def _maybe_jit(fn):
    if NUMBA_ENABLED:
        return _njit(cache=True)(fn)
    return fn


def _sigmoid(z):
    if z >= 0.0:
        return 1.0 / (1.0 + np.exp(-z))
    e = np.exp(z)
    return e / (1.0 + e)


def _logistic_loss_grad_py(w, b, X, y, l2, l2_b):
    """Summed cross-entropy with optional Gaussian penalty.

    Returns (loss, grad_w, grad_b). l2/l2_b are the quadratic penalty
    coefficients (0 disables the penalty).
    """
    n, d = X.shape
    gw = np.zeros(d)
    gb = 0.0
    loss = 0.0
    for i in range(n):
        z = b
        for j in range(d):
            z += X[i, j] * w[j]
        if z >= 0.0:
            loss += (1.0 - y[i]) * z + np.log1p(np.exp(-z))
        else:
            loss += -y[i] * z + np.log1p(np.exp(z))
        r = _sigmoid(z) - y[i]
        for j in range(d):
            gw[j] += r * X[i, j]
        gb += r
    for j in range(d):
        loss += 0.5 * l2 * w[j] * w[j]
        gw[j] += l2 * w[j]
    loss += 0.5 * l2_b * b * b
    gb += l2_b * b
    return loss, gw, gb


def _logistic_fit_gd_py(X, y, l2, l2_b, step, max_iter, tol):
    """Full-batch gradient descent from zero init.

    Stops when the gradient infinity-norm falls below tol or after
    max_iter updates. Returns (w, b, iterations_used).
    """
    d = X.shape[1]
    w = np.zeros(d)
    b = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        loss, gw, gb = logistic_loss_grad(w, b, X, y, l2, l2_b)
        gmax = abs(gb)
        for j in range(d):
            if abs(gw[j]) > gmax:
                gmax = abs(gw[j])
        if gmax < tol:
            return w, b, it - 1
        for j in range(d):
            w[j] -= step * gw[j]
        b -= step * gb
    return w, b, it


def _lasso_fit_cd_py(X, y, lam, max_sweeps, tol):
    """L1-penalized logistic regression via cyclic proximal coordinate
    updates on the mean cross-entropy; the intercept is unpenalized.

    Returns (w, b, sweeps_used).
    """
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    z = np.zeros(n)
    colsq = np.zeros(d)
    for j in range(d):
        s = 0.0
        for i in range(n):
            s += X[i, j] * X[i, j]
        colsq[j] = s
    sweep = 0
    for sweep in range(1, max_sweeps + 1):
        max_delta = 0.0
        for j in range(d):
            lip = colsq[j] / (4.0 * n)
            if lip <= 0.0:
                continue
            g = 0.0
            for i in range(n):
                g += (_sigmoid(z[i]) - y[i]) * X[i, j]
            g /= n
            u = w[j] - g / lip
            thresh = lam / lip
            if u > thresh:
                w_new = u - thresh
            elif u < -thresh:
                w_new = u + thresh
            else:
                w_new = 0.0
            delta = w_new - w[j]
            if delta != 0.0:
                for i in range(n):
                    z[i] += delta * X[i, j]
                w[j] = w_new
                if abs(delta) > max_delta:
                    max_delta = abs(delta)
        g = 0.0
        for i in range(n):
            g += _sigmoid(z[i]) - y[i]
        g /= n
        delta = -g / 0.25
        if delta != 0.0:
            b += delta
            for i in range(n):
                z[i] += delta
            if abs(delta) > max_delta:
                max_delta = abs(delta)
        if max_delta < tol:
            break
    return w, b, sweep


def _mlp_loss_grad_py(X, y, W1, b1, w2, b2):
    """Mean cross-entropy and gradients for a 1-hidden-layer sigmoid MLP."""
    n, d = X.shape
    h = W1.shape[1]
    act = np.zeros((n, h))
    out = np.zeros(n)
    loss = 0.0
    for i in range(n):
        zo = b2
        for k in range(h):
            zh = b1[k]
            for j in range(d):
                zh += X[i, j] * W1[j, k]
            a = _sigmoid(zh)
            act[i, k] = a
            zo += a * w2[k]
        if zo >= 0.0:
            loss += (1.0 - y[i]) * zo + np.log1p(np.exp(-zo))
        else:
            loss += -y[i] * zo + np.log1p(np.exp(zo))
        out[i] = _sigmoid(zo)
    loss /= n
    gW1 = np.zeros((d, h))
    gb1 = np.zeros(h)
    gw2 = np.zeros(h)
    gb2 = 0.0
    for i in range(n):
        d2 = (out[i] - y[i]) / n
        gb2 += d2
        for k in range(h):
            gw2[k] += d2 * act[i, k]
            d1 = d2 * w2[k] * act[i, k] * (1.0 - act[i, k])
            gb1[k] += d1
            for j in range(d):
                gW1[j, k] += d1 * X[i, j]
    return loss, gW1, gb1, gw2, gb2


def _mlp_fit_gd_py(X, y, W1, b1, w2, b2, lr, epochs):
    """Full-batch gradient descent on the MLP, starting from the given
    (seeded) parameters. Returns the trained copies."""
    W1 = W1.copy()
    b1 = b1.copy()
    w2 = w2.copy()
    b2 = b2
    d, h = W1.shape
    for _ in range(epochs):
        loss, gW1, gb1, gw2, gb2 = mlp_loss_grad(X, y, W1, b1, w2, b2)
        for j in range(d):
            for k in range(h):
                W1[j, k] -= lr * gW1[j, k]
        for k in range(h):
            b1[k] -= lr * gb1[k]
            w2[k] -= lr * gw2[k]
        b2 -= lr * gb2
    return W1, b1, w2, b2


def _mlp_predict_py(X, W1, b1, w2, b2):
    n, d = X.shape
    h = W1.shape[1]
    out = np.zeros(n)
    for i in range(n):
        zo = b2
        for k in range(h):
            zh = b1[k]
            for j in range(d):
                zh += X[i, j] * W1[j, k]
            zo += _sigmoid(zh) * w2[k]
        out[i] = _sigmoid(zo)
    return out


# Compiled (or plain) public bindings. The fit kernels call the public
# loss-gradient names, so in compiled mode every inner call is compiled
# too; in fallback mode everything stays interpreted. The benchmark runs
# the two modes in separate processes via the env flag.
_sigmoid = _maybe_jit(_sigmoid)
logistic_loss_grad = _maybe_jit(_logistic_loss_grad_py)
logistic_fit_gd = _maybe_jit(_logistic_fit_gd_py)
lasso_fit_cd = _maybe_jit(_lasso_fit_cd_py)
mlp_loss_grad = _maybe_jit(_mlp_loss_grad_py)
mlp_fit_gd = _maybe_jit(_mlp_fit_gd_py)
mlp_predict = _maybe_jit(_mlp_predict_py)
