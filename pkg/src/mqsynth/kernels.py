"""Numeric hot loops: cosine-distance scans, logistic regression, sigmoid scoring.

Each kernel has a pure-numpy implementation and, when numba is importable,
an @njit twin. Selection happens once at import time: set MQSYNTH_NUMBA=0
to force the numpy path (useful for debugging and for the benchmark in
benchmarks/bench_kernels.py). Both paths compute the same math; floating
point results may differ in the last ulps because summation order differs.
"""

import os

import numpy as np


def _numba_enabled() -> bool:
    flag = os.environ.get("MQSYNTH_NUMBA", "1").strip().lower()
    if flag in ("0", "false", "no", "off"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USING_NUMBA = _numba_enabled()


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------

def cosine_distance_scan_numpy(matrix, norms, query, query_norm):
    """Distances 1 - cos(v_i, query) for every row of `matrix`, clipped to [0, 2]."""
    dots = matrix @ query
    dist = 1.0 - dots / (norms * query_norm)
    return np.clip(dist, 0.0, 2.0)


def sigmoid_numpy(z):
    # Split by sign to avoid overflow in exp for large |z|.
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def predict_proba_batch_numpy(X, w, b):
    """sigmoid(X @ w + b) for a batch of feature rows."""
    return sigmoid_numpy(X @ w + b)


def logreg_fit_numpy(X, y, lr, l2, max_epochs, tol):
    """Full-batch gradient descent on L2-regularized logistic loss.

    Weights and bias start at zero; the bias is not regularized. Stops when
    the infinity norm of the (w, b) gradient drops below `tol` or after
    `max_epochs` epochs. Returns (w, b, epochs_run, final_grad_norm).
    """
    n, d = X.shape
    w = np.zeros(d, dtype=np.float64)
    b = 0.0
    grad_norm = np.inf
    epochs = 0
    for epoch in range(max_epochs):
        p = predict_proba_batch_numpy(X, w, b)
        err = p - y
        gw = X.T @ err / n + l2 * w
        gb = float(np.mean(err))
        grad_norm = max(float(np.max(np.abs(gw))) if d else 0.0, abs(gb))
        epochs = epoch + 1
        if grad_norm < tol:
            break
        w -= lr * gw
        b -= lr * gb
    return w, b, epochs, grad_norm


# ---------------------------------------------------------------------------
# numba twins
# ---------------------------------------------------------------------------

if USING_NUMBA:
    from numba import njit

    # np.dot lowers to BLAS inside nopython code, so these kernels keep BLAS
    # throughput on the O(n*d) work while the JIT removes the per-epoch and
    # per-element Python overhead that dominates desk-scale problems.

    @njit(cache=True)
    def _cosine_distance_scan_nb(matrix, norms, query, query_norm):
        dots = np.dot(matrix, query)
        n = dots.shape[0]
        out = np.empty(n, dtype=np.float64)
        for i in range(n):
            v = 1.0 - dots[i] / (norms[i] * query_norm)
            if v < 0.0:
                v = 0.0
            elif v > 2.0:
                v = 2.0
            out[i] = v
        return out

    @njit(cache=True)
    def _sigmoid_scalar_nb(z):
        if z >= 0.0:
            return 1.0 / (1.0 + np.exp(-z))
        ez = np.exp(z)
        return ez / (1.0 + ez)

    @njit(cache=True)
    def _predict_proba_batch_nb(X, w, b):
        z = np.dot(X, w)
        out = np.empty(z.shape[0], dtype=np.float64)
        for i in range(z.shape[0]):
            out[i] = _sigmoid_scalar_nb(z[i] + b)
        return out

    @njit(cache=True)
    def _logreg_fit_nb(X, y, lr, l2, max_epochs, tol):
        n, d = X.shape
        w = np.zeros(d, dtype=np.float64)
        b = 0.0
        grad_norm = np.inf
        epochs = 0
        err = np.empty(n, dtype=np.float64)
        for epoch in range(max_epochs):
            z = np.dot(X, w)
            gb = 0.0
            for i in range(n):
                e = _sigmoid_scalar_nb(z[i] + b) - y[i]
                err[i] = e
                gb += e
            gb /= n
            gw = np.dot(err, X)
            grad_norm = abs(gb)
            for j in range(d):
                gw[j] = gw[j] / n + l2 * w[j]
                a = abs(gw[j])
                if a > grad_norm:
                    grad_norm = a
            epochs = epoch + 1
            if grad_norm < tol:
                break
            for j in range(d):
                w[j] -= lr * gw[j]
            b -= lr * gb
        return w, b, epochs, grad_norm

    cosine_distance_scan = _cosine_distance_scan_nb
    predict_proba_batch = _predict_proba_batch_nb
    logreg_fit = _logreg_fit_nb
else:
    cosine_distance_scan = cosine_distance_scan_numpy
    predict_proba_batch = predict_proba_batch_numpy
    logreg_fit = logreg_fit_numpy
