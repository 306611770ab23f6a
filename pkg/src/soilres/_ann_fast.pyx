# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled training loop for the one-hidden-layer network.

Same accept/reject logic, step schedule and exit codes as
``_kernels_py.ann_train``; see that module for the reference semantics.
"""

import numpy as np

from libc.math cimport exp, isnan, isfinite

ANN_CONVERGED = 0
ANN_MAX_ITER = 1
ANN_STEP_UNDERFLOW = 2
ANN_DIVERGED = 3

cdef double _LR_FLOOR = 1e-30


cdef inline double _sigmoid(double a) noexcept nogil:
    cdef double e
    if a >= 0.0:
        return 1.0 / (1.0 + exp(-a))
    e = exp(a)
    return e / (1.0 + e)


cdef double _penalty(double[:, ::1] W1, double[::1] w2, double decay) noexcept nogil:
    cdef Py_ssize_t j, c
    cdef double s = 0.0
    if decay == 0.0:
        return 0.0
    for j in range(W1.shape[0]):
        for c in range(W1.shape[1]):
            s += W1[j, c] * W1[j, c]
    for j in range(w2.shape[0]):
        s += w2[j] * w2[j]
    return decay * s


cdef double _sse(double[:, ::1] X, double[::1] y, double[:, ::1] W1,
                 double[::1] b1, double[::1] w2, double b2) noexcept nogil:
    cdef Py_ssize_t n = X.shape[0], ni = X.shape[1], h = W1.shape[0]
    cdef Py_ssize_t r, j, c
    cdef double a, s, e, sse = 0.0
    for r in range(n):
        s = b2
        for j in range(h):
            a = b1[j]
            for c in range(ni):
                a += W1[j, c] * X[r, c]
            s += w2[j] * _sigmoid(a)
        e = s - y[r]
        sse += e * e
    return sse


cdef double _grad_full(double[:, ::1] X, double[::1] y, double[:, ::1] W1,
                       double[::1] b1, double[::1] w2, double b2, double decay,
                       double[:, ::1] Z, double[:, ::1] gW1, double[::1] gb1,
                       double[::1] gw2, double* gb2) noexcept nogil:
    """Two-pass gradient using an explicit activation buffer."""
    cdef Py_ssize_t n = X.shape[0], ni = X.shape[1], h = W1.shape[0]
    cdef Py_ssize_t r, j, c
    cdef double a, s, e, te, z, d, sse = 0.0
    for j in range(h):
        gb1[j] = 0.0
        gw2[j] = 0.0
        for c in range(ni):
            gW1[j, c] = 0.0
    gb2[0] = 0.0
    for r in range(n):
        s = b2
        for j in range(h):
            a = b1[j]
            for c in range(ni):
                a += W1[j, c] * X[r, c]
            z = _sigmoid(a)
            Z[r, j] = z
            s += w2[j] * z
        e = s - y[r]
        sse += e * e
        te = 2.0 * e
        gb2[0] += te
        for j in range(h):
            z = Z[r, j]
            gw2[j] += te * z
            d = te * w2[j] * z * (1.0 - z)
            gb1[j] += d
            for c in range(ni):
                gW1[j, c] += d * X[r, c]
    if decay != 0.0:
        for j in range(h):
            gw2[j] += 2.0 * decay * w2[j]
            for c in range(ni):
                gW1[j, c] += 2.0 * decay * W1[j, c]
    return sse


def ann_train(double[:, ::1] X, double[::1] y, double[:, ::1] W1,
              double[::1] b1, double[::1] w2, double[::1] b2,
              long max_iter, double tol, double lr0, double momentum,
              double decay=0.0):
    """In-place training; returns (iterations, final_sse, status)."""
    cdef Py_ssize_t n = X.shape[0], ni = X.shape[1], h = W1.shape[0]
    cdef Py_ssize_t it, j, c
    cdef double lr = lr0, loss, sse, trial_loss, trial_sse
    cdef double scale, delta, rel, gb2, vb2 = 0.0, tb2
    cdef long iterations = 0
    cdef int status = ANN_MAX_ITER

    Z_arr = np.empty((n, h), dtype=np.float64)
    gW1_arr = np.empty((h, ni), dtype=np.float64)
    gb1_arr = np.empty(h, dtype=np.float64)
    gw2_arr = np.empty(h, dtype=np.float64)
    vW1_arr = np.zeros((h, ni), dtype=np.float64)
    vb1_arr = np.zeros(h, dtype=np.float64)
    vw2_arr = np.zeros(h, dtype=np.float64)
    tW1_arr = np.empty((h, ni), dtype=np.float64)
    tb1_arr = np.empty(h, dtype=np.float64)
    tw2_arr = np.empty(h, dtype=np.float64)
    cdef double[:, ::1] Z = Z_arr
    cdef double[:, ::1] gW1 = gW1_arr
    cdef double[::1] gb1 = gb1_arr
    cdef double[::1] gw2 = gw2_arr
    cdef double[:, ::1] vW1 = vW1_arr
    cdef double[::1] vb1 = vb1_arr
    cdef double[::1] vw2 = vw2_arr
    cdef double[:, ::1] tW1 = tW1_arr
    cdef double[::1] tb1 = tb1_arr
    cdef double[::1] tw2 = tw2_arr

    sse = _sse(X, y, W1, b1, w2, b2[0])
    loss = sse + _penalty(W1, w2, decay)
    if not isfinite(loss):
        return 0, sse, ANN_DIVERGED

    for it in range(max_iter):
        iterations += 1
        _grad_full(X, y, W1, b1, w2, b2[0], decay, Z, gW1, gb1, gw2, &gb2)
        scale = lr / n
        for j in range(h):
            vb1[j] = momentum * vb1[j] - scale * gb1[j]
            vw2[j] = momentum * vw2[j] - scale * gw2[j]
            tb1[j] = b1[j] + vb1[j]
            tw2[j] = w2[j] + vw2[j]
            for c in range(ni):
                vW1[j, c] = momentum * vW1[j, c] - scale * gW1[j, c]
                tW1[j, c] = W1[j, c] + vW1[j, c]
        vb2 = momentum * vb2 - scale * gb2
        tb2 = b2[0] + vb2

        trial_sse = _sse(X, y, tW1, tb1, tw2, tb2)
        trial_loss = trial_sse + _penalty(tW1, tw2, decay)
        if trial_loss <= loss:
            for j in range(h):
                b1[j] = tb1[j]
                w2[j] = tw2[j]
                for c in range(ni):
                    W1[j, c] = tW1[j, c]
            b2[0] = tb2
            delta = loss - trial_loss
            rel = delta / loss if loss > 0.0 else 0.0
            loss = trial_loss
            sse = trial_sse
            lr *= 1.1
            if rel <= tol:
                status = ANN_CONVERGED
                break
        else:
            lr *= 0.5
            for j in range(h):
                vb1[j] = 0.0
                vw2[j] = 0.0
                for c in range(ni):
                    vW1[j, c] = 0.0
            vb2 = 0.0
            if lr < _LR_FLOOR:
                status = ANN_DIVERGED if isnan(trial_loss) else ANN_STEP_UNDERFLOW
                break
    return iterations, sse, status
