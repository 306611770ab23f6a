"""Pure numpy implementations of the hot numeric kernels.

These are the reference semantics for the compiled extensions in
``_ann_fast`` / ``_mars_fast``; both backends implement the same accept or
reject logic and the same degeneracy thresholds so they are interchangeable
up to floating-point rounding.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

# Training-loop exit codes shared with the compiled backend.
ANN_CONVERGED = 0
ANN_MAX_ITER = 1
ANN_STEP_UNDERFLOW = 2
ANN_DIVERGED = 3

_LR_FLOOR = 1e-30

# A candidate hinge column counts as new information only if its component
# orthogonal to the current basis is not negligible against its raw norm.
_REL_COLUMN = 1e-10
_REL_DET = 1e-12


def ann_forward(X, W1, b1, w2, b2):
    """Hidden activations and output of the one-hidden-layer network."""
    Z = expit(X @ W1.T + b1)
    return Z, Z @ w2 + b2


def ann_sse_and_grad(X, y, W1, b1, w2, b2, decay=0.0):
    """Penalized SSE and its exact gradient with respect to all weights."""
    Z, yhat = ann_forward(X, W1, b1, w2, b2)
    e = yhat - y
    sse = float(e @ e)
    loss = sse + decay * (float(np.sum(W1 * W1)) + float(w2 @ w2))
    two_e = 2.0 * e
    g_b2 = float(two_e.sum())
    g_w2 = Z.T @ two_e + 2.0 * decay * w2
    dZ = two_e[:, None] * w2[None, :] * Z * (1.0 - Z)
    g_W1 = dZ.T @ X + 2.0 * decay * W1
    g_b1 = dZ.sum(axis=0)
    return loss, sse, g_W1, g_b1, g_w2, g_b2


def _ann_sse(X, y, W1, b1, w2, b2, decay):
    _, yhat = ann_forward(X, W1, b1, w2, b2)
    e = yhat - y
    sse = float(e @ e)
    return sse + decay * (float(np.sum(W1 * W1)) + float(w2 @ w2)), sse


def ann_train(X, y, W1, b1, w2, b2, max_iter, tol, lr0, momentum, decay=0.0):
    """Full-batch gradient descent with momentum and step halving.

    Weights are updated in place (``b2`` is a length-1 array).  A trial step
    is accepted only if it does not increase the loss; on rejection the step
    size halves and the momentum buffer resets, so the accepted loss sequence
    is non-increasing.  Returns (iterations, final_sse, status).
    """
    n = X.shape[0]
    lr = float(lr0)
    loss, sse = _ann_sse(X, y, W1, b1, w2, b2[0], decay)
    if not np.isfinite(loss):
        return 0, sse, ANN_DIVERGED

    vW1 = np.zeros_like(W1)
    vb1 = np.zeros_like(b1)
    vw2 = np.zeros_like(w2)
    vb2 = 0.0
    status = ANN_MAX_ITER
    iterations = 0

    for _ in range(int(max_iter)):
        iterations += 1
        _, _, gW1, gb1, gw2, gb2 = ann_sse_and_grad(X, y, W1, b1, w2, b2[0], decay)
        scale = lr / n
        vW1 = momentum * vW1 - scale * gW1
        vb1 = momentum * vb1 - scale * gb1
        vw2 = momentum * vw2 - scale * gw2
        vb2 = momentum * vb2 - scale * gb2
        tW1 = W1 + vW1
        tb1 = b1 + vb1
        tw2 = w2 + vw2
        tb2 = b2[0] + vb2
        trial_loss, trial_sse = _ann_sse(X, y, tW1, tb1, tw2, tb2, decay)
        if trial_loss <= loss:
            W1[...] = tW1
            b1[...] = tb1
            w2[...] = tw2
            b2[0] = tb2
            delta = loss - trial_loss
            rel = delta / loss if loss > 0 else 0.0
            loss, sse = trial_loss, trial_sse
            lr *= 1.1
            if rel <= tol:
                status = ANN_CONVERGED
                break
        else:
            lr *= 0.5
            vW1[...] = 0.0
            vb1[...] = 0.0
            vw2[...] = 0.0
            vb2 = 0.0
            if lr < _LR_FLOOR:
                status = ANN_DIVERGED if np.isnan(trial_loss) else ANN_STEP_UNDERFLOW
                break
    return iterations, sse, status


def mars_knot_scan(Q, resid, parent, x, knots):
    """Residual-sum-of-squares reduction for each candidate knot.

    For knot c the reflected pair of hinge columns
    ``parent * max(0, x - c)`` and ``parent * max(0, c - x)`` is appended to
    the least-squares basis whose orthonormal span is ``Q``; the return
    value is the exact RSS reduction achieved by the best usable subset of
    the pair (degenerate or collinear columns are excluded).
    """
    knots = np.asarray(knots, dtype=float)
    if knots.size == 0:
        return np.zeros(0)
    diff = x[:, None] - knots[None, :]
    U = parent[:, None] * np.maximum(0.0, diff)
    V = parent[:, None] * np.maximum(0.0, -diff)

    PU = U - Q @ (Q.T @ U)
    PV = V - Q @ (Q.T @ V)
    gaa = np.einsum("ij,ij->j", PU, PU)
    gbb = np.einsum("ij,ij->j", PV, PV)
    gab = np.einsum("ij,ij->j", PU, PV)
    ra = PU.T @ resid
    rb = PV.T @ resid
    raw_u = np.einsum("ij,ij->j", U, U)
    raw_v = np.einsum("ij,ij->j", V, V)

    usable_a = gaa > _REL_COLUMN * raw_u
    usable_b = gbb > _REL_COLUMN * raw_v

    with np.errstate(divide="ignore", invalid="ignore"):
        red_a = np.where(usable_a, ra * ra / np.where(gaa > 0, gaa, 1.0), 0.0)
        red_b = np.where(usable_b, rb * rb / np.where(gbb > 0, gbb, 1.0), 0.0)
        det = gaa * gbb - gab * gab
        pair_ok = usable_a & usable_b & (det > _REL_DET * gaa * gbb)
        red_pair = np.where(
            pair_ok,
            (ra * ra * gbb - 2.0 * ra * rb * gab + rb * rb * gaa)
            / np.where(det > 0, det, 1.0),
            0.0,
        )
    reductions = np.where(pair_ok, red_pair, np.maximum(red_a, red_b))
    return np.maximum(reductions, 0.0)
