"""Numpy implementations of the hot kernels.

These are the reference versions; ``_ext.pyx`` must agree with them to
floating-point round-off.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def median_filter(x, window):
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.shape[0]
    if n == 0 or window == 1:
        return x.copy()
    before = window // 2
    after = (window - 1) // 2
    padded = np.full(n + before + after, np.nan)
    padded[before:before + n] = x
    return np.nanmedian(sliding_window_view(padded, window), axis=1)


def max_sq_dist(X, C):
    """out[k, i] = max_j (X[k, j] - C[i, j])**2"""
    X = np.asarray(X, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    diff = X[:, None, :] - C[None, :, :]
    return np.max(diff * diff, axis=2)


def fcm_update(X, U, m, V_prev=None):
    """One alternating FCM step.

    Returns ``(V, U_new, J)`` where ``V`` are the centers computed from
    ``U`` and ``U_new`` the memberships computed from ``V``;
    ``J = sum u_new^m * ||x - v||^2``. A cluster with no membership weight
    keeps its center from ``V_prev`` (zeros when not given). A sample at
    zero distance from some centers is shared equally among exactly those.
    """
    X = np.asarray(X, dtype=np.float64)
    um = np.asarray(U, dtype=np.float64) ** m
    wsum = um.sum(axis=0)
    V = np.zeros((um.shape[1], X.shape[1])) if V_prev is None else np.array(V_prev, dtype=np.float64)
    live = wsum > 0
    V[live] = (um.T @ X)[live] / wsum[live, None]

    d2 = ((X[:, None, :] - V[None, :, :]) ** 2).sum(axis=2)
    U_new = np.empty_like(d2)
    zero = d2 == 0.0
    crisp = zero.any(axis=1)
    if crisp.any():
        z = zero[crisp].astype(np.float64)
        U_new[crisp] = z / z.sum(axis=1, keepdims=True)
    soft = ~crisp
    if soft.any():
        ds = d2[soft]
        w = (ds.min(axis=1, keepdims=True) / ds) ** (1.0 / (m - 1.0))
        U_new[soft] = w / w.sum(axis=1, keepdims=True)

    J = float(np.sum(U_new ** m * d2))
    return V, U_new, J
