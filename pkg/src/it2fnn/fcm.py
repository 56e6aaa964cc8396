"""Fuzzy c-means clustering."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigError, NumericError


@dataclass(frozen=True)
class FcmConfig:
    n_clusters: int
    m: float = 2.0
    tol: float = 1e-5
    max_iter: int = 300
    seed: int = 42

    def __post_init__(self):
        if self.n_clusters < 1:
            raise ConfigError("n_clusters must be >= 1")
        if not self.m > 1:
            raise ConfigError("fuzzifier m must be > 1")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")


@dataclass(eq=False)
class FcmResult:
    centers: np.ndarray  # (R, d)
    memberships: np.ndarray  # (N, R), rows sum to one
    iterations: int
    final_objective: float
    objective_history: list = field(default_factory=list)
    converged: bool = False


def initial_memberships(n_samples: int, n_clusters: int, seed: int) -> np.ndarray:
    """Uniform random memberships from ``seed``, rows normalized."""
    rng = np.random.default_rng(seed)
    u = rng.random((n_samples, n_clusters))
    return u / u.sum(axis=1, keepdims=True)


def objective(X, U, V, m) -> float:
    d2 = ((np.asarray(X)[:, None, :] - np.asarray(V)[None, :, :]) ** 2).sum(axis=2)
    return float(np.sum(np.asarray(U) ** m * d2))


def fcm_cluster(samples, cfg: FcmConfig, init: np.ndarray | None = None) -> FcmResult:
    """Alternate center and membership updates until the centers settle.

    Stops when no center moves more than ``cfg.tol`` (Euclidean) between
    iterations, or after ``cfg.max_iter`` iterations. ``init`` overrides the
    seeded random initial membership matrix.
    """
    X = np.ascontiguousarray(samples, dtype=np.float64)
    if X.ndim != 2:
        raise ConfigError("samples must be a 2-D array")
    n, _ = X.shape
    R = cfg.n_clusters
    if R > n:
        raise ConfigError(f"{R} clusters requested for {n} samples")
    if not np.all(np.isfinite(X)):
        raise ConfigError("samples contain non-finite values")

    if init is None:
        U = initial_memberships(n, R, cfg.seed)
    else:
        U = np.array(init, dtype=np.float64)
        if U.shape != (n, R):
            raise ConfigError(f"initial memberships have shape {U.shape}, expected {(n, R)}")

    history = []
    V_prev = None
    converged = False
    it = 0
    J = np.inf
    V = None
    for it in range(1, cfg.max_iter + 1):
        V, U, J = _kernels.fcm_update(X, U, cfg.m, V)
        if not (np.isfinite(J) and np.all(np.isfinite(V))):
            raise NumericError(f"FCM produced non-finite values at iteration {it}")
        history.append(J)
        if V_prev is not None and np.max(np.linalg.norm(V - V_prev, axis=1)) < cfg.tol:
            converged = True
            break
        V_prev = V

    # U was derived from V, so the returned pair is mutually consistent
    return FcmResult(
        centers=V,
        memberships=U,
        iterations=it,
        final_objective=float(J),
        objective_history=history,
        converged=converged,
    )
