"""Rule learning: batch extraction from label-augmented FCM clusters, and
coverage-driven rule addition for samples that arrive later."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError
from .fcm import FcmConfig, fcm_cluster
from .features import NormalizationParams
from .network import FuzzyRule, RuleBase, infer

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BatchConfig:
    n_rules: int
    sigma_1: float = 0.01
    sigma_2: float = 0.1
    m: float = 2.0
    tol: float = 1e-5
    max_iter: int = 300
    seed: int = 42

    def __post_init__(self):
        if self.n_rules < 1:
            raise ConfigError("n_rules must be >= 1")
        if not 0 < self.sigma_1 <= self.sigma_2:
            raise ConfigError("widths must satisfy 0 < sigma_1 <= sigma_2")

    @property
    def fcm(self) -> FcmConfig:
        return FcmConfig(self.n_rules, m=self.m, tol=self.tol, max_iter=self.max_iter, seed=self.seed)


def batch_train(X, y, cfg: BatchConfig, normalization: NormalizationParams | None = None) -> RuleBase:
    """Build a rule base from normalized inputs ``X`` (N, d) and labels ``y`` in {-1, +1}.

    Each sample is clustered together with its label as an extra coordinate.
    Rule antecedent centers are the cluster centers minus the label
    coordinate; each consequent is the ``u**m``-weighted label average of
    its cluster.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise ConfigError("X must be (N, d) with one label per row")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ConfigError("labels must be -1 or +1")
    if cfg.n_rules > len(X):
        raise ConfigError(f"{cfg.n_rules} rules requested for {len(X)} samples")
    if len(np.unique(y)) == 1:
        log.warning("single-class training set: every consequent will be %+d", int(y[0]))

    augmented = np.column_stack([X, y])
    result = fcm_cluster(augmented, cfg.fcm)
    um = result.memberships**cfg.m
    # same reduction for numerator and denominator, so constant labels come out exact
    consequents = (um * y[:, None]).sum(axis=0) / um.sum(axis=0)
    # convex combinations of +-1; clip round-off only
    consequents = np.clip(consequents, -1.0, 1.0)
    rules = [FuzzyRule(center[:-1].copy(), cons) for center, cons in zip(result.centers, consequents)]
    return RuleBase(rules, cfg.sigma_1, cfg.sigma_2, normalization)


@dataclass(frozen=True)
class OnlineConfig:
    theta_c: float = 0.1
    epsilon: float = 1.0
    coverage: str = "mean"  # which firing bound counts toward coverage: mean, lower, upper

    def __post_init__(self):
        if self.theta_c <= 0:
            raise ConfigError("theta_c must be positive")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.coverage not in ("mean", "lower", "upper"):
            raise ConfigError(f"unknown coverage mode {self.coverage!r}")


NO_CHANGE = "no_change"
RULE_ADDED = "rule_added"
COVERED = "misclassified_but_covered"


@dataclass(frozen=True)
class UpdateOutcome:
    status: str
    predicted: int
    coverage: float | None = None
    rule_index: int | None = None


def coverage(trace, mode: str = "mean") -> float:
    if mode == "lower":
        return float(trace.phi_lower.sum())
    if mode == "upper":
        return float(trace.phi_upper.sum())
    return float(((trace.phi_lower + trace.phi_upper) / 2).sum())


def online_update(rb: RuleBase, x_new, y_new: int, cfg: OnlineConfig | None = None) -> UpdateOutcome:
    """Process one labeled sample, appending a rule to ``rb`` when needed.

    Correctly classified samples change nothing. A misclassified sample
    whose summed firing strength is below ``theta_c`` becomes a new rule
    centered on itself with consequent ``y_new`` and widths scaled by
    ``epsilon``. Existing rules are never modified.
    """
    cfg = cfg or OnlineConfig()
    x_new = np.asarray(x_new, dtype=np.float64)
    if np.any(x_new < -1e-9) or np.any(x_new > 1 + 1e-9):
        raise ContractError("online_update expects inputs normalized to [0, 1]")
    if y_new not in (-1, 1):
        raise ContractError(f"label must be -1 or +1, got {y_new}")

    trace = infer(x_new, rb)
    if trace.decision == y_new:
        return UpdateOutcome(NO_CHANGE, trace.decision)
    s = coverage(trace, cfg.coverage)
    if s >= cfg.theta_c:
        return UpdateOutcome(COVERED, trace.decision, s)
    rb.rules.append(
        FuzzyRule(
            x_new.copy(),
            float(y_new),
            (cfg.epsilon * rb.sigma_lower, cfg.epsilon * rb.sigma_upper),
        )
    )
    return UpdateOutcome(RULE_ADDED, trace.decision, s, len(rb.rules) - 1)


def online_stream(rb: RuleBase, X, y, cfg: OnlineConfig | None = None) -> list[UpdateOutcome]:
    """Feed samples in order through :func:`online_update`."""
    return [online_update(rb, x, int(label), cfg) for x, label in zip(np.asarray(X), y)]
