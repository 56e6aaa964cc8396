"""Interval type-2 fuzzy network: Gaussian memberships with uncertain width,
min t-norm, interval aggregation and sum type reduction.

Every rule ``i`` has one center per input and a crisp consequent in
[-1, 1]. Lower and upper memberships share the center and differ only in
width, so the lower firing strength never exceeds the upper one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import ModelError
from .features import NormalizationParams

MODEL_VERSION = 1
UNDERFLOW = 1e-300

PATIENT = 1
HEALTHY = -1


@dataclass(eq=False)
class FuzzyRule:
    centers: np.ndarray
    consequent: float
    sigma_override: tuple[float, float] | None = None

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=np.float64)
        self.consequent = float(self.consequent)
        if not np.all(np.isfinite(self.centers)):
            raise ModelError("rule centers must be finite")
        if not -1.0 <= self.consequent <= 1.0:
            raise ModelError(f"consequent {self.consequent} outside [-1, 1]")
        if self.sigma_override is not None:
            lo, hi = (float(s) for s in self.sigma_override)
            if not 0 < lo <= hi:
                raise ModelError("width override must satisfy 0 < lower <= upper")
            self.sigma_override = (lo, hi)


@dataclass(eq=False)
class RuleBase:
    rules: list[FuzzyRule]
    sigma_lower: float
    sigma_upper: float
    normalization: NormalizationParams | None = None
    version: int = MODEL_VERSION

    def __post_init__(self):
        if not 0 < self.sigma_lower <= self.sigma_upper:
            raise ModelError("widths must satisfy 0 < sigma_lower <= sigma_upper")

    def __len__(self):
        return len(self.rules)

    @property
    def centers(self) -> np.ndarray:
        return np.array([r.centers for r in self.rules])

    @property
    def consequents(self) -> np.ndarray:
        return np.array([r.consequent for r in self.rules])

    def widths(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-rule (lower, upper) widths, overrides applied."""
        lo = np.array([r.sigma_override[0] if r.sigma_override else self.sigma_lower for r in self.rules])
        hi = np.array([r.sigma_override[1] if r.sigma_override else self.sigma_upper for r in self.rules])
        return lo, hi

    def with_widths(self, sigma_lower: float, sigma_upper: float) -> "RuleBase":
        """Same rules under different global widths; overrides are dropped."""
        rules = [FuzzyRule(r.centers.copy(), r.consequent) for r in self.rules]
        return RuleBase(rules, sigma_lower, sigma_upper, self.normalization)

    def to_dict(self) -> dict:
        rules = []
        for r in self.rules:
            d = {"centers": r.centers.tolist(), "consequent": r.consequent}
            if r.sigma_override is not None:
                d["sigma_override"] = list(r.sigma_override)
            rules.append(d)
        return {
            "version": self.version,
            "sigma_lower": self.sigma_lower,
            "sigma_upper": self.sigma_upper,
            "normalization": self.normalization.to_dict() if self.normalization else None,
            "rules": rules,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RuleBase":
        if "version" not in d:
            raise ModelError("model document has no version field")
        if d["version"] != MODEL_VERSION:
            raise ModelError(f"unsupported model version {d['version']}")
        try:
            rules = [
                FuzzyRule(r["centers"], r["consequent"], tuple(r["sigma_override"]) if r.get("sigma_override") else None)
                for r in d["rules"]
            ]
            norm = NormalizationParams.from_dict(d["normalization"]) if d.get("normalization") else None
            return cls(rules, float(d["sigma_lower"]), float(d["sigma_upper"]), norm, d["version"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelError(f"malformed model document: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps() + "\n")

    @classmethod
    def load(cls, path) -> "RuleBase":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: not valid JSON: {exc}") from None
        return cls.from_dict(doc)


def membership_bounds(x, c, sigma_lower, sigma_upper):
    """Lower and upper Gaussian memberships of ``x`` in a set centered at ``c``."""
    d2 = (np.asarray(x, dtype=np.float64) - c) ** 2
    return np.exp(-0.5 * d2 / sigma_lower**2), np.exp(-0.5 * d2 / sigma_upper**2)


def fire_rule(x, rule: FuzzyRule, sigma_lower: float, sigma_upper: float) -> tuple[float, float]:
    """Firing interval of one rule under the min t-norm.

    A rule's own width override takes precedence over the widths passed in.
    """
    if rule.sigma_override is not None:
        sigma_lower, sigma_upper = rule.sigma_override
    mu_lo, mu_hi = membership_bounds(x, rule.centers, sigma_lower, sigma_upper)
    return float(np.min(mu_lo)), float(np.min(mu_hi))


def firing_strengths(X, rb: RuleBase) -> tuple[np.ndarray, np.ndarray]:
    """(N, R) lower and upper firing strengths for a batch of inputs.

    Each rule uses one width across all inputs, so the min over Gaussian
    memberships is the Gaussian of the largest coordinate distance.
    """
    if not rb.rules:
        raise ModelError("empty rule base")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    worst = _kernels.max_sq_dist(X, rb.centers)
    lo, hi = rb.widths()
    return np.exp(-0.5 * worst / lo**2), np.exp(-0.5 * worst / hi**2)


def _aggregate(phi, consequents):
    total = phi.sum(axis=1)
    covered = total >= UNDERFLOW
    out = np.zeros(len(total))
    out[covered] = (phi[covered] @ consequents) / total[covered]
    return out, covered


@dataclass(eq=False)
class BatchOutput:
    y_lower: np.ndarray
    y_upper: np.ndarray
    y: np.ndarray
    decision: np.ndarray
    no_coverage: np.ndarray


def predict(X, rb: RuleBase) -> BatchOutput:
    """Vectorized inference over the rows of ``X`` (already normalized)."""
    phi_lo, phi_hi = firing_strengths(X, rb)
    cons = rb.consequents
    y_lo, cov_lo = _aggregate(phi_lo, cons)
    y_hi, cov_hi = _aggregate(phi_hi, cons)
    y = y_lo + y_hi
    return BatchOutput(
        y_lower=y_lo,
        y_upper=y_hi,
        y=y,
        decision=np.where(y > 0, PATIENT, HEALTHY),
        no_coverage=~(cov_lo & cov_hi),
    )


@dataclass(eq=False)
class InferenceTrace:
    mu_lower: np.ndarray  # (R, n_inputs)
    mu_upper: np.ndarray
    phi_lower: np.ndarray  # (R,)
    phi_upper: np.ndarray
    y_lower: float
    y_upper: float
    y: float
    decision: int
    no_coverage: bool = False
    flags: list = field(default_factory=list)


def infer(x, rb: RuleBase) -> InferenceTrace:
    """Full layer-by-layer evaluation of one input.

    A weighted-average denominator below 1e-300 counts as underflow: that
    bound is reported as 0 and the trace is flagged ``no_coverage``. The
    decision is Patient (+1) iff ``y > 0``.
    """
    if not rb.rules:
        raise ModelError("empty rule base")
    x = np.asarray(x, dtype=np.float64)
    lo, hi = rb.widths()
    d2 = (x[None, :] - rb.centers) ** 2
    mu_lo = np.exp(-0.5 * d2 / lo[:, None] ** 2)
    mu_hi = np.exp(-0.5 * d2 / hi[:, None] ** 2)
    phi_lo = mu_lo.min(axis=1)
    phi_hi = mu_hi.min(axis=1)
    cons = rb.consequents

    flags = []
    bounds = []
    for name, phi in (("lower", phi_lo), ("upper", phi_hi)):
        s = phi.sum()
        if s < UNDERFLOW:
            flags.append(f"{name}_underflow")
            bounds.append(0.0)
        else:
            bounds.append(float(phi @ cons / s))
    y = bounds[0] + bounds[1]
    return InferenceTrace(
        mu_lower=mu_lo,
        mu_upper=mu_hi,
        phi_lower=phi_lo,
        phi_upper=phi_hi,
        y_lower=bounds[0],
        y_upper=bounds[1],
        y=y,
        decision=PATIENT if y > 0 else HEALTHY,
        no_coverage=bool(flags),
        flags=flags,
    )
