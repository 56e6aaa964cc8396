"""Human-readable views of a trained rule base: sampled fuzzy sets, the
rule grid, and per-decision explanations."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .features import FEATURE_NAMES
from .network import PATIENT, RuleBase, infer, membership_bounds

DEFAULT_SAMPLES = 201


def export_fuzzy_sets(rb: RuleBase, samples_per_curve: int = DEFAULT_SAMPLES) -> list[tuple]:
    """Rows ``(feature, rule, x, mu_lower, mu_upper)`` sampled on [0, 1].

    ``feature`` is ``x1..x10`` and ``rule`` is 1-based, matching the grid.
    """
    grid = np.linspace(0.0, 1.0, samples_per_curve)
    lo, hi = rb.widths()
    rows = []
    n_features = rb.centers.shape[1]
    for j in range(n_features):
        name = FEATURE_NAMES[j] if n_features == len(FEATURE_NAMES) else f"x{j + 1}"
        for i, rule in enumerate(rb.rules):
            mu_lo, mu_hi = membership_bounds(grid, rule.centers[j], lo[i], hi[i])
            rows.extend((name, i + 1, float(x), float(a), float(b)) for x, a, b in zip(grid, mu_lo, mu_hi))
    return rows


def lean(consequent: float) -> str:
    if consequent > 0:
        return "Patient"
    if consequent < 0:
        return "Healthy"
    return "Neutral"


def export_rule_grid(rb: RuleBase) -> list[dict]:
    """One row per rule: rounded centers, the consequent and its lean."""
    rows = []
    for i, rule in enumerate(rb.rules):
        row = {"rule": f"R{i + 1}"}
        for j, c in enumerate(rule.centers):
            row[f"x{j + 1}"] = round(float(c), 2)
        row["consequent"] = rule.consequent
        row["lean"] = lean(rule.consequent)
        row["added_online"] = rule.sigma_override is not None
        rows.append(row)
    return rows


@dataclass(frozen=True)
class RankedRule:
    rule: int  # 1-based
    phi_lower: float
    phi_upper: float
    firing: float
    consequent: float
    limiting_feature: str  # input whose membership set the min


@dataclass(frozen=True)
class Explanation:
    ranked: list
    y_lower: float
    y_upper: float
    y: float
    decision: str
    no_coverage: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ranked"] = [asdict(r) for r in self.ranked]
        return d


def explain(x, rb: RuleBase) -> Explanation:
    """Rules ranked by mean firing strength, strongest first, with the network output."""
    trace = infer(x, rb)
    firing = (trace.phi_lower + trace.phi_upper) / 2
    # lower and upper share the center, so both mins fall on the farthest input
    limiting = np.argmax((np.asarray(x, dtype=np.float64)[None, :] - rb.centers) ** 2, axis=1)
    order = sorted(range(len(rb.rules)), key=lambda i: (-firing[i], i))
    ranked = [
        RankedRule(
            rule=i + 1,
            phi_lower=float(trace.phi_lower[i]),
            phi_upper=float(trace.phi_upper[i]),
            firing=float(firing[i]),
            consequent=rb.rules[i].consequent,
            limiting_feature=f"x{limiting[i] + 1}",
        )
        for i in order
    ]
    return Explanation(
        ranked=ranked,
        y_lower=trace.y_lower,
        y_upper=trace.y_upper,
        y=trace.y,
        decision="Patient" if trace.decision == PATIENT else "Healthy",
        no_coverage=trace.no_coverage,
    )
