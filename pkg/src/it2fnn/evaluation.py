"""Classification metrics and the cross-validation experiments.

Patient (+1) is the positive class throughout.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, ContractError
from .features import apply_normalization, fit_normalization
from .learning import BatchConfig, OnlineConfig, batch_train, online_stream
from .network import PATIENT, predict
from .pipeline import FeatureTable

log = logging.getLogger(__name__)

METRIC_NAMES = ("accuracy", "precision", "recall", "f1")


@dataclass(frozen=True)
class MetricsReport:
    tp: int
    tn: int
    fp: int
    fn: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    undefined: tuple = ()  # names of ratios with a zero denominator, reported as 0

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def percent(self) -> dict:
        return {name: 100.0 * getattr(self, name) for name in METRIC_NAMES}

    def confusion_percent(self) -> dict:
        """Row-normalized confusion matrix in percent, keyed by (true, predicted)."""
        neg, pos = self.tn + self.fp, self.tp + self.fn
        return {
            ("H", "H"): 100.0 * self.tn / neg if neg else 0.0,
            ("H", "P"): 100.0 * self.fp / neg if neg else 0.0,
            ("P", "H"): 100.0 * self.fn / pos if pos else 0.0,
            ("P", "P"): 100.0 * self.tp / pos if pos else 0.0,
        }


def metrics_from_counts(tp, tn, fp, fn) -> MetricsReport:
    total = tp + tn + fp + fn
    if total == 0:
        raise ContractError("no evaluated samples")
    undefined = []
    if tp + fp:
        precision = tp / (tp + fp)
    else:
        precision = 0.0
        undefined.append("precision")
    if tp + fn:
        recall = tp / (tp + fn)
    else:
        recall = 0.0
        undefined.append("recall")
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        undefined.append("f1")
    return MetricsReport(
        tp=int(tp), tn=int(tn), fp=int(fp), fn=int(fn),
        accuracy=(tp + tn) / total,
        precision=precision,
        recall=recall,
        f1=f1,
        undefined=tuple(undefined),
    )


def compute_metrics(truths, predictions) -> MetricsReport:
    truths = np.asarray(truths)
    predictions = np.asarray(predictions)
    if truths.shape != predictions.shape:
        raise ContractError(f"{len(truths)} truths but {len(predictions)} predictions")
    if truths.size == 0:
        raise ContractError("no evaluated samples")
    pos_t, pos_p = truths == PATIENT, predictions == PATIENT
    return metrics_from_counts(
        tp=int(np.sum(pos_t & pos_p)),
        tn=int(np.sum(~pos_t & ~pos_p)),
        fp=int(np.sum(~pos_t & pos_p)),
        fn=int(np.sum(pos_t & ~pos_p)),
    )


def mean_metrics(reports) -> dict:
    """Per-metric mean over several runs, as fractions."""
    return {name: float(np.mean([getattr(r, name) for r in reports])) for name in METRIC_NAMES}


def format_metrics_block(report: MetricsReport, title: str = "") -> str:
    lines = [title] if title else []
    pct = report.percent()
    lines += [
        f"Accuracy   {pct['accuracy']:6.2f}",
        f"Precision  {pct['precision']:6.2f}",
        f"Recall     {pct['recall']:6.2f}",
        f"F1 Score   {pct['f1']:6.2f}",
    ]
    cm = report.confusion_percent()
    lines += [
        "             H       P",
        f"True H  {cm['H', 'H']:6.2f}  {cm['H', 'P']:6.2f}",
        f"True P  {cm['P', 'H']:6.2f}  {cm['P', 'P']:6.2f}",
        f"(tp={report.tp} tn={report.tn} fp={report.fp} fn={report.fn})",
    ]
    if report.undefined:
        lines.append(f"undefined (reported as 0): {', '.join(report.undefined)}")
    return "\n".join(lines)


def fold_groups(table: FeatureTable, grouping: str = "subject") -> list[np.ndarray]:
    """Test-index arrays, one per fold, in order of first appearance."""
    if grouping == "sample":
        return [np.array([i]) for i in range(len(table))]
    if grouping != "subject":
        raise ConfigError(f"unknown grouping {grouping!r}")
    order, members = [], {}
    for i, key in enumerate(zip(table.datasets, table.subject_ids)):
        if key not in members:
            members[key] = []
            order.append(key)
        members[key].append(i)
    return [np.array(members[k]) for k in order]


def _train_fold(table: FeatureTable, train_idx, cfg: BatchConfig):
    params = fit_normalization(table.X[train_idx], allow_constant=True)
    rb = batch_train(apply_normalization(table.X[train_idx], params), table.y[train_idx], cfg, params)
    return rb, params


@dataclass(eq=False)
class LoocvResult:
    metrics: MetricsReport
    decisions: np.ndarray
    y_scores: np.ndarray
    n_folds: int


def loocv(table: FeatureTable, cfg: BatchConfig, grouping: str = "subject") -> LoocvResult:
    """Leave-one-group-out cross-validation with pooled confusion counts.

    Normalization is refitted on each fold's training part, so the held-out
    group never influences scaling.
    """
    folds = fold_groups(table, grouping)
    if len(folds) < 2:
        raise ConfigError("cross-validation needs at least two groups")
    n = len(table)
    decisions = np.zeros(n, dtype=np.int64)
    scores = np.zeros(n)
    for test_idx in folds:
        train = np.ones(n, dtype=bool)
        train[test_idx] = False
        rb, params = _train_fold(table, np.flatnonzero(train), cfg)
        out = predict(apply_normalization(table.X[test_idx], params), rb)
        decisions[test_idx] = out.decision
        scores[test_idx] = out.y
    return LoocvResult(compute_metrics(table.y, decisions), decisions, scores, len(folds))


@dataclass(eq=False)
class SweepRow:
    n_rules: int
    f1_scores: list

    @property
    def mean(self) -> float:
        return float(np.mean(self.f1_scores))

    @property
    def std(self) -> float:
        return float(np.std(self.f1_scores))


@dataclass(eq=False)
class SweepResult:
    rows: list
    recommended: int
    seeds: list = field(default_factory=list)

    def summary_csv(self) -> str:
        lines = ["n_rules,f1_mean,f1_std"]
        lines += [f"{r.n_rules},{r.mean!r},{r.std!r}" for r in self.rows]
        return "\n".join(lines) + "\n"

    def long_csv(self) -> str:
        lines = ["n_rules,seed,f1"]
        for r in self.rows:
            lines += [f"{r.n_rules},{s},{f!r}" for s, f in zip(self.seeds, r.f1_scores)]
        return "\n".join(lines) + "\n"


def recommend_rule_count(rows) -> int:
    """Smallest rule count whose mean F1 is within one pooled std of the best mean.

    The pooled std is the root mean square of the per-count stds.
    """
    means = np.array([r.mean for r in rows])
    pooled = float(np.sqrt(np.mean([r.std**2 for r in rows])))
    best = means.max()
    for r, mu in sorted(zip(rows, means), key=lambda p: p[0].n_rules):
        if best - mu <= pooled + 1e-12:
            return r.n_rules
    raise AssertionError("unreachable: the best row always qualifies")


def sweep_rule_count(
    table: FeatureTable,
    rule_counts,
    seeds=10,
    base: BatchConfig | None = None,
    grouping: str = "subject",
) -> SweepResult:
    """LOOCV F1 for every (rule count, seed) pair.

    ``seeds`` is either a count (seeds ``base.seed + 0 .. base.seed + n - 1``)
    or an explicit list.
    """
    base = base or BatchConfig(n_rules=1)
    if isinstance(seeds, int):
        seeds = [base.seed + i for i in range(seeds)]
    seeds = list(seeds)
    rows = []
    for R in rule_counts:
        f1s = []
        for s in seeds:
            cfg = replace(base, n_rules=int(R), seed=int(s))
            f1s.append(loocv(table, cfg, grouping).metrics.f1)
        rows.append(SweepRow(int(R), f1s))
        log.info("R=%d  F1 mean=%.4f std=%.4f", R, rows[-1].mean, rows[-1].std)
    if not rows:
        raise ConfigError("empty rule-count range")
    return SweepResult(rows, recommend_rule_count(rows), seeds)


def t1_width(sigma_1: float, sigma_2: float) -> float:
    """Width of the type-1 comparator: the midpoint of the interval."""
    return (sigma_1 + sigma_2) / 2


@dataclass(eq=False)
class NoiseExperimentResult:
    # (noise sigma, dataset or "All", "IT2" | "T1") -> MetricsReport
    reports: dict
    seed: int

    def get(self, sigma, dataset="All", variant="IT2") -> MetricsReport:
        return self.reports[(sigma, dataset, variant)]

    def to_csv(self) -> str:
        lines = ["noise,dataset,method,accuracy,precision,recall,f1,tp,tn,fp,fn"]
        for (sigma, dset, variant), r in self.reports.items():
            pct = r.percent()
            lines.append(
                f"{sigma!r},{dset},{variant},{pct['accuracy']:.2f},{pct['precision']:.2f},"
                f"{pct['recall']:.2f},{pct['f1']:.2f},{r.tp},{r.tn},{r.fp},{r.fn}"
            )
        return "\n".join(lines) + "\n"


def noise_experiment(
    table: FeatureTable,
    n_rules: int = 10,
    sigmas=(0.1, 0.3),
    seed: int = 42,
    sigma_1: float = 0.01,
    sigma_2: float = 0.1,
    grouping: str = "subject",
) -> NoiseExperimentResult:
    """Pooled LOOCV with Gaussian noise added to the held-out inputs.

    Noise is added after normalization and the result clipped to [0, 1].
    Per fold the same standard-normal draw (seeded by ``seed`` and the fold
    index) is scaled by each sigma, and both variants see the same noisy
    inputs. The type-1 variant reuses the trained rules with both widths
    set to the midpoint of ``[sigma_1, sigma_2]``.
    """
    cfg = BatchConfig(n_rules=n_rules, sigma_1=sigma_1, sigma_2=sigma_2, seed=seed)
    w = t1_width(sigma_1, sigma_2)
    folds = fold_groups(table, grouping)
    if len(folds) < 2:
        raise ConfigError("cross-validation needs at least two groups")
    n = len(table)
    variants = ("IT2", "T1")
    decisions = {(s, v): np.zeros(n, dtype=np.int64) for s in sigmas for v in variants}
    for k, test_idx in enumerate(folds):
        train = np.ones(n, dtype=bool)
        train[test_idx] = False
        rb, params = _train_fold(table, np.flatnonzero(train), cfg)
        models = {"IT2": rb, "T1": rb.with_widths(w, w)}
        clean = apply_normalization(table.X[test_idx], params)
        z = np.random.default_rng([seed, k]).standard_normal(clean.shape)
        for s in sigmas:
            noisy = np.clip(clean + s * z, 0.0, 1.0)
            for v in variants:
                decisions[s, v][test_idx] = predict(noisy, models[v]).decision

    reports = {}
    names = ["All"] + sorted(set(table.datasets))
    dsets = np.array(table.datasets)
    for s in sigmas:
        for name in names:
            mask = np.ones(n, dtype=bool) if name == "All" else dsets == name
            for v in variants:
                reports[s, name, v] = compute_metrics(table.y[mask], decisions[s, v][mask])
    return NoiseExperimentResult(reports, seed)


@dataclass(eq=False)
class OnlineExperimentResult:
    rules_before: int
    rules_after: int
    before: dict  # eval-set name -> MetricsReport
    after: dict
    outcomes: list
    model: object = None


def online_experiment(
    train: FeatureTable,
    stream: FeatureTable,
    evaluate: dict,
    cfg: BatchConfig,
    online: OnlineConfig | None = None,
):
    """Train on ``train``, score every table in ``evaluate``, stream
    ``stream`` through online updates, score again.

    Streamed and evaluated samples are normalized with the parameters fitted
    on ``train`` and clipped to [0, 1].
    """
    online = online or OnlineConfig()
    params = fit_normalization(train.X)
    rb = batch_train(apply_normalization(train.X, params), train.y, cfg, params)

    def score():
        return {
            name: compute_metrics(t.y, predict(apply_normalization(t.X, params), rb).decision)
            for name, t in evaluate.items()
        }

    before, n_before = score(), len(rb)
    outcomes = online_stream(rb, apply_normalization(stream.X, params), stream.y, online)
    return OnlineExperimentResult(n_before, len(rb), before, score(), outcomes, rb)
