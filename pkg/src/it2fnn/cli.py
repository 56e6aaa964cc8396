"""Command-line entry points.

Exit codes: 0 success, 1 data or model error, 2 usage error.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import asdict
from pathlib import Path

import click

from . import __version__
from ._kernels import BACKEND
from .errors import It2fnnError
from .evaluation import (
    format_metrics_block,
    loocv,
    noise_experiment,
    sweep_rule_count,
)
from .features import apply_normalization, fit_normalization
from .learning import RULE_ADDED, BatchConfig, OnlineConfig, batch_train, online_update
from .network import PATIENT, RuleBase, predict
from .pipeline import (
    extract_directory,
    feature_csv_text,
    raw_csv_text,
    raw_sidecar_path,
    read_feature_csv,
)
from .preprocess import PreprocessConfig
from .report import export_fuzzy_sets, export_rule_grid, explain
from .vgrf_io import load_labels

log = logging.getLogger("it2fnn")

DEFAULT_SEED = 42


def write_atomic(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def log_config(command: str, **cfg) -> None:
    log.info("config %s %s", command, json.dumps(cfg, sort_keys=True, default=str))


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _load_table(path, datasets):
    table = read_feature_csv(path)
    if datasets:
        table = table.only(*datasets)
        if len(table) == 0:
            raise It2fnnError(f"no rows for dataset(s) {', '.join(datasets)} in {path}")
    return table


class Cli(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (It2fnnError, OSError) as exc:
            raise click.ClickException(str(exc).splitlines()[0] if str(exc) else type(exc).__name__) from None


dataset_opt = click.option(
    "--dataset", "datasets", multiple=True, type=click.Choice(["Ga", "Ju", "Si"]), help="Restrict to these sub-datasets."
)
seed_opt = click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
group_opt = click.option("--group-by", type=click.Choice(["subject", "sample"]), default="subject", show_default=True)
sigma_opts = [
    click.option("--sigma1", type=float, default=0.01, show_default=True, help="Lower membership width."),
    click.option("--sigma2", type=float, default=0.1, show_default=True, help="Upper membership width."),
]
fcm_opts = [
    click.option("--fcm-m", type=float, default=2.0, show_default=True),
    click.option("--fcm-tol", type=float, default=1e-5, show_default=True),
    click.option("--fcm-max-iter", type=int, default=300, show_default=True),
]


def apply_opts(opts):
    def deco(f):
        for opt in reversed(opts):
            f = opt(f)
        return f

    return deco


@click.group(cls=Cli)
@click.version_option(__version__)
@click.option("-q", "--quiet", is_flag=True, help="Only log warnings.")
def cli(quiet):
    """Interval type-2 fuzzy gait classifier."""
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    log.setLevel(logging.WARNING if quiet else logging.INFO)
    log.debug("kernel backend: %s", BACKEND)


@cli.command()
@click.argument("data_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("out_csv", type=click.Path(dir_okay=False))
@dataset_opt
@click.option("--labels", type=click.Path(exists=True, dir_okay=False), help="subject_id,cohort,dataset CSV.")
@click.option("--trim-s", type=float, default=20.0, show_default=True)
@click.option("--median-window", type=int, default=10, show_default=True)
@click.option("--turnaround-k", type=float, default=3.0, show_default=True)
@click.option("--no-turnaround-removal", is_flag=True)
@click.option("--swing-threshold-n", type=float, default=20.0, show_default=True)
def extract(data_dir, out_csv, datasets, labels, trim_s, median_window, turnaround_k, no_turnaround_removal, swing_threshold_n):
    """Extract x1..x10 (and raw z1..z14) from vGRF recordings."""
    try:
        cfg = PreprocessConfig(trim_s, median_window, turnaround_k, not no_turnaround_removal, swing_threshold_n)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None
    log_config("extract", data_dir=data_dir, datasets=list(datasets), labels=labels, **asdict(cfg))
    table = extract_directory(data_dir, cfg, datasets=datasets or None, labels=load_labels(labels) if labels else None)
    write_atomic(out_csv, feature_csv_text(table))
    write_atomic(raw_sidecar_path(out_csv), raw_csv_text(table))
    log.info("wrote %d feature rows to %s", len(table), out_csv)


def _batch_config(rules, sigma1, sigma2, seed, fcm_m, fcm_tol, fcm_max_iter):
    return BatchConfig(rules, sigma1, sigma2, fcm_m, fcm_tol, fcm_max_iter, seed)


@cli.command()
@click.argument("features_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("model_out", type=click.Path(dir_okay=False))
@click.option("--rules", type=int, default=9, show_default=True)
@apply_opts(sigma_opts)
@seed_opt
@apply_opts(fcm_opts)
@dataset_opt
def train(features_csv, model_out, rules, sigma1, sigma2, seed, fcm_m, fcm_tol, fcm_max_iter, datasets):
    """Learn a rule base from a feature CSV."""
    cfg = _batch_config(rules, sigma1, sigma2, seed, fcm_m, fcm_tol, fcm_max_iter)
    log_config("train", features=features_csv, datasets=list(datasets), **asdict(cfg))
    table = _load_table(features_csv, datasets)
    params = fit_normalization(table.X)
    rb = batch_train(apply_normalization(table.X, params), table.y, cfg, params)
    write_atomic(model_out, rb.dumps() + "\n")
    log.info("trained %d rules on %d samples", len(rb), len(table))


@cli.command(name="predict")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("features_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), help="Predictions CSV (default: stdout).")
@click.option("--explain", "explain_out", type=click.Path(dir_okay=False), help="Write per-sample rule rankings as JSON.")
def predict_cmd(model, features_csv, out, explain_out):
    """Classify feature rows with a trained model."""
    log_config("predict", model=model, features=features_csv, out=out, explain=explain_out)
    rb = RuleBase.load(model)
    if rb.normalization is None:
        raise It2fnnError(f"{model}: no normalization parameters")
    table = read_feature_csv(features_csv)
    X = apply_normalization(table.X, rb.normalization)
    res = predict(X, rb)
    rows = [
        [
            table.subject_ids[i],
            table.datasets[i],
            int(table.y[i]),
            repr(float(res.y_lower[i])),
            repr(float(res.y_upper[i])),
            repr(float(res.y[i])),
            "Patient" if res.decision[i] == PATIENT else "Healthy",
            int(res.no_coverage[i]),
        ]
        for i in range(len(table))
    ]
    text = _rows_csv(["subject_id", "dataset", "label", "y_lower", "y_upper", "y", "decision", "no_coverage"], rows)
    if out:
        write_atomic(out, text)
    else:
        click.echo(text, nl=False)
    if explain_out:
        docs = [
            {"sample": sid, **explain(x, rb).to_dict()} for sid, x in zip(table.sample_ids, X)
        ]
        write_atomic(explain_out, json.dumps(docs, indent=2) + "\n")


@cli.command()
@click.argument("features_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--rules", type=int, default=8, show_default=True)
@group_opt
@apply_opts(sigma_opts)
@seed_opt
@apply_opts(fcm_opts)
@dataset_opt
@click.option("--out", type=click.Path(dir_okay=False), help="Write metrics as CSV.")
def crossval(features_csv, rules, group_by, sigma1, sigma2, seed, fcm_m, fcm_tol, fcm_max_iter, datasets, out):
    """Leave-one-out cross-validation."""
    cfg = _batch_config(rules, sigma1, sigma2, seed, fcm_m, fcm_tol, fcm_max_iter)
    log_config("crossval", features=features_csv, group_by=group_by, datasets=list(datasets), **asdict(cfg))
    table = _load_table(features_csv, datasets)
    res = loocv(table, cfg, group_by)
    title = f"LOOCV ({group_by}, {res.n_folds} folds, R={rules}, seed={seed})"
    click.echo(format_metrics_block(res.metrics, title))
    if out:
        m = res.metrics
        pct = m.percent()
        write_atomic(
            out,
            _rows_csv(
                ["accuracy", "precision", "recall", "f1", "tp", "tn", "fp", "fn"],
                [[f"{pct['accuracy']:.2f}", f"{pct['precision']:.2f}", f"{pct['recall']:.2f}", f"{pct['f1']:.2f}", m.tp, m.tn, m.fp, m.fn]],
            ),
        )


@cli.command()
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("features_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("model_out", type=click.Path(dir_okay=False))
@click.option("--theta", type=float, default=0.1, show_default=True, help="Coverage threshold.")
@click.option("--epsilon", type=float, default=1.0, show_default=True, help="Width scale for added rules.")
@click.option("--coverage", type=click.Choice(["mean", "lower", "upper"]), default="mean", show_default=True)
@click.option("--log", "log_out", type=click.Path(dir_okay=False), help="Change log (default: stdout).")
def update(model, features_csv, model_out, theta, epsilon, coverage, log_out):
    """Stream labeled samples through complementary online learning."""
    cfg = OnlineConfig(theta, epsilon, coverage)
    log_config("update", model=model, features=features_csv, **asdict(cfg))
    rb = RuleBase.load(model)
    if rb.normalization is None:
        raise It2fnnError(f"{model}: no normalization parameters")
    table = read_feature_csv(features_csv)
    X = apply_normalization(table.X, rb.normalization)
    lines = []
    for sid, x, label in zip(table.sample_ids, X, table.y):
        outcome = online_update(rb, x, int(label), cfg)
        if outcome.status == RULE_ADDED:
            lines.append(f"rule_added sample={sid} rule=R{outcome.rule_index + 1} S={outcome.coverage!r}")
    write_atomic(model_out, rb.dumps() + "\n")
    text = "".join(line + "\n" for line in lines)
    if log_out:
        write_atomic(log_out, text)
    else:
        click.echo(text, nl=False)
    log.info("%d rules added; model now has %d rules", len(lines), len(rb))


@cli.command(name="sweep-rules")
@click.argument("features_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--min-rules", type=int, default=1, show_default=True)
@click.option("--max-rules", type=int, default=15, show_default=True)
@click.option("--seeds", type=int, default=10, show_default=True, help="Independent runs per rule count.")
@seed_opt
@group_opt
@apply_opts(sigma_opts)
@dataset_opt
@click.option("--out", type=click.Path(dir_okay=False), help="Summary CSV (n_rules,f1_mean,f1_std).")
@click.option("--long-out", type=click.Path(dir_okay=False), help="Long-format CSV (n_rules,seed,f1).")
def sweep_rules(features_csv, min_rules, max_rules, seeds, seed, group_by, sigma1, sigma2, datasets, out, long_out):
    """F1 mean/std over seeds for a range of rule counts."""
    if min_rules < 1 or max_rules < min_rules:
        raise click.BadParameter("need 1 <= --min-rules <= --max-rules")
    base = BatchConfig(min_rules, sigma1, sigma2, seed=seed)
    log_config("sweep-rules", features=features_csv, min_rules=min_rules, max_rules=max_rules, seeds=seeds,
               group_by=group_by, datasets=list(datasets), **asdict(base))
    table = _load_table(features_csv, datasets)
    res = sweep_rule_count(table, range(min_rules, max_rules + 1), seeds, base, group_by)
    click.echo(res.summary_csv(), nl=False)
    click.echo(f"recommended rules: {res.recommended}")
    if out:
        write_atomic(out, res.summary_csv())
    if long_out:
        write_atomic(long_out, res.long_csv())


@cli.command(name="noise-exp")
@click.argument("features_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--rules", type=int, default=10, show_default=True)
@click.option("--noise", "sigmas", type=float, multiple=True, default=(0.1, 0.3), show_default=True,
              help="Noise standard deviation; repeat for several levels.")
@seed_opt
@group_opt
@apply_opts(sigma_opts)
@click.option("--out", type=click.Path(dir_okay=False))
def noise_exp(features_csv, rules, sigmas, seed, group_by, sigma1, sigma2, out):
    """IT2 versus type-1 under Gaussian input noise."""
    log_config("noise-exp", features=features_csv, rules=rules, sigmas=list(sigmas), seed=seed,
               group_by=group_by, sigma1=sigma1, sigma2=sigma2)
    table = read_feature_csv(features_csv)
    res = noise_experiment(table, rules, tuple(sigmas), seed, sigma1, sigma2, group_by)
    text = res.to_csv()
    click.echo(text, nl=False)
    if out:
        write_atomic(out, text)


@cli.command(name="export-rules")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("--sets-out", type=click.Path(dir_okay=False), help="feature,rule,x,mu_lower,mu_upper CSV.")
@click.option("--grid-out", type=click.Path(dir_okay=False), help="Rule grid CSV (default: stdout).")
@click.option("--samples", type=int, default=201, show_default=True)
def export_rules(model, sets_out, grid_out, samples):
    """Export fuzzy-set curves and the rule grid."""
    if samples < 2:
        raise click.BadParameter("--samples must be >= 2")
    log_config("export-rules", model=model, sets_out=sets_out, grid_out=grid_out, samples=samples)
    rb = RuleBase.load(model)
    grid = export_rule_grid(rb)
    header = list(grid[0].keys()) if grid else ["rule", "consequent", "lean"]
    text = _rows_csv(header, [[_cell(r[k]) for k in header] for r in grid])
    if grid_out:
        write_atomic(grid_out, text)
    else:
        click.echo(text, nl=False)
    if sets_out:
        rows = [(f, r, repr(x), repr(a), repr(b)) for f, r, x, a, b in export_fuzzy_sets(rb, samples)]
        write_atomic(sets_out, _rows_csv(["feature", "rule", "x", "mu_lower", "mu_upper"], rows))


def _cell(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(v)
    return v


def main(argv=None):
    cli.main(args=argv, prog_name="it2fnn")


if __name__ == "__main__":
    main()
