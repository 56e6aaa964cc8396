"""Recording-to-features pipeline and the feature CSV format.

Feature CSV columns: ``subject_id,dataset,label,x1..x10`` with unnormalized
inputs. A sidecar ``<stem>.raw.csv`` holds ``z1..z14`` for the same rows.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import It2fnnError, ValidationError
from .features import (
    FEATURE_NAMES,
    RAW_NAMES,
    compute_raw_features,
    reduce_features,
    segment_strides,
)
from .preprocess import PreprocessConfig, preprocess
from .vgrf_io import VgrfRecording, load_dataset

log = logging.getLogger(__name__)


def extract_features(rec: VgrfRecording, cfg: PreprocessConfig | None = None):
    """Return ``(x, z)``: the unnormalized inputs and the raw features."""
    cfg = cfg or PreprocessConfig()
    clean, _ = preprocess(rec, cfg)
    strides = [
        segment_strides(force, cfg.swing_threshold_n, clean.time_s, clean.sample_rate_hz, clean.segment)
        for force in (clean.total_left_n, clean.total_right_n)
    ]
    z = compute_raw_features(*strides)
    return reduce_features(z), z


@dataclass(eq=False)
class FeatureTable:
    X: np.ndarray  # (N, 10)
    y: np.ndarray  # (N,) in {-1, +1}
    subject_ids: list
    datasets: list
    raw: np.ndarray | None = None  # (N, 14)

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=np.float64))
        self.y = np.asarray(self.y, dtype=np.int64)
        self.subject_ids = list(self.subject_ids)
        self.datasets = list(self.datasets)
        n = len(self.X)
        if not (len(self.y) == len(self.subject_ids) == len(self.datasets) == n):
            raise ValidationError("feature table columns differ in length")
        if not np.all(np.isin(self.y, (-1, 1))):
            raise ValidationError("labels must be -1 or +1")

    def __len__(self):
        return len(self.X)

    def subset(self, mask) -> "FeatureTable":
        idx = np.flatnonzero(mask) if np.asarray(mask).dtype == bool else np.asarray(mask)
        return FeatureTable(
            self.X[idx],
            self.y[idx],
            [self.subject_ids[i] for i in idx],
            [self.datasets[i] for i in idx],
            None if self.raw is None else self.raw[idx],
        )

    def only(self, *datasets) -> "FeatureTable":
        wanted = set(datasets)
        return self.subset(np.array([d in wanted for d in self.datasets], dtype=bool))

    @property
    def sample_ids(self) -> list:
        return [f"{s}#{i}" for i, s in enumerate(self.subject_ids)]


def extract_directory(directory, cfg: PreprocessConfig | None = None, datasets=None, labels=None) -> FeatureTable:
    """Extract one feature row per recording; recordings that fail are skipped with a warning."""
    cfg = cfg or PreprocessConfig()
    rows = []
    for rec in load_dataset(directory, datasets=datasets, labels=labels):
        try:
            x, z = extract_features(rec, cfg)
        except It2fnnError as exc:
            log.warning("skipping %s: %s", rec.name or rec.subject_id, exc)
            continue
        rows.append((rec.subject_id, rec.dataset.value, rec.cohort.label, x, z.as_array()))
    if not rows:
        raise ValidationError("no recording produced features")
    return FeatureTable(
        X=np.array([r[3] for r in rows]),
        y=[r[2] for r in rows],
        subject_ids=[r[0] for r in rows],
        datasets=[r[1] for r in rows],
        raw=np.array([r[4] for r in rows]),
    )


def raw_sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".raw.csv")


def _render(header, table: FeatureTable, values) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for i in range(len(table)):
        w.writerow([table.subject_ids[i], table.datasets[i], int(table.y[i])] + [repr(float(v)) for v in values[i]])
    return buf.getvalue()


def feature_csv_text(table: FeatureTable) -> str:
    return _render(["subject_id", "dataset", "label", *FEATURE_NAMES], table, table.X)


def raw_csv_text(table: FeatureTable) -> str:
    return _render(["subject_id", "dataset", "label", *RAW_NAMES], table, table.raw)


def read_feature_csv(path) -> FeatureTable:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"subject_id", "dataset", "label", *FEATURE_NAMES} - set(reader.fieldnames or ())
        if missing:
            raise ValidationError(f"{path}: missing columns {sorted(missing)}")
        ids, dsets, labels, X = [], [], [], []
        for lineno, row in enumerate(reader, start=2):
            try:
                labels.append(int(float(row["label"])))
                X.append([float(row[c]) for c in FEATURE_NAMES])
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc}") from None
            ids.append(row["subject_id"])
            dsets.append(row["dataset"])
    if not X:
        raise ValidationError(f"{path}: no rows")
    return FeatureTable(np.array(X), labels, ids, dsets)
