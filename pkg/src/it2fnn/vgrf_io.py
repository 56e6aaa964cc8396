"""Reading and writing PhysioNet gait-in-PD vGRF recordings.

File layout, one sample per row, whitespace separated::

    time  L1..L8  R1..R8  total_left  total_right

Filenames follow ``<Dataset><Cohort><nn>_<walk>.txt``, e.g. ``GaPt03_01.txt``.
"""
from __future__ import annotations

import csv
import enum
import logging
import math
import re
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import (
    EmptyDatasetError,
    EmptyRecordingError,
    ParseError,
    ValidationError,
)

log = logging.getLogger(__name__)

N_COLUMNS = 19
N_SENSORS = 16
FILENAME_RE = re.compile(r"^(?P<dataset>Ga|Ju|Si)(?P<cohort>Pt|Co)(?P<num>\d+)_(?P<walk>\d+)\.txt$")


class Cohort(enum.Enum):
    PATIENT = "Patient"
    CONTROL = "Control"

    @property
    def label(self) -> int:
        """+1 for patients, -1 for controls."""
        return 1 if self is Cohort.PATIENT else -1

    @classmethod
    def parse(cls, text: str) -> "Cohort":
        t = text.strip().lower()
        if t in ("patient", "pt", "pd", "+1", "1"):
            return cls.PATIENT
        if t in ("control", "co", "healthy", "-1"):
            return cls.CONTROL
        raise ValueError(f"unknown cohort {text!r}")


class Dataset(enum.Enum):
    GA = "Ga"
    JU = "Ju"
    SI = "Si"

    @classmethod
    def parse(cls, text: str) -> "Dataset":
        for d in cls:
            if d.value.lower() == text.strip().lower():
                return d
        raise ValueError(f"unknown dataset {text!r}")


@dataclass(frozen=True, eq=False)
class VgrfRecording:
    subject_id: str
    cohort: Cohort
    dataset: Dataset
    time_s: np.ndarray
    sensors_n: np.ndarray  # shape (n, 16): 8 left then 8 right
    total_left_n: np.ndarray
    total_right_n: np.ndarray
    sample_rate_hz: float = 100.0
    name: str = ""
    # Contiguous-segment index per sample; turnaround excision bumps it so
    # that stride detection never bridges a cut.
    segment: np.ndarray | None = field(default=None)

    def __post_init__(self):
        n = len(self.time_s)
        if self.segment is None:
            object.__setattr__(self, "segment", np.zeros(n, dtype=np.int64))
        validate_recording(self)

    def __len__(self) -> int:
        return len(self.time_s)

    @property
    def duration_s(self) -> float:
        if len(self.time_s) == 0:
            return 0.0
        return float(self.time_s[-1] - self.time_s[0])

    @property
    def channels(self) -> np.ndarray:
        """All 18 force channels as an (n, 18) array."""
        return np.column_stack([self.sensors_n, self.total_left_n, self.total_right_n])

    def with_channels(self, channels: np.ndarray, keep=None, segment=None) -> "VgrfRecording":
        """Copy with new (n, 18) channel data, optionally subset by ``keep``."""
        time_s = self.time_s
        if keep is not None:
            time_s = time_s[keep]
        if segment is None:
            segment = self.segment if keep is None else self.segment[keep]
        return replace(
            self,
            time_s=time_s,
            sensors_n=channels[:, :N_SENSORS],
            total_left_n=channels[:, N_SENSORS],
            total_right_n=channels[:, N_SENSORS + 1],
            segment=segment,
        )


def validate_recording(rec: VgrfRecording) -> None:
    n = len(rec.time_s)
    if rec.sample_rate_hz <= 0:
        raise ValidationError("sample rate must be positive")
    if rec.sensors_n.shape != (n, N_SENSORS):
        raise ValidationError(f"sensor array has shape {rec.sensors_n.shape}, expected ({n}, {N_SENSORS})")
    if len(rec.total_left_n) != n or len(rec.total_right_n) != n or len(rec.segment) != n:
        raise ValidationError("channel lengths differ from the time axis")
    forces = (rec.sensors_n, rec.total_left_n, rec.total_right_n)
    for arr in forces:
        if not np.all(np.isfinite(arr)):
            raise ValidationError("non-finite force value")
        if np.any(arr < 0):
            raise ValidationError("negative force value")
    if n > 1:
        dt = np.diff(rec.time_s)
        if np.any(dt <= 0):
            raise ValidationError("time axis is not strictly increasing")
        same = np.diff(rec.segment) == 0
        nominal = 1.0 / rec.sample_rate_hz
        bad = same & (np.abs(dt - nominal) > 0.01 * nominal)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise ValidationError(
                f"sample spacing {dt[i]:.6g}s at t={rec.time_s[i]:.6g} deviates from 1/{rec.sample_rate_hz:g}s by more than 1%"
            )


def load_labels(path) -> dict[str, tuple[Cohort, Dataset]]:
    """Read a ``subject_id,cohort,dataset`` CSV."""
    out = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out[row["subject_id"].strip()] = (Cohort.parse(row["cohort"]), Dataset.parse(row["dataset"]))
    return out


def parse_filename(name: str):
    """Return ``(subject_id, dataset, cohort)`` or None for unrecognized names."""
    match = FILENAME_RE.match(name)
    if match is None:
        return None
    subject_id = f"{match['dataset']}{match['cohort']}{match['num']}"
    cohort = Cohort.PATIENT if match["cohort"] == "Pt" else Cohort.CONTROL
    return subject_id, Dataset(match["dataset"]), cohort


def parse_recording(path, labels=None, sample_rate_hz: float = 100.0) -> VgrfRecording:
    """Parse one recording file.

    Cohort and dataset come from the filename; an entry in ``labels``
    (as returned by :func:`load_labels`) overrides the cohort and dataset.
    """
    path = Path(path)
    info = parse_filename(path.name)
    subject_id = path.stem.split("_")[0]
    cohort = dataset = None
    if info is not None:
        subject_id, dataset, cohort = info
    if labels and subject_id in labels:
        cohort, dataset = labels[subject_id]
    if cohort is None or dataset is None:
        raise ValidationError(f"{path.name}: cannot infer cohort/dataset; supply a label CSV")

    data = _read_fast(path)
    if data is None:
        data = _read_checked(path)
    try:
        return VgrfRecording(
            subject_id=subject_id,
            cohort=cohort,
            dataset=dataset,
            time_s=data[:, 0],
            sensors_n=data[:, 1:17],
            total_left_n=data[:, 17],
            total_right_n=data[:, 18],
            sample_rate_hz=sample_rate_hz,
            name=path.stem,
        )
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _read_fast(path):
    """Bulk parse; None when anything is off, so the checked reader can report it."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            data = np.loadtxt(path, dtype=np.float64, ndmin=2)
    except ValueError:
        return None
    if data.size == 0 or data.shape[1] != N_COLUMNS:
        return None
    if not np.all(np.isfinite(data)) or np.any(data[:, 1:] < 0):
        return None
    return data


def _read_checked(path):
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != N_COLUMNS:
                raise ParseError(path, lineno, f"expected {N_COLUMNS} columns, got {len(parts)}")
            try:
                values = [float(p) for p in parts]
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from None
            if not all(math.isfinite(v) for v in values):
                raise ParseError(path, lineno, "non-finite value")
            if any(v < 0 for v in values[1:]):
                raise ValidationError(f"{path}: row {lineno}: negative force")
            rows.append(values)
    if not rows:
        raise EmptyRecordingError(f"{path}: no samples")
    return np.array(rows, dtype=np.float64)


def write_recording(rec: VgrfRecording, path) -> None:
    """Write in the 19-column text layout using shortest round-trip decimals."""
    data = np.column_stack([rec.time_s, rec.channels])
    with open(path, "w") as fh:
        for row in data:
            fh.write("\t".join(repr(float(v)) for v in row))
            fh.write("\n")


def load_dataset(directory, datasets=None, labels=None) -> list[VgrfRecording]:
    """Parse every recognized recording in ``directory``, in filename order.

    ``datasets`` restricts to a set of :class:`Dataset` tags (or their
    string values).
    """
    directory = Path(directory)
    wanted = None
    if datasets:
        wanted = {d if isinstance(d, Dataset) else Dataset.parse(d) for d in datasets}
    recordings = []
    for path in sorted(p for p in directory.iterdir() if p.is_file()):
        info = parse_filename(path.name)
        subject_id = info[0] if info else path.stem.split("_")[0]
        if labels and path.suffix == ".txt" and subject_id in labels:
            dataset = labels[subject_id][1]
        elif info is not None:
            dataset = info[1]
        else:
            log.warning("skipping unrecognized file %s", path.name)
            continue
        if wanted is not None and dataset not in wanted:
            continue
        recordings.append(parse_recording(path, labels=labels))
    if not recordings:
        raise EmptyDatasetError(f"no matching recordings in {directory}")
    return recordings
