"""Gait-cycle segmentation and the clinical swing/stride timing features.

The fourteen raw features ``z1..z14`` are timing statistics over paired
left/right strides; they are reduced to ten inputs ``x1..x10`` by averaging
the per-foot pairs, then min-max normalized with parameters fitted on a
training set.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, fields

import numpy as np

from .errors import DegenerateFeatureError, DegenerateGaitError, InsufficientGaitError

log = logging.getLogger(__name__)

N_FEATURES = 10
N_RAW = 14
FEATURE_NAMES = tuple(f"x{j}" for j in range(1, N_FEATURES + 1))
RAW_NAMES = tuple(f"z{j}" for j in range(1, N_RAW + 1))

MIN_STRIDES = 5
MIN_STRIDE_S = 0.4
MAX_STRIDE_S = 4.0


@dataclass(frozen=True, eq=False)
class StrideTable:
    """Strides of one foot: heel strike, toe off, next heel strike (seconds)."""

    stance_start: np.ndarray
    swing_start: np.ndarray
    stride_end: np.ndarray

    def __len__(self):
        return len(self.stance_start)

    @property
    def swing_duration(self) -> np.ndarray:
        return self.stride_end - self.swing_start

    @property
    def stride_duration(self) -> np.ndarray:
        return self.stride_end - self.stance_start

    @property
    def swing_pct(self) -> np.ndarray:
        return 100.0 * self.swing_duration / self.stride_duration

    def head(self, n: int) -> "StrideTable":
        return StrideTable(self.stance_start[:n], self.swing_start[:n], self.stride_end[:n])


def detect_strides(force, time_s, threshold_n, segment=None) -> StrideTable:
    """All complete strides, with no duration filtering.

    Swing is a maximal run of samples below ``threshold_n``. A stride runs
    from the end of one swing (heel strike) to the end of the next. Runs
    are found per contiguous segment so no stride crosses a cut.
    """
    force = np.asarray(force, dtype=np.float64)
    time_s = np.asarray(time_s, dtype=np.float64)
    if segment is None:
        bounds = [(0, len(force))]
    else:
        segment = np.asarray(segment)
        cuts = np.flatnonzero(np.diff(segment)) + 1
        edges = np.concatenate([[0], cuts, [len(force)]])
        bounds = list(zip(edges[:-1], edges[1:]))

    starts, toes, ends = [], [], []
    for lo, hi in bounds:
        low = force[lo:hi] < threshold_n
        if len(low) < 2:
            continue
        heel = np.flatnonzero(~low[1:] & low[:-1]) + 1
        toe = np.flatnonzero(low[1:] & ~low[:-1]) + 1
        if len(heel) < 2:
            continue
        # exactly one toe-off lies between consecutive heel strikes
        toe_after = toe[np.searchsorted(toe, heel[:-1])]
        t = time_s[lo:hi]
        starts.append(t[heel[:-1]])
        toes.append(t[toe_after])
        ends.append(t[heel[1:]])
    if not starts:
        empty = np.empty(0)
        return StrideTable(empty, empty.copy(), empty.copy())
    return StrideTable(np.concatenate(starts), np.concatenate(toes), np.concatenate(ends))


def segment_strides(
    total_force,
    threshold_n: float = 20.0,
    time_s=None,
    sample_rate_hz: float = 100.0,
    segment=None,
    min_stride_s: float = MIN_STRIDE_S,
    max_stride_s: float = MAX_STRIDE_S,
) -> StrideTable:
    """Strides of one foot from its total vGRF, artifacts removed.

    Strides shorter than ``min_stride_s`` or longer than ``max_stride_s``
    are dropped. Raises :class:`InsufficientGaitError` when fewer than five
    remain.
    """
    if threshold_n <= 0:
        raise ValueError("threshold_n must be positive")
    total_force = np.asarray(total_force, dtype=np.float64)
    if time_s is None:
        time_s = np.arange(len(total_force)) / sample_rate_hz
    table = detect_strides(total_force, time_s, threshold_n, segment)
    dur = table.stride_duration
    keep = (dur >= min_stride_s) & (dur <= max_stride_s)
    table = StrideTable(table.stance_start[keep], table.swing_start[keep], table.stride_end[keep])
    if len(table) < MIN_STRIDES:
        raise InsufficientGaitError(f"found {len(table)} valid strides, need at least {MIN_STRIDES}")
    return table


@dataclass(frozen=True)
class RawFeatures:
    z1: float
    z2: float
    z3: float
    z4: float
    z5: float
    z6: float
    z7: float
    z8: float
    z9: float
    z10: float
    z11: float
    z12: float
    z13: float
    z14: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)])

    @classmethod
    def from_array(cls, values) -> "RawFeatures":
        return cls(*(float(v) for v in values))


def _cv(values, what):
    mean = float(np.mean(values))
    if mean == 0.0:
        raise DegenerateGaitError(f"zero mean {what}")
    return 100.0 * float(np.std(values)) / mean


def short_long_swings(left: StrideTable, right: StrideTable):
    """Per stride pair, the shorter and the longer of the two swing times."""
    n = min(len(left), len(right))
    swing_l, swing_r = left.swing_duration[:n], right.swing_duration[:n]
    return np.minimum(swing_l, swing_r), np.maximum(swing_l, swing_r)


def gait_asymmetry(short, long_) -> float:
    """Mean of ``100 * |ln(short / long)|`` over stride pairs."""
    return float(np.mean(100.0 * np.abs(np.log(np.asarray(short) / np.asarray(long_)))))


def compute_raw_features(left: StrideTable, right: StrideTable) -> RawFeatures:
    """z1..z14 from chronologically paired strides.

    The k-th left stride is paired with the k-th right stride; unmatched
    trailing strides are dropped before any statistic is taken. All
    standard deviations are population standard deviations.
    """
    n = min(len(left), len(right))
    if n == 0:
        raise InsufficientGaitError("no stride pairs")
    left, right = left.head(n), right.head(n)
    swing_l, swing_r = left.swing_duration, right.swing_duration
    short, long_ = short_long_swings(left, right)
    if np.any(short <= 0):
        raise DegenerateGaitError("non-positive swing duration")

    cv_short = _cv(short, "short swing time")
    cv_long = _cv(long_, "long swing time")
    if cv_short == 0.0 or cv_long == 0.0:
        raise DegenerateGaitError("zero swing-time variability makes the CV asymmetry undefined")

    return RawFeatures(
        z1=float(np.mean(short)),
        z2=float(np.mean(long_)),
        z3=gait_asymmetry(short, long_),
        z4=float(np.mean(left.swing_pct)),
        z5=float(np.mean(right.swing_pct)),
        z6=float(np.mean(swing_l)),
        z7=float(np.mean(swing_r)),
        z8=cv_short,
        z9=cv_long,
        z10=100.0 * abs(np.log(cv_short / cv_long)),
        z11=_cv(swing_l, "left swing time"),
        z12=_cv(swing_r, "right swing time"),
        z13=_cv(left.stride_duration, "left stride time"),
        z14=_cv(right.stride_duration, "right stride time"),
    )


def reduce_features(z: RawFeatures) -> np.ndarray:
    """Average the per-foot pairs into the ten model inputs (unnormalized)."""
    return np.array(
        [
            z.z1,
            z.z2,
            z.z3,
            (z.z4 + z.z5) / 2,
            (z.z6 + z.z7) / 2,
            z.z8,
            z.z9,
            z.z10,
            (z.z11 + z.z12) / 2,
            (z.z13 + z.z14) / 2,
        ]
    )


@dataclass(frozen=True, eq=False)
class NormalizationParams:
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mins", np.asarray(self.mins, dtype=np.float64))
        object.__setattr__(self, "maxs", np.asarray(self.maxs, dtype=np.float64))
        if self.mins.shape != self.maxs.shape:
            raise ValueError("mins and maxs differ in shape")
        for j in np.flatnonzero(~(self.maxs > self.mins)):
            raise DegenerateFeatureError(_feature_name(j, len(self.mins)))

    def to_dict(self) -> dict:
        return {"mins": self.mins.tolist(), "maxs": self.maxs.tolist()}

    @classmethod
    def from_dict(cls, d) -> "NormalizationParams":
        return cls(np.asarray(d["mins"], dtype=np.float64), np.asarray(d["maxs"], dtype=np.float64))


def _feature_name(j, width):
    return FEATURE_NAMES[j] if width == N_FEATURES else f"feature {j + 1}"


def fit_normalization(train, allow_constant: bool = False) -> NormalizationParams:
    """Per-feature min and max over the rows of ``train``.

    A constant feature raises :class:`DegenerateFeatureError` unless
    ``allow_constant``, in which case its span is widened to 1 so the
    scaling stays defined (used for tiny cross-validation folds).
    """
    train = np.atleast_2d(np.asarray(train, dtype=np.float64))
    mins, maxs = train.min(axis=0), train.max(axis=0)
    flat = np.flatnonzero(maxs <= mins)
    if len(flat) and not allow_constant:
        raise DegenerateFeatureError(_feature_name(flat[0], train.shape[1]))
    if len(flat):
        log.warning("constant feature(s) %s in training data; using unit span",
                    ", ".join(_feature_name(j, train.shape[1]) for j in flat))
        maxs = maxs.copy()
        maxs[flat] = mins[flat] + 1.0
    return NormalizationParams(mins, maxs)


def apply_normalization(v, params: NormalizationParams) -> np.ndarray:
    """Min-max scale ``v`` (one vector or a matrix of rows), clipped to [0, 1]."""
    v = np.asarray(v, dtype=np.float64)
    return np.clip((v - params.mins) / (params.maxs - params.mins), 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class FeatureVector:
    x: np.ndarray
    y_star: int
    subject_id: str = ""
    dataset: str = ""

    def __post_init__(self):
        if self.y_star not in (-1, 1):
            raise ValueError(f"label must be -1 or +1, got {self.y_star}")
