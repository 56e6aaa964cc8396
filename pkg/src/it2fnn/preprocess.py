"""Recording cleanup: edge trimming, median filtering, turnaround excision."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InsufficientGaitError, TooShortError
from .features import MIN_STRIDES, detect_strides
from .vgrf_io import VgrfRecording

# 1.4826 * MAD estimates the standard deviation of normally distributed data
MAD_SCALE = 1.4826


@dataclass(frozen=True)
class PreprocessConfig:
    trim_s: float = 20.0
    median_window: int = 10
    turnaround_mad_k: float = 3.0
    remove_turnarounds: bool = True
    swing_threshold_n: float = 20.0

    def __post_init__(self):
        if self.trim_s < 0:
            raise ValueError("trim_s must be nonnegative")
        if self.median_window < 1:
            raise ValueError("median_window must be >= 1")
        if self.turnaround_mad_k <= 0:
            raise ValueError("turnaround_mad_k must be positive")
        if self.swing_threshold_n <= 0:
            raise ValueError("swing_threshold_n must be positive")


def trim_edges(rec: VgrfRecording, trim_s: float) -> VgrfRecording:
    """Keep samples with ``t0 + trim_s <= t <= t_end - trim_s``."""
    if rec.duration_s <= 2 * trim_s:
        raise TooShortError(f"recording lasts {rec.duration_s:.2f}s, cannot trim {trim_s}s from each end")
    t = rec.time_s
    eps = 1e-9
    keep = (t >= t[0] + trim_s - eps) & (t <= t[-1] - trim_s + eps)
    return rec.with_channels(rec.channels[keep], keep=keep)


def median_filter(series, window: int) -> np.ndarray:
    """Centered running median with shrinking edge windows.

    For even ``window`` the window covers ``window // 2`` samples before and
    ``window // 2 - 1`` after the current one, and the median of an even
    count is the mean of the two middle values.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    return _kernels.median_filter(np.asarray(series, dtype=np.float64), int(window))


def filter_recording(rec: VgrfRecording, window: int) -> VgrfRecording:
    channels = rec.channels
    filtered = np.column_stack([median_filter(channels[:, c], window) for c in range(channels.shape[1])])
    return rec.with_channels(filtered)


def stride_outliers(durations, k: float, resolution: float = 0.0) -> np.ndarray:
    """Boolean mask of durations more than ``k`` robust deviations from the median.

    The robust deviation is the scaled MAD, floored at ``resolution`` so that
    perfectly regular sampled strides do not flag one-sample jitter.
    """
    durations = np.asarray(durations, dtype=np.float64)
    med = np.median(durations)
    spread = max(MAD_SCALE * float(np.median(np.abs(durations - med))), resolution)
    return np.abs(durations - med) > k * spread


def remove_turnarounds(rec: VgrfRecording, k: float = 3.0, threshold_n: float = 20.0):
    """Excise strides of irregular duration, on either foot.

    Returns ``(recording, removed)`` where ``removed`` lists the excised
    ``(t_start, t_end)`` intervals, half-open. The kept samples are
    renumbered into segments so later stride detection does not bridge a
    cut.
    """
    removed = []
    for force in (rec.total_left_n, rec.total_right_n):
        strides = detect_strides(force, rec.time_s, threshold_n, rec.segment)
        if len(strides) < MIN_STRIDES:
            raise InsufficientGaitError(f"found {len(strides)} strides, need at least {MIN_STRIDES}")
        flagged = stride_outliers(strides.stride_duration, k, resolution=1.0 / rec.sample_rate_hz)
        removed.extend(zip(strides.stance_start[flagged], strides.stride_end[flagged]))
    if not removed:
        return rec, []

    removed = _merge_intervals(removed)
    t = rec.time_s
    drop = np.zeros(len(t), dtype=bool)
    for lo, hi in removed:
        drop |= (t >= lo) & (t < hi)
    keep = ~drop
    # new segment whenever a dropped run or an old boundary separates kept samples
    boundary = np.concatenate([[0], np.cumsum(drop)])[:-1]
    segment = rec.segment * (len(t) + 1) + boundary
    _, segment = np.unique(segment[keep], return_inverse=True)
    out = rec.with_channels(rec.channels[keep], keep=keep, segment=segment.astype(np.int64))
    return out, removed


def _merge_intervals(intervals):
    merged = []
    for lo, hi in sorted((float(a), float(b)) for a, b in intervals):
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def preprocess(rec: VgrfRecording, cfg: PreprocessConfig | None = None):
    """Trim, filter, then excise turnarounds. Returns ``(recording, removed)``."""
    cfg = cfg or PreprocessConfig()
    out = trim_edges(rec, cfg.trim_s)
    out = filter_recording(out, cfg.median_window)
    removed = []
    if cfg.remove_turnarounds:
        out, removed = remove_turnarounds(out, cfg.turnaround_mad_k, cfg.swing_threshold_n)
    return out, removed
