import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaitgen import make_recording, square_wave
from it2fnn.errors import DegenerateFeatureError, DegenerateGaitError, InsufficientGaitError
from it2fnn.features import (
    NormalizationParams,
    RawFeatures,
    StrideTable,
    apply_normalization,
    compute_raw_features,
    fit_normalization,
    gait_asymmetry,
    reduce_features,
    segment_strides,
    short_long_swings,
)

Z3_035_042 = 18.232155679395472  # 100*|ln(0.35/0.42)|, evaluated with math.log


def strides_of(pairs):
    return segment_strides(square_wave(pairs), 20.0)


def table(swings, strides=None):
    swings = np.asarray(swings, float)
    strides = np.full(len(swings), 1.0) if strides is None else np.asarray(strides, float)
    start = np.concatenate([[0.0], np.cumsum(strides)[:-1]])
    return StrideTable(start, start + strides - swings, start + strides)


def test_square_wave_60_40():
    f = np.tile(np.r_[np.full(60, 600.0), np.zeros(40)], 12)
    t = segment_strides(f, 20.0, sample_rate_hz=100.0)
    # the first stance has no preceding heel strike, so 12 periods give 10 strides
    assert len(t) == 10
    np.testing.assert_allclose(t.swing_duration, 0.4, atol=1e-9)
    np.testing.assert_allclose(t.stride_duration, 1.0, atol=1e-9)
    np.testing.assert_allclose(t.swing_pct, 40.0, atol=1e-9)


def test_all_zero_force():
    with pytest.raises(InsufficientGaitError):
        segment_strides(np.zeros(2000), 20.0)


def test_alternating_swing_pct():
    t = strides_of([(0.65, 0.35), (0.35, 0.65)] * 5)
    np.testing.assert_allclose(t.swing_pct, [35, 65] * 5, atol=1e-9)


def test_artifact_strides_discarded():
    pairs = [(0.6, 0.4)] * 6 + [(0.2, 0.1)] + [(0.6, 0.4)] * 2 + [(4.0, 0.5)] + [(0.6, 0.4)] * 3
    t = strides_of(pairs)
    assert len(t) == 11
    np.testing.assert_allclose(t.stride_duration, 1.0, atol=1e-9)


def test_threshold_must_be_positive():
    with pytest.raises(ValueError):
        segment_strides(np.zeros(10), 0.0)


def test_stride_table_ordering():
    t = strides_of([(0.62, 0.38), (0.6, 0.41), (0.59, 0.4)] * 3)
    assert np.all(t.stance_start < t.swing_start)
    assert np.all(t.swing_start < t.stride_end)
    assert np.all((t.swing_pct > 0) & (t.swing_pct < 100))


def test_asymmetry_constant_short_long():
    assert gait_asymmetry(np.full(8, 0.35), np.full(8, 0.42)) == pytest.approx(Z3_035_042, abs=1e-9)


def test_z3_from_square_waves_0p35_0p42():
    # swing times scale by 1 or 2 so the short/long ratio stays 0.35/0.42
    left = strides_of([(0.65, 0.35), (0.60, 0.70)] * 4)
    right = strides_of([(0.58, 0.42), (0.60, 0.84)] * 4)
    z = compute_raw_features(left, right)
    assert z.z3 == pytest.approx(Z3_035_042, abs=1e-9)
    assert z.z10 == pytest.approx(0.0, abs=1e-9)


def test_symmetric_gait_z3_zero():
    pairs = [(0.6, 0.4), (0.62, 0.37), (0.58, 0.43)] * 3
    z = compute_raw_features(strides_of(pairs), strides_of(pairs))
    assert z.z3 == pytest.approx(0.0, abs=1e-9)


def test_constant_swings_degenerate():
    t = table([0.5] * 6)  # exactly representable, so the spread is exactly 0
    short, long_ = short_long_swings(t, t)
    assert np.std(short) == 0
    with pytest.raises(DegenerateGaitError):
        compute_raw_features(t, t)


def test_raw_feature_formulas_by_hand():
    left = table([0.40, 0.42, 0.38, 0.41, 0.39], [1.0, 1.1, 0.95, 1.05, 1.0])
    right = table([0.41, 0.40, 0.40, 0.43, 0.37, 0.5], [1.02, 1.0, 0.99, 1.1, 0.98, 1.2])
    z = compute_raw_features(left, right)
    L, R = [0.40, 0.42, 0.38, 0.41, 0.39], [0.41, 0.40, 0.40, 0.43, 0.37]
    S = [min(a, b) for a, b in zip(L, R)]
    G = [max(a, b) for a, b in zip(L, R)]

    def mean(v):
        return sum(v) / len(v)

    def cv(v):
        mu = mean(v)
        return 100 * math.sqrt(sum((x - mu) ** 2 for x in v) / len(v)) / mu

    sl, sr = [1.0, 1.1, 0.95, 1.05, 1.0], [1.02, 1.0, 0.99, 1.1, 0.98]
    expected = [
        mean(S), mean(G), mean([100 * abs(math.log(s / g)) for s, g in zip(S, G)]),
        mean([100 * a / b for a, b in zip(L, sl)]), mean([100 * a / b for a, b in zip(R, sr)]),
        mean(L), mean(R), cv(S), cv(G), 100 * abs(math.log(cv(S) / cv(G))),
        cv(L), cv(R), cv(sl), cv(sr),
    ]
    np.testing.assert_allclose(z.as_array(), expected, rtol=1e-12)


def test_reduce_features_table():
    z = RawFeatures.from_array(np.arange(1, 15, dtype=float))
    z = RawFeatures(**{**z.__dict__, "z1": 0.35, "z4": 38.0, "z5": 42.0})
    x = reduce_features(z)
    assert x[0] == 0.35
    assert x[3] == 40.0
    assert x[4] == (6 + 7) / 2
    assert x[8] == (11 + 12) / 2
    assert x[9] == (13 + 14) / 2
    np.testing.assert_array_equal(x[[1, 2, 5, 6, 7]], [2, 3, 8, 9, 10])


def test_reduce_constant():
    np.testing.assert_array_equal(reduce_features(RawFeatures.from_array(np.full(14, 2.5))), np.full(10, 2.5))


def test_normalization_examples():
    p = fit_normalization(np.array([[2.0], [4.0]]))
    assert p.mins.tolist() == [2.0] and p.maxs.tolist() == [4.0]
    assert apply_normalization([3.0], p).tolist() == [0.5]
    assert apply_normalization([5.0], p).tolist() == [1.0]
    assert apply_normalization([2.0], p).tolist() == [0.0]


def test_constant_feature_named():
    X = np.random.default_rng(0).random((5, 10))
    X[:, 6] = 1.0
    with pytest.raises(DegenerateFeatureError, match="x7"):
        fit_normalization(X)


def test_normalization_round_trip_dict():
    p = NormalizationParams([0.0, 1.0], [2.0, 3.0])
    q = NormalizationParams.from_dict(p.to_dict())
    np.testing.assert_array_equal(p.mins, q.mins)
    np.testing.assert_array_equal(p.maxs, q.maxs)


swing_lists = st.lists(st.floats(0.2, 0.6), min_size=5, max_size=12)


@settings(max_examples=100, deadline=None)
@given(swing_lists, swing_lists)
def test_swap_feet_invariance(a, b):
    n = min(len(a), len(b))
    a, b = np.array(a[:n]), np.array(b[:n])
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        return
    left, right = table(a), table(b)
    try:
        z = compute_raw_features(left, right)
    except DegenerateGaitError:
        return
    zs = compute_raw_features(right, left)
    x, xs = reduce_features(z), reduce_features(zs)
    np.testing.assert_allclose([z.z1, z.z2, z.z3], [zs.z1, zs.z2, zs.z3], rtol=1e-12)
    np.testing.assert_allclose(x[[3, 4, 8, 9]], xs[[3, 4, 8, 9]], rtol=1e-12)


@settings(max_examples=100, deadline=None)
@given(swing_lists)
def test_z3_zero_iff_symmetric(a):
    a = np.array(a)
    short, long_ = short_long_swings(table(a), table(a))
    assert gait_asymmetry(short, long_) == 0.0
    b = a.copy()
    b[0] += 0.05
    short, long_ = short_long_swings(table(a), table(b))
    assert gait_asymmetry(short, long_) > 0.0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 10.0))
def test_force_scaling_invariance(scale):
    pairs_l = [(0.6, 0.4), (0.62, 0.37), (0.58, 0.43), (0.61, 0.41)] * 2
    pairs_r = [(0.59, 0.41), (0.6, 0.39), (0.63, 0.40), (0.57, 0.42)] * 2
    fl, fr = square_wave(pairs_l), square_wave(pairs_r)
    base = compute_raw_features(segment_strides(fl, 20.0), segment_strides(fr, 20.0))
    scaled = compute_raw_features(segment_strides(fl * scale, 20.0), segment_strides(fr * scale, 20.0))
    np.testing.assert_array_equal(base.as_array(), scaled.as_array())


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3), min_size=2, max_size=20))
def test_normalization_min_to_zero_max_to_one(rows):
    X = np.array(rows)
    if np.any(np.ptp(X, axis=0) == 0):
        with pytest.raises(DegenerateFeatureError):
            fit_normalization(X)
        return
    p = fit_normalization(X)
    Z = apply_normalization(X, p)
    np.testing.assert_array_equal(Z[X.argmin(axis=0), range(3)], 0.0)
    np.testing.assert_array_equal(Z[X.argmax(axis=0), range(3)], 1.0)
    assert np.all((Z >= 0) & (Z <= 1))


def test_feature_recording_pipeline():
    from it2fnn.pipeline import extract_features
    from it2fnn.preprocess import PreprocessConfig

    rng = np.random.default_rng(5)
    pairs = [(0.6 + 0.02 * rng.standard_normal(), 0.4 + 0.02 * rng.standard_normal()) for _ in range(80)]
    f = square_wave(pairs)
    x, z = extract_features(make_recording(f, f), PreprocessConfig(trim_s=5.0))
    assert x.shape == (10,)
    assert z.z3 == pytest.approx(0.0, abs=1e-12)
