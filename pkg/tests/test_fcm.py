import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from it2fnn.errors import ConfigError
from it2fnn.fcm import FcmConfig, fcm_cluster, initial_memberships, objective


def test_two_points_fixed_point():
    X = np.array([[0.0, 0.0], [1.0, 1.0]])
    res = fcm_cluster(X, FcmConfig(2, tol=1e-9))
    assert res.converged
    order = np.argsort(res.centers[:, 0])
    np.testing.assert_allclose(res.centers[order], X, atol=1e-6)
    np.testing.assert_allclose(res.memberships[:, order], np.eye(2), atol=1e-6)


def test_single_cluster_is_mean(rng):
    X = rng.random((30, 4))
    res = fcm_cluster(X, FcmConfig(1))
    np.testing.assert_allclose(res.centers[0], X.mean(axis=0), rtol=1e-12)
    np.testing.assert_array_equal(res.memberships, 1.0)


def test_duplicated_samples_same_centers(rng):
    X = np.vstack([rng.normal(0, 0.1, (10, 3)), rng.normal(1, 0.1, (10, 3))])
    cfg = FcmConfig(2, tol=1e-10, max_iter=1000)
    a = fcm_cluster(X, cfg)
    b = fcm_cluster(np.vstack([X, X]), cfg)
    ia, ib = np.argsort(a.centers[:, 0]), np.argsort(b.centers[:, 0])
    np.testing.assert_allclose(a.centers[ia], b.centers[ib], atol=1e-5)


def test_coincident_sample_is_crisp():
    X = np.array([[0.0], [0.0], [1.0]])
    init = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    res = fcm_cluster(X, FcmConfig(2), init=init)
    np.testing.assert_array_equal(res.memberships, init)
    np.testing.assert_array_equal(res.centers, [[0.0], [1.0]])


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 200), st.integers(1, 11), st.integers(1, 6), st.integers(0, 2**31))
def test_row_stochastic_and_monotone(n, d, r, seed):
    r = min(r, n)
    X = np.random.default_rng(seed).random((n, d))
    res = fcm_cluster(X, FcmConfig(r, seed=seed, max_iter=100))
    np.testing.assert_allclose(res.memberships.sum(axis=1), 1.0, atol=1e-9)
    assert np.all(res.memberships >= 0)
    h = np.array(res.objective_history)
    assert np.all(np.diff(h) <= 1e-12 * np.maximum(1.0, h[:-1]))


def test_objective_matches_history(rng):
    X = rng.random((40, 11))
    res = fcm_cluster(X, FcmConfig(4))
    assert res.final_objective == pytest.approx(objective(X, res.memberships, res.centers, 2.0), rel=1e-9)


def test_deterministic(rng):
    X = rng.random((50, 11))
    a = fcm_cluster(X, FcmConfig(5, seed=7))
    b = fcm_cluster(X, FcmConfig(5, seed=7))
    np.testing.assert_array_equal(a.centers, b.centers)
    np.testing.assert_array_equal(a.memberships, b.memberships)
    assert a.iterations == b.iterations


def test_permutation_equivariance(rng):
    X = rng.random((60, 5))
    init = initial_memberships(60, 3, 11)
    perm = rng.permutation(60)
    cfg = FcmConfig(3, tol=1e-10, max_iter=1000)
    a = fcm_cluster(X, cfg, init=init)
    b = fcm_cluster(X[perm], cfg, init=init[perm])
    np.testing.assert_allclose(a.centers, b.centers, atol=1e-8)
    np.testing.assert_allclose(a.memberships[perm], b.memberships, atol=1e-8)


def test_too_many_clusters():
    with pytest.raises(ConfigError):
        fcm_cluster(np.zeros((2, 3)), FcmConfig(3))


@pytest.mark.parametrize("kw", [dict(n_clusters=0), dict(n_clusters=2, m=1.0), dict(n_clusters=2, tol=0), dict(n_clusters=2, max_iter=0)])
def test_bad_config(kw):
    with pytest.raises(ConfigError):
        FcmConfig(**kw)


def test_nonfinite_samples():
    with pytest.raises(ConfigError):
        fcm_cluster(np.array([[0.0], [np.nan]]), FcmConfig(1))
