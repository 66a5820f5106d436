import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_spd
from robust_frechet.exceptions import InvalidArgumentError
from robust_frechet.spaces import (
    BuresWasserstein,
    Gaussian,
    GaussianSample,
    barycenter_fixed_point,
    hugging_lower_bound_extendible,
    hugging_lower_bound_kappa,
    spd_sqrt,
    transport_map,
    w2_distance,
)
from robust_frechet.spaces.bures_wasserstein import w2_squared_batch

seeds = st.integers(0, 2**32 - 1)


def random_gaussian(rng, m, lo=0.5, hi=2.0):
    return Gaussian(rng.standard_normal(m), random_spd(rng, m, lo, hi))


def test_spd_sqrt_examples(rng):
    np.testing.assert_allclose(spd_sqrt(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(spd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    V = random_spd(rng, 5, 0.1, 10)
    R = spd_sqrt(V)
    assert np.linalg.norm(R @ R - V) <= 1e-10 * np.linalg.norm(V)
    assert np.all(np.linalg.eigvalsh(R) > 0)
    with pytest.raises(InvalidArgumentError):
        spd_sqrt(np.diag([1.0, -1.0]))


def test_gaussian_validation():
    with pytest.raises(InvalidArgumentError):
        Gaussian([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(InvalidArgumentError):
        Gaussian([0.0], [[1.0, 0.0], [0.0, 1.0]])
    g = Gaussian([0.0], [[2.0]])
    with pytest.raises(ValueError):
        g.cov[0, 0] = 3.0


def test_w2_examples():
    assert w2_distance(Gaussian(np.zeros(2), np.eye(2)), Gaussian(np.zeros(2), 4 * np.eye(2))) == pytest.approx(
        math.sqrt(2), abs=1e-12
    )
    V = np.array([[2.0, 0.5], [0.5, 1.0]])
    assert w2_distance(Gaussian([1.0, 2.0], V), Gaussian([4.0, 6.0], V)) == pytest.approx(5.0, rel=1e-9)
    assert w2_distance(Gaussian([1.0, 2.0], V), Gaussian([1.0, 2.0], V)) == pytest.approx(0.0, abs=1e-7)
    with pytest.raises(InvalidArgumentError):
        w2_distance(Gaussian([0.0], [[1.0]]), Gaussian([0.0, 0.0], np.eye(2)))


@given(seeds)
def test_w2_batch_matches_pairwise(seed):
    rng = np.random.default_rng(seed)
    pts = [random_gaussian(rng, 3) for _ in range(5)]
    S = GaussianSample.from_points(pts)
    g = random_gaussian(rng, 3)
    expected = [w2_distance(p, g) ** 2 for p in pts]
    np.testing.assert_allclose(w2_squared_batch(S, g), expected, rtol=1e-10, atol=1e-12)


def test_transport_map_examples():
    T = transport_map(Gaussian([0.0], [[1.0]]), Gaussian([0.0], [[4.0]]))
    np.testing.assert_allclose(T.matrix, [[2.0]])
    g = Gaussian([1.0, -1.0], [[2.0, 0.3], [0.3, 1.0]])
    T = transport_map(g, g)
    np.testing.assert_allclose(T.matrix, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(T(np.array([3.0, 3.0])), [3.0, 3.0])
    T = transport_map(Gaussian(np.zeros(3), np.diag([1.0, 2.0, 3.0])), Gaussian(np.ones(3), np.diag([4.0, 2.0, 12.0])))
    np.testing.assert_allclose(T.matrix, np.diag([2.0, 1.0, 2.0]), atol=1e-12)


@given(seeds, st.floats(1.0, 4.0))
def test_transport_map_pushforward_and_spectrum(seed, kappa1):
    rng = np.random.default_rng(seed)
    g1, g2 = random_gaussian(rng, 4, 1.0, kappa1), random_gaussian(rng, 4, 1.0, kappa1)
    T = transport_map(g1, g2).matrix
    np.testing.assert_allclose(T, T.T, atol=1e-12)
    assert np.linalg.norm(T @ g1.cov @ T.T - g2.cov) <= 1e-8 * np.linalg.norm(g2.cov)
    eig = np.linalg.eigvalsh(T)
    assert eig.min() >= math.sqrt(1 / kappa1) - 1e-9
    assert eig.max() <= math.sqrt(kappa1) + 1e-9


def test_barycenter_examples():
    S = GaussianSample(np.zeros((2, 1)), np.array([[[1.0]], [[9.0]]]))
    g, info = barycenter_fixed_point(S)
    assert g.cov[0, 0] == pytest.approx(4.0, abs=1e-8)
    assert info.converged and info.residual <= 1e-10

    same = Gaussian([1.0, 2.0], [[2.0, 0.3], [0.3, 1.0]])
    g, info = barycenter_fixed_point(GaussianSample.from_points([same] * 4))
    np.testing.assert_allclose(g.cov, same.cov, atol=1e-12)
    assert info.iterations <= 1

    D = np.array([np.diag([1.0, 4.0]), np.diag([9.0, 1.0]), np.diag([4.0, 16.0])])
    w = np.array([0.2, 0.3, 0.5])
    g, _ = barycenter_fixed_point(GaussianSample(np.zeros((3, 2)), D), w)
    expected = np.einsum("i,ijk->jk", w, np.sqrt(D)) ** 2
    np.testing.assert_allclose(g.cov, expected, atol=1e-8)


@given(seeds, st.integers(1, 6), st.integers(1, 20))
def test_barycenter_residual_and_mean(seed, m, n):
    rng = np.random.default_rng(seed)
    S = GaussianSample.from_points(random_gaussian(rng, m) for _ in range(n))
    w = rng.dirichlet(np.ones(n))
    g, info = barycenter_fixed_point(S, w)
    assert info.residual <= 1e-10
    np.testing.assert_allclose(g.mean, w @ S.means, atol=1e-14)


@given(seeds)
def test_barycenter_permutation_and_rotation_equivariance(seed):
    rng = np.random.default_rng(seed)
    S = GaussianSample.from_points(random_gaussian(rng, 3) for _ in range(6))
    g, _ = barycenter_fixed_point(S)
    perm = rng.permutation(6)
    gp, _ = barycenter_fixed_point(S[perm])
    np.testing.assert_allclose(gp.cov, g.cov, atol=1e-8)
    U, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    rotated = GaussianSample(S.means @ U.T, U @ S.covs @ U.T)
    gr, _ = barycenter_fixed_point(rotated)
    np.testing.assert_allclose(gr.cov, U @ g.cov @ U.T, atol=1e-8)


def test_hugging_bounds_examples():
    assert hugging_lower_bound_kappa(2.0, 2.0) == 1.0
    assert hugging_lower_bound_kappa(1.0, 1.2) == pytest.approx(1 - 1.2 + 1 / 1.2)
    golden = (1 + math.sqrt(5)) / 2
    assert hugging_lower_bound_kappa(1.0, golden) == pytest.approx(0.0, abs=1e-15)
    b = hugging_lower_bound_extendible(1.0, 1.0)
    assert b.k_min == 1.0 and b.lambda_in == math.inf and b.lambda_out == math.inf
    assert hugging_lower_bound_extendible(0.5, 1.25).k_min == pytest.approx(0.25)
    assert hugging_lower_bound_extendible(1 / 1.3, 1.3).k_min == pytest.approx(hugging_lower_bound_kappa(1, 1.3))
    with pytest.raises(InvalidArgumentError):
        hugging_lower_bound_kappa(2.0, 1.0)


def test_descend_full_step_is_fixed_point_sweep(rng):
    bw = BuresWasserstein()
    S = GaussianSample.from_points(random_gaussian(rng, 2) for _ in range(5))
    w = np.full(5, 0.2)
    mean, _ = barycenter_fixed_point(S, w)
    stepped = bw.descend(mean, S, w, 1.0)
    assert bw.distance(stepped, mean) <= 1e-8
