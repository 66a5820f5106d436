import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from robust_frechet.exceptions import InvalidArgumentError
from robust_frechet.spaces import Euclidean
from robust_frechet.trimming import (
    TrimConfig,
    c_epsilon,
    contaminated_count,
    epsilon_moment_term,
    kept_indices,
    trim_count,
    trimmed_concentration_bound,
    trimmed_mean,
    trimmed_mean_rows,
    trimmed_objective,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)


@st.composite
def array_and_t(draw, max_n=60):
    n = draw(st.integers(1, max_n))
    values = draw(arrays(np.float64, n, elements=finite))
    t = draw(st.integers(0, (n - 1) // 2))
    return values, t


def sort_oracle(values, t):
    s = sorted(values)
    kept = s[t : len(s) - t]
    return math.fsum(kept) / len(kept)


@pytest.mark.parametrize(
    "n, eps, delta, expected",
    [(100, 0.1, 0.1, 15), (100, 0.0, 0.5, 2), (10, 0.0, 2 / math.e, 1)],
)
def test_trim_count_examples(n, eps, delta, expected):
    assert trim_count(n, eps, delta) == expected


def test_contaminated_count_absorbs_representation_error():
    assert contaminated_count(100, 0.05) == 5
    assert contaminated_count(100, 0.07) == 7
    assert contaminated_count(10, 0.29) == 2


def test_trim_config_derives_t_and_rejects_infeasible():
    assert TrimConfig(100, 0.1, 0.1).t == 15
    assert TrimConfig(10, t=4).t == 4
    with pytest.raises(InvalidArgumentError):
        TrimConfig(10, t=5)
    with pytest.raises(InvalidArgumentError):
        TrimConfig(4, 0.0, 1e-6)
    with pytest.raises(InvalidArgumentError):
        TrimConfig(10, epsilon=0.5)


def test_trimmed_mean_examples():
    assert trimmed_mean([0, 1, 2, 3, 100], 1) == 2.0
    assert trimmed_mean([5, 5, 5, 5, 5], 2) == 5.0
    assert trimmed_mean([1.0, 2.0, 4.0], 0) == pytest.approx(7 / 3, rel=1e-15)
    with pytest.raises(InvalidArgumentError):
        trimmed_mean([1, 2, 3, 4], 2)
    with pytest.raises(InvalidArgumentError):
        trimmed_mean([], 0)


@given(array_and_t())
def test_trimmed_mean_matches_sort_oracle(case):
    values, t = case
    expected = sort_oracle(values.tolist(), t)
    assert trimmed_mean(values, t) == pytest.approx(expected, rel=1e-12, abs=1e-12)


@given(array_and_t(), st.randoms(use_true_random=False))
def test_trimmed_mean_permutation_invariant(case, rnd):
    values, t = case
    perm = values.tolist()
    rnd.shuffle(perm)
    assert trimmed_mean(perm, t) == trimmed_mean(values, t)


@given(array_and_t(), arrays(np.float64, 60, elements=st.floats(0, 1e3)))
def test_trimmed_mean_monotone(case, bump):
    values, t = case
    larger = values + bump[: values.size]
    assert trimmed_mean(larger, t) >= trimmed_mean(values, t) - 1e-9 * (1 + np.abs(values).max())


@given(array_and_t(), st.floats(-1e3, 1e3, allow_nan=False))
def test_trimmed_mean_homogeneous(case, lam):
    values, t = case
    scale = 1e-9 * (1 + abs(lam) * np.abs(values).max())
    assert trimmed_mean(lam * values, t) == pytest.approx(lam * trimmed_mean(values, t), abs=scale)


@given(array_and_t())
def test_rows_and_kept_indices_agree_with_scalar_version(case):
    values, t = case
    rows = np.vstack([values, -values])
    out = trimmed_mean_rows(rows, t)
    tol = 1e-9 * (1 + np.abs(values).max())
    assert out[0] == pytest.approx(trimmed_mean(values, t), abs=tol)
    assert out[1] == pytest.approx(-trimmed_mean(values, t), abs=tol)
    kept = kept_indices(values, t)
    assert len(kept) == values.size - 2 * t
    assert np.mean(values[kept]) == pytest.approx(trimmed_mean(values, t), abs=tol)


def test_trimmed_objective_examples():
    space = Euclidean()
    X = np.array([[0.0], [10.0]])
    assert trimmed_objective(space, X, 0, [0.0], [10.0]) == 0.0
    assert trimmed_objective(space, X, 0, [3.0], [3.0]) == 0.0
    rng = np.random.default_rng(0)
    Y = rng.standard_normal((20, 3))
    b, a = rng.standard_normal(3), rng.standard_normal(3)
    expected = np.mean(np.sum((Y - b) ** 2, 1)) - np.mean(np.sum((Y - a) ** 2, 1))
    assert trimmed_objective(space, Y, 0, b, a) == pytest.approx(expected, rel=1e-12)


@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_trimmed_objective_antisymmetric(n, seed):
    rng = np.random.default_rng(seed)
    space = Euclidean()
    X = rng.standard_normal((n, 2)) * 10
    b, a = rng.standard_normal(2), rng.standard_normal(2)
    t = int(rng.integers(0, (n - 1) // 2 + 1))
    fwd = trimmed_objective(space, X, t, b, a)
    back = trimmed_objective(space, X, t, a, b)
    assert fwd == pytest.approx(-back, rel=1e-12, abs=1e-12)


def test_c_epsilon_convention_and_examples():
    assert c_epsilon(0.0, 384.0) == 384.0
    assert c_epsilon(0.25, 384.0) == 768.0
    assert c_epsilon(0.4, 1.0) == pytest.approx(1 + 0.4 / 0.1)


def test_trimmed_concentration_bound_examples():
    assert trimmed_concentration_bound(0.0, {2: 1.0}, 100, 3 / math.e, 0.0) == pytest.approx(38.4, rel=1e-12)
    assert trimmed_concentration_bound(0.0, {2: 0.0}, 100, 0.1, 0.0) == 0.0
    with_eps = trimmed_concentration_bound(1.0, {2: 0.0}, 100, 0.1, 0.25)
    assert with_eps == pytest.approx(768 * 8.0)


def test_epsilon_moment_term_takes_minimum_over_grid():
    nu = {2.0: 1.0, 4.0: 1.0}
    assert epsilon_moment_term(nu, 0.0) == 0.0
    assert epsilon_moment_term(nu, 0.01) == pytest.approx(min(0.01**0.5, 0.01**0.75))
    assert epsilon_moment_term({2.0: 1.0}, 0.01) == pytest.approx(0.1)
    with pytest.raises(InvalidArgumentError):
        epsilon_moment_term({}, 0.1)
