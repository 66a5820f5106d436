import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from robust_frechet.bounds import (
    BoundInputs,
    bound_table,
    c_epsilon_geodesic,
    epsilon_term_subgaussian,
    mom_block_size,
    radius_banach,
    radius_geodesic,
    radius_geodesic_subgaussian,
    radius_mom,
)
from robust_frechet.exceptions import HypothesisViolationError, InvalidArgumentError

WORKED = dict(n=100, delta=3 / math.e, epsilon=0.0, global_variance=100.0, sigma_w=1.0, k_min=1.0)


def reference_geodesic(n, delta, eps, glob, sigma_w, k_min):
    # Written out independently of the module under test.
    quotient = 0.0 if eps == 0 else eps / min(eps, 0.5 - eps)
    c = 928 * (1 + quotient)
    eps_term = math.sqrt(eps) * sigma_w
    return c / k_min * (8 * (glob / n) ** 0.5 + (sigma_w**2 * math.log(3 / delta) / n) ** 0.5 + eps_term)


def test_c_epsilon_examples():
    assert c_epsilon_geodesic(0.0) == 928.0
    assert c_epsilon_geodesic(0.25) == 1856.0
    assert c_epsilon_geodesic(0.1) == 1856.0


def test_geodesic_worked_examples():
    assert radius_geodesic(BoundInputs(**WORKED)) == pytest.approx(7516.8, rel=1e-12)
    assert radius_geodesic(BoundInputs(n=100, delta=0.1, k_min=1.0)) == 0.0
    half = radius_geodesic(BoundInputs(n=100, delta=0.1, sigma_w=1.0, k_min=1.0))
    quarter = radius_geodesic(BoundInputs(n=200, delta=0.1, sigma_w=1.0, k_min=1.0))
    assert quarter == pytest.approx(half / math.sqrt(2))
    with pytest.raises(InvalidArgumentError):
        radius_geodesic(BoundInputs(**dict(WORKED, k_min=0.0)))
    with pytest.raises(InvalidArgumentError):
        radius_geodesic(BoundInputs(n=10, delta=1e-5, k_min=1.0))


def test_subgaussian_worked_examples():
    assert radius_geodesic_subgaussian(BoundInputs(**WORKED)) == pytest.approx(1.1, rel=1e-12)
    assert radius_geodesic_subgaussian(BoundInputs(n=100, delta=0.1, k_min=1.0)) == 0.0
    double = radius_geodesic_subgaussian(BoundInputs(**WORKED, subgaussian_L=2.0))
    assert double == pytest.approx(2.2, rel=1e-12)
    with pytest.raises(HypothesisViolationError):
        radius_geodesic_subgaussian(BoundInputs(n=5, delta=1e-3, k_min=1.0))


def test_banach_examples():
    assert radius_banach(BoundInputs(n=100, delta=0.1, C_X=1.0)) == 0.0
    inp = BoundInputs(n=100, delta=0.1, global_variance=100.0, C_X=2.0)
    assert radius_banach(inp) == pytest.approx(928 / 2 * 23 * math.sqrt(100 / 200))
    inp = BoundInputs(n=100, delta=0.1, global_variance=100.0, C_X=1.0)
    assert radius_banach(inp) == pytest.approx(928 * 23 * 1.0)
    with pytest.raises(InvalidArgumentError):
        radius_banach(BoundInputs(n=100, delta=0.1, C_X=0.0))


def test_mom_and_epsilon_term_examples():
    assert radius_mom(0.0) == 0.0
    assert radius_mom(2.5) == 20.0
    assert tuple(mom_block_size(1000, 0.1)) == (19, 52)
    assert epsilon_term_subgaussian(1, 1 / 3, 1) == pytest.approx(math.sqrt(math.log(9)) / 3)
    assert epsilon_term_subgaussian(1, 1 / 3, 1) == pytest.approx(0.4941, abs=1e-4)
    assert epsilon_term_subgaussian(1, 0.0, 1) == 0.0
    assert epsilon_term_subgaussian(1, 0.2, 3) == pytest.approx(3 * epsilon_term_subgaussian(1, 0.2, 1))


def test_k_min_resolution():
    from_kappa = BoundInputs(n=100, delta=0.1, kappa0=1.0, kappa1=1.2).resolved_k_min()
    assert from_kappa == pytest.approx(1 - 1.2 + 1 / 1.2)
    assert BoundInputs(n=100, delta=0.1, alpha=0.5, beta=1.25).resolved_k_min() == pytest.approx(0.25)
    with pytest.raises(InvalidArgumentError):
        BoundInputs(n=100, delta=0.1).resolved_k_min()


def test_richer_moment_map_never_increases_radius():
    base = dict(n=1000, delta=0.1, epsilon=0.1, global_variance=1.0, sigma_w=2.0, k_min=1.0)
    plain = radius_geodesic(BoundInputs(**base))
    richer = radius_geodesic(BoundInputs(**base, nu={4.0: 2.5, 8.0: 3.0}))
    assert richer <= plain


def test_bound_table_reports_inapplicable_rows():
    table = bound_table(BoundInputs(**WORKED))
    assert table["radius_geodesic"] == pytest.approx(7516.8)
    assert table["radius_banach"].startswith("n/a")


params = st.fixed_dictionaries(
    {
        "n": st.integers(50, 5000),
        "delta": st.floats(1e-4, 0.5),
        "epsilon": st.floats(0.0, 0.2),
        "global_variance": st.floats(0.0, 100.0),
        "sigma_w": st.floats(0.0, 10.0),
        "k_min": st.floats(0.1, 1.0),
    }
)


@given(params)
def test_geodesic_matches_reference(p):
    try:
        value = radius_geodesic(BoundInputs(**p))
    except InvalidArgumentError:
        return
    expected = reference_geodesic(p["n"], p["delta"], p["epsilon"], p["global_variance"], p["sigma_w"], p["k_min"])
    assert value == pytest.approx(expected, rel=1e-12)
