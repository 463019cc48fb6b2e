import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardylab.hardy import hardy_constant, hardy_sharpness_sweep, hardy_sides, near_extremal

# ratios from extended-precision (long double) cumulative sums, evaluated independently
FROZEN_NEAR_EXTREMAL = {
    (10**5, 1.0): 0.6988392845199772,
    (10**5, 0.1): 0.8280747869819166,
    (10**5, 0.01): 0.7943957985501353,
    (10**6, 1.0): 0.6990612414643148,
    (10**6, 0.1): 0.8602895549429859,
    (10**6, 0.01): 0.8279408450930692,
}


def test_constant():
    assert hardy_constant(2) == 4.0
    assert math.isclose(hardy_constant(3), 3.375)


def test_impulse_against_zeta():
    N = 10**6
    a = np.zeros(N)
    a[0] = 1.0
    r = hardy_sides(a, 2.0)
    oracle = float(mpmath.zeta(2) - mpmath.zeta(2, N + 1))
    assert math.isclose(r.lhs, oracle, rel_tol=1e-13)
    assert r.rhs == 4.0
    assert math.isclose(r.ratio, 0.4112, abs_tol=1e-4)


def test_harmonic_sequence():
    N = 10**6
    r = hardy_sides(1.0 / np.arange(1, N + 1), 2.0)
    assert math.isclose(r.lhs, 4.5996358073478945, rel_tol=1e-12)
    assert math.isclose(r.rhs, 6.579732267394906, rel_tol=1e-12)
    assert math.isclose(r.ratio, 0.699, abs_tol=1e-3)


def test_small_case_by_hand():
    # a = (1, 1): lhs = 1 + 1 = 2, rhs = 4 * 2
    r = hardy_sides([1.0, 1.0], 2.0)
    assert (r.lhs, r.rhs, r.ratio) == (2.0, 8.0, 0.25)


def test_zero_sequence():
    r = hardy_sides(np.zeros(10), 2.0)
    assert (r.lhs, r.rhs, r.ratio) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("N,eps", sorted(FROZEN_NEAR_EXTREMAL))
def test_near_extremal_frozen(N, eps):
    r = hardy_sides(near_extremal(2.0, eps, N), 2.0)
    assert math.isclose(r.ratio, FROZEN_NEAR_EXTREMAL[N, eps], rel_tol=1e-9)


def test_eps_one_is_below_point_nine():
    assert hardy_sharpness_sweep(2.0, [1.0], 10**5)[0].ratio < 0.9


def test_sweep_reports_eps_in_order():
    reps = hardy_sharpness_sweep(2.0, [1.0, 0.5, 0.2], 10**4)
    assert [r.eps for r in reps] == [1.0, 0.5, 0.2]
    assert reps[0].ratio < reps[1].ratio < reps[2].ratio


def test_ratio_is_not_monotone_in_eps_at_fixed_truncation():
    # at fixed N the ratio peaks near eps ~ 0.15 and then falls towards the eps -> 0 limit
    reps = hardy_sharpness_sweep(2.0, [1.0, 0.1, 0.01], 10**6)
    assert reps[1].ratio > reps[2].ratio


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 10.0])
def test_inequality_on_random_sequences(p, rng):
    for _ in range(500):
        a = rng.random(1000) ** rng.uniform(1, 6)
        assert hardy_sides(a, p).ratio <= 1.0


@given(
    st.lists(st.floats(0, 1e6), min_size=1, max_size=300).filter(lambda v: any(x > 0 for x in v)),
    st.sampled_from([1.5, 2.0, 3.0, 10.0]),
)
def test_inequality_property(a, p):
    assert hardy_sides(np.array(a), p).ratio <= 1.0


@given(st.floats(1e-3, 1e3), st.sampled_from([1.5, 2.0, 3.0]))
def test_scaling_invariance(lam, p):
    a = 1.0 / np.arange(1, 501) ** 0.7
    r0 = hardy_sides(a, p).ratio
    assert math.isclose(hardy_sides(lam * a, p).ratio, r0, rel_tol=1e-12)


def test_prefix_sums_agree_between_paths():
    N = 10**5
    a = near_extremal(2.0, 0.3, N)
    n = np.arange(1, N + 1, dtype=np.longdouble)
    s = np.cumsum(a.astype(np.longdouble))
    ref = float(np.sum((s / n) ** 2))
    assert math.isclose(hardy_sides(a, 2.0).lhs, ref, rel_tol=1e-13)


@pytest.mark.parametrize("p", [1.0, 0.5, -2.0])
def test_rejects_small_p(p):
    with pytest.raises(ValueError):
        hardy_sides([1.0, 2.0], p)


def test_rejects_negative_and_complex():
    with pytest.raises(ValueError):
        hardy_sides([1.0, -1e-9], 2.0)
    with pytest.raises(ValueError):
        hardy_sides([1.0 + 1j], 2.0)


def test_sweep_validation():
    with pytest.raises(ValueError):
        hardy_sharpness_sweep(2.0, [], 10**4)
    with pytest.raises(ValueError):
        hardy_sharpness_sweep(2.0, [0.1], 999)
    with pytest.raises(ValueError):
        hardy_sharpness_sweep(2.0, [0.0], 10**4)
