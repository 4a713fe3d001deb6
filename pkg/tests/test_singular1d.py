import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shearkick.core2d import ShearParams
from shearkick.errors import CriticalHitWarning, InvalidParameters, NotInvertible
from shearkick.singular1d import (
    CircleMapParams,
    compare_to_2d,
    critical_orbit_diagnostic,
    critical_points,
    f,
    f_lift,
    fprime,
    lyap1d,
    plateaus,
    rotation_number,
    staircase,
)

TWO_PI = 2 * math.pi


def bisect_root(fun, lo, hi, tol=1e-10):
    flo = fun(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (fun(mid) > 0) == (flo > 0):
            lo, flo = mid, fun(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_f_examples():
    assert f(0.5, CircleMapParams(0.25, 0.0)) == 0.75
    assert f(0.25, CircleMapParams(0.0, 2.0)) == pytest.approx(0.25, abs=1e-15)
    assert f_lift(0.25, CircleMapParams(0.0, 2.0)) == 2.25


@given(st.floats(-50, 50), st.floats(0, 1, exclude_max=True), st.floats(0, 5))
def test_degree_one(theta, a, B):
    cmp = CircleMapParams(a, B)
    assert f_lift(theta + 1.0, cmp) - f_lift(theta, cmp) == pytest.approx(1.0, abs=1e-12)


def test_from_shear():
    cmp = CircleMapParams.from_shear(ShearParams(2.0, 0.1, 0.1, 30.3))
    assert cmp.a == pytest.approx(0.3, abs=1e-12)
    assert cmp.B == pytest.approx(2.0, rel=1e-15)


def test_invalid():
    with pytest.raises(InvalidParameters):
        CircleMapParams(0.1, -1.0)
    with pytest.raises(InvalidParameters):
        CircleMapParams(math.nan, 1.0)


@pytest.mark.parametrize("B", [0.0, 0.1, 0.15, 0.159, 0.16, 0.2, 2.0])
def test_diffeomorphism_criterion(B):
    grid = np.arange(10_000) / 10_000
    cmp = CircleMapParams(0.3, B)
    assert (fprime(grid, cmp).min() > 0) == cmp.is_diffeomorphism


def test_critical_points_match_bisection():
    cmp = CircleMapParams(0.0, 2.0)
    crit = critical_points(cmp)
    oracle = [bisect_root(lambda x: fprime(x, cmp), 0.0, 0.5), bisect_root(lambda x: fprime(x, cmp), 0.5, 1.0)]
    assert crit.points == pytest.approx(oracle, abs=1e-9)
    assert crit.points == pytest.approx((0.26268, 0.73732), abs=1e-5)
    for c in crit.points:
        assert math.cos(TWO_PI * c) == pytest.approx(-1 / (TWO_PI * 2.0), abs=1e-14)


def test_critical_points_degenerate_and_empty():
    crit = critical_points(CircleMapParams(0.0, 1 / TWO_PI))
    assert TWO_PI * (1 / TWO_PI) == 1.0
    assert crit.degenerate and crit.points == (0.5, 0.5)
    assert len(critical_points(CircleMapParams(0.0, 0.1))) == 0


def test_lyap1d_rotation_is_zero():
    assert lyap1d(0.3, 10_000, CircleMapParams(0.37, 0.0)) == 0.0


def test_lyap1d_locked_sink():
    B = 0.1
    val = lyap1d(0.3, 100_000, CircleMapParams(0.0, B), burn_in=1000)
    assert val == pytest.approx(math.log(1 - TWO_PI * B), abs=1e-9)
    assert val == pytest.approx(-0.9898, abs=1e-4)


def test_lyap1d_chaotic_mostly_positive():
    cmp = CircleMapParams(0.3, 2.0)
    rng = np.random.default_rng(0)
    vals = [lyap1d(float(x), 100_000, cmp, burn_in=100) for x in rng.random(10)]
    assert sum(v > 0 for v in vals) >= 8


def test_lyap1d_critical_hit_warns():
    cmp = CircleMapParams(0.3, 2.0)
    c = critical_points(cmp).points[0]
    with pytest.warns(CriticalHitWarning):
        assert lyap1d(c, 10, cmp) == -math.inf


def test_lyap1d_validation():
    with pytest.raises(ValueError):
        lyap1d(0.1, 0, CircleMapParams(0.1, 0.1))


@pytest.mark.parametrize("a", [0.1, 0.3, 0.7])
def test_lyap1d_half_shift_agreement(a):
    cmp = CircleMapParams(a, 2.0)
    x = 0.123
    assert abs(lyap1d(x, 1_000_000, cmp, burn_in=1000) - lyap1d(x + 0.5, 1_000_000, cmp, burn_in=1000)) <= 0.02


def test_rotation_number_examples():
    r = rotation_number(CircleMapParams(0.25, 0.0))
    assert r.rho == 0.25 and r.error == pytest.approx(1e-5)
    assert rotation_number(CircleMapParams(0.0, 0.1)).rho == 0.0


def test_rotation_number_not_invertible():
    with pytest.raises(NotInvertible):
        rotation_number(CircleMapParams(0.1, 0.2))


def test_rotation_number_initial_condition_independent():
    from shearkick import _kernels
    cmp = CircleMapParams(0.41, 0.1)
    n = 100_000
    rhos = [(_kernels.circle_lift_orbit_end(x, n, cmp.a, cmp.B) - x) / n for x in (0.137, 0.771)]
    assert abs(rhos[0] - rhos[1]) <= 2 / n


def test_staircase_identity_without_kick():
    a = np.linspace(0, 0.99, 100)
    tab = staircase(0.0, a, n=1000)
    assert tab[:, 1] == pytest.approx(a, abs=1e-12)


@pytest.fixture(scope="module")
def staircase_01():
    a = np.arange(512) / 512
    return a, staircase(0.1, a, n=20_000)


def test_staircase_monotone_with_zero_plateau(staircase_01):
    B = 0.1
    a, tab = staircase_01
    rho, err = tab[:, 1], tab[:, 2]
    assert np.all(np.diff(rho) >= 0)
    # f_a has a fixed point iff a <= B (on [0, 1)), so rho = 0 there
    locked = a[rho <= err]
    assert locked.min() == 0.0
    assert locked.max() == pytest.approx(B, abs=1 / 512)
    assert np.all(rho[a <= B - 1e-3] <= err[0])
    assert np.all(rho[a >= B + 1 / 512] > err[0])


def test_staircase_rational_plateaus(staircase_01):
    _, tab = staircase_01
    found = [rho for _, _, rho in plateaus(tab, tol=1e-4)]
    for target in (0.0, 1 / 3, 1 / 2, 2 / 3, 1.0):
        assert any(abs(r - target) < 1e-4 for r in found), target


def test_critical_orbit_symmetry():
    d = critical_orbit_diagnostic(CircleMapParams(0.0, 2.0), n=200)
    r1, r2 = d.reports
    assert r1.min_distance_to_C == r2.min_distance_to_C
    assert r1.log_derivative_slope == r2.log_derivative_slope
    assert np.array_equal(r1.derivative_growth, r2.derivative_growth)
    assert d.heuristic


def test_critical_orbit_scan_finds_persistent_candidates():
    grid = np.arange(1024) / 1024
    cand = [a for a in grid
            if critical_orbit_diagnostic(CircleMapParams(a, 2.0)).verdict == "misiurewicz-candidate"]
    assert cand
    kept = [a for a in cand
            if critical_orbit_diagnostic(CircleMapParams(a, 2.0), n=200).verdict == "misiurewicz-candidate"]
    assert kept


def test_critical_orbit_large_delta_inconclusive():
    for a in (0.0, 0.1, 0.5, 0.9):
        assert critical_orbit_diagnostic(CircleMapParams(a, 2.0), delta=0.51).verdict == "inconclusive"


def test_critical_orbit_needs_critical_points():
    with pytest.raises(InvalidParameters):
        critical_orbit_diagnostic(CircleMapParams(0.0, 0.1))


def test_compare_unforced():
    r = compare_to_2d(ShearParams(2.0, 0.1, 0.0, 30.3), n=10_000)
    assert r.lambda_1d == 0.0
    assert abs(r.lambda_2d) <= 1e-3 and r.gap <= 1e-3


@pytest.mark.parametrize("a", [0.1, 0.3, 0.7])
def test_compare_gap_shrinks_with_k(a):
    gaps = [compare_to_2d(ShearParams(2.0, 0.1, 0.1, k + a), n=1_000_000).gap for k in (10, 20, 40)]
    assert gaps[1] <= gaps[0] + 0.02
    assert gaps[2] <= gaps[1] + 0.02


@settings(max_examples=30)
@given(st.floats(0, 1, exclude_max=True), st.floats(0, 0.15))
def test_rotation_number_in_unit_interval(a, B):
    r = rotation_number(CircleMapParams(a, B), n=2000)
    assert 0.0 <= r.rho < 1.0
    assert 0.0 <= r.rho_lift <= 1.0
