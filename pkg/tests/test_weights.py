import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from rankin_delta.errors import DomainError
from rankin_delta.weights import bump, check_inert, dyadic_partition, mellin, zero_weight


def _fd(w, x, j, h):
    """Central difference of the (j-1)-th derivative oracle."""
    return (w.deriv(j - 1, x + h) - w.deriv(j - 1, x - h)) / (2 * h)


def test_plateau_bump_values():
    w = bump(1, 2, (1.25, 1.75))
    assert w(1.5) == pytest.approx(1.0, abs=1e-15)
    assert w(0.99) == 0.0
    assert w(2.01) == 0.0


def test_plateau_bump_integral_squeeze():
    w = bump(1, 2, (1.25, 1.75))
    I = w.integral()
    assert 0.5 < I < 1.0
    ref, _ = quad(lambda x: float(w(x)), 1, 2, epsabs=1e-13, limit=200)
    assert abs(I - ref) < 1e-10


def test_plain_bump_peak_and_support():
    w = bump(30, 60)
    assert w(45.0) == pytest.approx(1.0, rel=1e-14)
    assert w(30.0) == 0.0 and w(60.0) == 0.0
    w4 = bump(30, 60, power=4)
    assert w4(40.0) == pytest.approx(float(w(40.0)) ** 4, rel=1e-12)


@pytest.mark.parametrize("w", [bump(1, 2), bump(1, 2, (1.25, 1.75)), bump(30, 60, power=4), bump(-1, 3, (0, 1))],
                         ids=["mollifier", "plateau", "power4", "shifted-plateau"])
def test_derivative_oracles_match_finite_differences(w):
    a, b = w.support
    xs = np.linspace(a + 0.1 * (b - a), b - 0.1 * (b - a), 17)
    h = 1e-5 * (b - a)
    for j in (1, 2, 3):
        exact = w.deriv(j, xs)
        fd = _fd(w, xs, j, h)
        scale = np.max(np.abs(exact))
        assert np.max(np.abs(exact - fd)) <= 1e-5 * scale + 1e-12


def test_bump_rejects_bad_input():
    with pytest.raises(DomainError):
        bump(2, 1)
    with pytest.raises(DomainError):
        bump(1, 2, (0.5, 1.5))
    with pytest.raises(DomainError):
        bump(1, 2, (1.2, 1.8), power=2)
    with pytest.raises(DomainError):
        bump(1, 2, power=0)


def test_zero_weight():
    z = zero_weight(1, 2)
    assert np.all(z(np.linspace(0, 3, 11)) == 0)


def test_normalized_and_dilate():
    w = bump(1, 2, (1.25, 1.75))
    assert w.normalized().integral() == pytest.approx(1.0, rel=1e-12)
    d = w.dilate(2.0)
    assert d.support == (2.0, 4.0)
    assert d(3.0) == pytest.approx(float(w(1.5)))
    assert d.integral() == pytest.approx(2 * w.integral(), rel=1e-10)


# -- dyadic partition --------------------------------------------------------


@pytest.mark.parametrize("lo,hi", [(1.0, 2.0), (3.0, 1000.0), (0.1, 7.0)])
def test_partition_of_unity_points(lo, hi):
    P = dyadic_partition(lo, hi)
    for x in (lo, math.sqrt(lo * hi), hi):
        assert abs(P(x)[0] - 1) < 1e-10


def test_partition_random_points():
    rng = np.random.default_rng(7)
    P = dyadic_partition(5.0, 5000.0)
    x = np.exp(rng.uniform(math.log(5), math.log(5000), 1000))
    assert np.max(np.abs(P(x) - 1)) < 1e-10


def test_partition_piece_count_ratio_two():
    for lo in (1.0, 1.5, 3.7, 100.0):
        assert len(dyadic_partition(lo, 2 * lo).pieces) <= 3


def test_partition_vanishes_far_outside():
    P = dyadic_partition(10.0, 100.0)
    assert np.all(P(np.array([10 / 4.01, 1e-3, 400.1, 1e4])) == 0)


@given(st.floats(0.01, 100), st.floats(1.01, 1e3))
@settings(max_examples=40, deadline=None)
def test_partition_property(lo, ratio):
    hi = lo * ratio
    P = dyadic_partition(lo, hi)
    x = np.geomspace(lo, hi, 25)
    assert np.max(np.abs(P(x) - 1)) < 1e-10


# -- Mellin ------------------------------------------------------------------


def test_mellin_s1_is_integral():
    w = bump(1, 2, (1.25, 1.75))
    assert abs(mellin(w, 1.0) - w.integral()) < 1e-12


@pytest.mark.parametrize("s", [0.5 + 3j, 2 - 10j, 1 + 40j])
def test_mellin_quadrature_oracle(s):
    w = bump(1, 2)
    re, _ = quad(lambda z: float(w(z)) * (z ** (s - 1)).real, 1, 2, epsabs=1e-14, limit=400)
    im, _ = quad(lambda z: float(w(z)) * (z ** (s - 1)).imag, 1, 2, epsabs=1e-14, limit=400)
    assert abs(mellin(w, s) - complex(re, im)) < 1e-11


def test_mellin_decay_for_inert_weight():
    s = 1 + 2j * math.pi * 50
    w = bump(1, 2, power=2)
    assert abs(mellin(w, s)) <= 1e-6
    # sharper profiles decay faster still
    assert abs(mellin(bump(1, 2, power=4), s)) < abs(mellin(w, s))


@given(st.floats(-3, 3), st.floats(-60, 60))
@settings(max_examples=30, deadline=None)
def test_mellin_conjugate_symmetry(sr, si):
    w = bump(1, 2, (1.25, 1.75))
    s = complex(sr, si)
    assert abs(mellin(w, s.conjugate()) - mellin(w, s).conjugate()) < 1e-12 * (1 + abs(mellin(w, s)))


# -- inertness ---------------------------------------------------------------


def test_check_inert_finite_and_dilation_invariant():
    w = bump(1, 2)
    r1 = check_inert(w, 1.0, 4)
    r2 = check_inert(w.dilate(2.0), 1.0, 4)
    assert r1.passed and all(np.isfinite(v) for v in r1.residuals.values())
    for j in range(5):
        assert r2.residuals[f"c_{j}"] == pytest.approx(r1.residuals[f"c_{j}"], rel=1e-6)


def test_check_inert_c0_plateau():
    r = check_inert(bump(1, 2, (1.25, 1.75)), 1.0, 0)
    assert r.residuals["c_0"] == pytest.approx(1.0, abs=1e-12)


def test_check_inert_order_limit():
    with pytest.raises(DomainError):
        check_inert(bump(1, 2, max_order=4), 1.0, 5)
