import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rankin_delta.errors import CoverageError, DomainError
from rankin_delta.hecke import hecke_eigenvalues
from rankin_delta.lfunction import (
    RankinSelbergSpec,
    analytic_conductor,
    conductor_slope,
    dirichlet_tail_check,
    gamma_factor,
    gamma_factor_stirling,
    log_gamma_factor,
    smoothed_sum,
    smoothed_sum_report,
)
from rankin_delta.weights import bump


def _mp_gamma_factor(tf, tg, s, nu=0):
    with mpmath.workdps(40):
        s = mpmath.mpc(s)
        out = mpmath.pi ** (-2 * s)
        for y in (tf + tg, -(tf + tg), tf - tg, -(tf - tg)):
            out *= mpmath.gamma((s + 1j * y + nu) / 2)
        return complex(out)


# -- gamma factor ------------------------------------------------------------


@pytest.mark.parametrize("s", [0.5 + 3j, 2.0 - 1j, 0.5 + 40j])
def test_gamma_factor_mpmath(s):
    spec = RankinSelbergSpec(7.0, 3.0)
    ref = _mp_gamma_factor(7.0, 3.0, s)
    assert abs(gamma_factor(spec, s) - ref) < 1e-10 * abs(ref)


def test_parity_shift():
    spec = RankinSelbergSpec(7.0, 3.0, parity_f="even", parity_g="odd")
    assert spec.nu == 1
    ref = _mp_gamma_factor(7.0, 3.0, 0.5 + 2j, nu=1)
    assert abs(gamma_factor(spec, 0.5 + 2j) - ref) < 1e-10 * abs(ref)
    assert RankinSelbergSpec(7.0, 3.0).nu == 0


@given(st.floats(0.1, 3), st.floats(-60, 60))
@settings(max_examples=40, deadline=None)
def test_gamma_factor_schwarz_reflection(x, y):
    spec = RankinSelbergSpec(12.5, 4.25)
    s = complex(x, y)
    a, b = gamma_factor(spec, s.conjugate()), gamma_factor(spec, s).conjugate()
    assert abs(a - b) <= 1e-10 * abs(a)


def test_gamma_factor_stirling_magnitude():
    spec = RankinSelbergSpec(20.0, 20.0)
    s = 0.5 + 40j
    ratio = abs(gamma_factor(spec, s)) / abs(gamma_factor_stirling(spec, s))
    assert 0.5 <= ratio <= 2


def test_gamma_factor_log_space_no_underflow():
    spec = RankinSelbergSpec(1000.0, 1000.0)
    lg = log_gamma_factor(spec, 0.5 + 2000j)
    assert np.isfinite(lg) and lg.real < -3000


def test_gamma_factor_pole():
    spec = RankinSelbergSpec(1.0, 1.0)
    with pytest.raises(DomainError):
        log_gamma_factor(spec, -4 - 2j)  # (s + i(tf+tg))/2 = -2


# -- conductor ---------------------------------------------------------------


def test_conductor_sum_point():
    p = analytic_conductor(100, 100, 200)
    assert p.factors == (400.5, 0.5, 200.5, 200.5)
    assert p.conductor == pytest.approx(400.5 * 0.5 * 200.5 ** 2, rel=1e-15)
    assert p.conductor == pytest.approx(8.05e6, rel=1e-3)


@given(st.floats(0, 1e4), st.floats(0, 1e4))
@settings(max_examples=50, deadline=None)
def test_conductor_t0_perfect_square(tf, tg):
    c = analytic_conductor(tf, tg, 0.0).conductor
    assert c == pytest.approx(((0.5 + tf + tg) * (0.5 + abs(tf - tg))) ** 2, rel=1e-12)


def test_conductor_slopes():
    assert abs(conductor_slope("generic") - 4) <= 0.1
    assert abs(conductor_slope("sum") - 3) <= 0.1
    assert abs(conductor_slope("difference", nu=0.75) - 2.75) <= 0.1
    with pytest.raises(DomainError):
        conductor_slope("elsewhere")


def test_conductor_brackets():
    for T in (1e2, 1e3, 1e4):
        assert 4 <= analytic_conductor(T, T, 2 * T).conductor / T ** 3 <= 16
        assert 2 <= analytic_conductor(T, T, T).conductor / T ** 4 <= 4


def test_difference_point_log_ratio():
    T, nu = 1e4, 0.75
    d = T ** nu
    p = analytic_conductor((T + d) / 2, (T - d) / 2, d)
    assert abs(p.log_conductor / math.log(T) - (2 + nu)) <= 0.1


# -- smoothed sums -----------------------------------------------------------


def test_smoothed_sum_direct(form):
    V = bump(1, 2, (1.25, 1.75))
    spec = RankinSelbergSpec.from_forms(form, form, 3.0)
    N = 300
    lam = hecke_eigenvalues(form, 2 * N)
    want = sum(lam[n - 1] ** 2 * float(V(n / N)) * complex(math.cos(3 * math.log(n)), -math.sin(3 * math.log(n)))
               for n in range(N, 2 * N + 1))
    assert abs(smoothed_sum(spec, N, V) - want) < 1e-10


def test_smoothed_sum_t0_nonnegative_and_triangle(form):
    V = bump(1, 2, (1.25, 1.75))
    spec = RankinSelbergSpec.from_forms(form, form, 0.0)
    S = smoothed_sum(spec, 500, V)
    rep = smoothed_sum_report(spec, 500, V)
    assert S.real >= 0 and abs(S.imag) < 1e-12
    assert abs(abs(S) - rep.residuals["triangle_bound"]) < 1e-9


def test_smoothed_sum_report_sum_point(form):
    V = bump(1, 2, (1.25, 1.75))
    spec = RankinSelbergSpec.from_forms(form, form, 2 * form.spectral_R)
    rep = smoothed_sum_report(spec, 1000, V)
    assert rep.passed
    assert rep.residuals["abs_S"] <= rep.residuals["cauchy_bound"]


def test_smoothed_sum_conjugate_in_t(form):
    V = bump(1, 2)
    a = smoothed_sum(RankinSelbergSpec.from_forms(form, form, 7.0), 400, V)
    b = smoothed_sum(RankinSelbergSpec.from_forms(form, form, -7.0), 400, V)
    assert abs(a - b.conjugate()) < 1e-12


def test_smoothed_sum_needs_forms_and_coverage(form):
    with pytest.raises(DomainError):
        smoothed_sum(RankinSelbergSpec(1.0, 1.0), 10, bump(1, 2))
    with pytest.raises(CoverageError):
        smoothed_sum(RankinSelbergSpec.from_forms(form, form), 1e5, bump(1, 2))


# -- Dirichlet series tail ---------------------------------------------------


def test_dirichlet_tail(form):
    spec = RankinSelbergSpec.from_forms(form, form)
    r2 = dirichlet_tail_check(spec, 2.0, 4000)
    r3 = dirichlet_tail_check(spec, 3.0, 4000)
    assert r2.passed and r3.passed
    assert r3.residuals["envelope"] < r2.residuals["envelope"]
    assert isinstance(r2.details["partial_sum_N"], float)


def test_dirichlet_tail_large_N(form):
    spec = RankinSelbergSpec.from_forms(form, form)
    r = dirichlet_tail_check(spec, 2.0, 9000)
    assert r.passed


def test_dirichlet_tail_rejects_small_sigma(form):
    with pytest.raises(DomainError):
        dirichlet_tail_check(RankinSelbergSpec.from_forms(form, form), 1.2, 100)
