import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import fresnel

from rankin_delta.errors import (
    AmbiguousStationaryPoint,
    CertificateRefused,
    DegeneratePhase,
    DomainError,
    NoStationaryPoint,
)
from rankin_delta.oscillatory import (
    PhaseFunction,
    certify_nonstationary,
    find_stationary,
    nonstationary_bound,
    oscillatory_quadrature,
    stationary_phase_expansion,
    stationary_phase_terms,
)
from rankin_delta.weights import bump, zero_weight


def _quad_oracle(w, phase):
    """Plain adaptive quadrature (scipy QUADPACK), independent of the panel rule."""
    a, b = w.support
    re, _ = quad(lambda t: float(w(t)) * math.cos(phase(t)), a, b, limit=2000, epsabs=1e-13)
    im, _ = quad(lambda t: float(w(t)) * math.sin(phase(t)), a, b, limit=2000, epsabs=1e-13)
    return complex(re, im)


# -- quadrature --------------------------------------------------------------


def test_zero_phase_gives_integral():
    w = bump(1, 2, (1.25, 1.75))
    h = PhaseFunction.polynomial([0.0])
    assert abs(oscillatory_quadrature(w, h) - w.integral()) < 1e-12


@pytest.mark.parametrize("lam", [10.0, 200.0])
def test_quadrature_against_quadpack(lam):
    w = bump(1, 2)
    h = PhaseFunction.quadratic(lam, 1.3, cubic=lam / 7)
    ref = _quad_oracle(w, lambda t: lam * (t - 1.3) ** 2 / 2 + lam / 7 * (t - 1.3) ** 3)
    assert abs(oscillatory_quadrature(w, h, tol=1e-13) - ref) < 1e-10


def test_fresnel_closed_form_with_plateau_limit():
    # w = 1 on [c, d]: the plateau part of the integral is a Fresnel integral
    lam, t0 = 400.0, 1.5
    w = bump(1.0, 2.0, (1.0 + 1e-9, 2.0 - 1e-9))
    h = PhaseFunction.quadratic(lam, t0)
    k = math.sqrt(lam / math.pi)
    S, C = fresnel(k * 0.5)
    exact = 2 * complex(C, S) / k
    assert abs(oscillatory_quadrature(w, h, tol=1e-12) - exact) < 1e-6


def test_linear_phase_self_consistency():
    w = bump(1, 2)
    h = PhaseFunction.linear(1e3)
    coarse = oscillatory_quadrature(w, h, tol=1e-6)
    fine = oscillatory_quadrature(w, h, tol=1e-12)
    assert abs(coarse - fine) <= 1e-6


def test_conjugation_under_negated_phase():
    w = bump(1, 2)
    h = PhaseFunction.quadratic(300.0, 1.4, cubic=20.0)
    a = oscillatory_quadrature(w, h, tol=1e-13)
    b = oscillatory_quadrature(w, h.negated(), tol=1e-13)
    assert abs(a.conjugate() - b) < 1e-12


def test_e_of_h_convention_scales_by_two_pi():
    w = bump(1, 2)
    h1 = PhaseFunction.linear(2 * math.pi * 30.0)
    h2 = PhaseFunction.linear(30.0, convention="e_of_h")
    assert abs(oscillatory_quadrature(w, h1, tol=1e-13) - oscillatory_quadrature(w, h2, tol=1e-13)) < 1e-12


def test_phase_validate_reports_fd_error():
    h = PhaseFunction.quadratic(50.0, 1.5, cubic=3.0, Y0=50.0)
    rep = h.validate((1.0, 2.0))
    assert rep.passed and rep.residuals["fd_error"] < 1e-6


def test_bad_descriptor_rejected():
    with pytest.raises(DomainError):
        PhaseFunction.linear(1.0, R0=0.0)
    with pytest.raises(DomainError):
        PhaseFunction.linear(1.0, convention="cosine")


# -- nonstationary certificate -----------------------------------------------


def test_nonstationary_linear_example():
    w = bump(1, 2)
    h = PhaseFunction.linear(1000.0, X0=1, V0=1, R0=1000, Y0=1, Q0=1, convention="e_of_h")
    bound = nonstationary_bound(w, h, 3)
    assert 1e-9 <= bound <= 3e-9
    assert abs(oscillatory_quadrature(w, h, tol=1e-14)) < 1e-6


def test_nonstationary_bound_decreases_with_A():
    w = bump(1, 2)
    h = PhaseFunction.linear(1000.0, R0=1000, convention="e_of_h")
    b = [nonstationary_bound(w, h, A) for A in (1, 2, 4, 8)]
    assert all(x > y for x, y in zip(b, b[1:]))


def test_nonstationary_zero_weight():
    rep = certify_nonstationary(zero_weight(1, 2), PhaseFunction.linear(100.0, R0=100), 2)
    assert rep.passed and rep.residuals["abs_integral"] == 0


def test_nonstationary_refuses_false_claims():
    w = bump(1, 2)
    with pytest.raises(CertificateRefused):
        nonstationary_bound(w, PhaseFunction.quadratic(100.0, 1.5, R0=1.0), 2)
    with pytest.raises(CertificateRefused):
        nonstationary_bound(w, PhaseFunction.linear(10.0, R0=100.0), 2)


def _random_instance(rng):
    a = rng.uniform(0.5, 3)
    L = rng.uniform(0.5, 2)
    b = a + L
    c1 = rng.uniform(20, 400) * rng.choice([-1, 1])
    c2 = rng.uniform(-1, 1) * abs(c1) / (4 * b)
    x = np.linspace(a, b, 1001)
    R0 = float(np.min(np.abs(c1 + c2 * x)))
    Q0 = L
    Y0 = max(abs(c2) * Q0 ** 2, R0 * Q0)
    A = int(rng.integers(1, 5))
    h = PhaseFunction.polynomial([0.0, c1, c2 / 2], X0=1, V0=L / 8, Y0=Y0, Q0=Q0, R0=R0,
                                 convention="e_of_h")
    return bump(a, b), h, A


def test_nonstationary_certificates_never_violated():
    rng = np.random.default_rng(2024)
    ratios = []
    for _ in range(50):
        w, h, A = _random_instance(rng)
        rep = certify_nonstationary(w, h, A, factor=10.0)
        assert rep.passed
        ratios.append(rep.residuals["ratio"])
    assert max(ratios) <= 10


# -- stationary point --------------------------------------------------------


def test_find_stationary_vertex():
    assert abs(find_stationary(PhaseFunction.quadratic(1e3, 1.5), (1, 2)) - 1.5) < 1e-14


def test_find_stationary_closed_form_family():
    # H(tau) = 2 m t_f log(tau) - 2 n t_g log(tau) ... has H'(tau) = 0 where
    # B (m+n) tau = 2 m t_f - 2 n t_g; take H(tau) = (2 m t_f - 2 n t_g) log tau - B (m+n) tau
    m, n, tf, tg, B = 3, 2, 40.0, 25.0, 7.0
    t0 = (2 * m * tf - 2 * n * tg) / (B * (m + n))
    k = 2 * m * tf - 2 * n * tg

    def fn(x, order):
        out = np.zeros((order + 1, x.size))
        out[0] = k * np.log(x) - B * (m + n) * x
        for j in range(1, order + 1):
            out[j] = k * (-1) ** (j - 1) * math.factorial(j - 1) / x ** j
        out[1] -= B * (m + n)
        return out

    h = PhaseFunction(fn)
    assert abs(find_stationary(h, (0.5, 10.0)) - t0) < 1e-12


def test_find_stationary_errors():
    with pytest.raises(NoStationaryPoint):
        find_stationary(PhaseFunction.linear(5.0), (1, 2))
    with pytest.raises(AmbiguousStationaryPoint):
        find_stationary(PhaseFunction.polynomial([0, 0.5, -1.5, 0.5], center=0.0), (0.0, 3.0))


# -- stationary phase expansion ----------------------------------------------


def test_leading_term_plateau():
    lam, t0 = 1e4, 1.5
    w = bump(1, 2, (1.25, 1.75))
    h = PhaseFunction.quadratic(lam, t0)
    val = stationary_phase_expansion(w, h, 0)
    assert abs(val - math.sqrt(2 * math.pi / lam) * np.exp(1j * math.pi / 4)) < 1e-14


def _fresnel_error(lam, order, cubic=0.0):
    w = bump(1.0, 2.0)
    h = PhaseFunction.quadratic(lam, 1.5, cubic=cubic, Y0=lam)
    sp = stationary_phase_expansion(w, h, order)
    ex = oscillatory_quadrature(w, h, tol=1e-13)
    return abs(sp - ex) / abs(ex)


def test_fresnel_order1_accuracy_and_monotone():
    errs = [_fresnel_error(lam, 1) for lam in (1e2, 1e3, 1e4)]
    assert errs[2] <= 1e-3
    assert errs[0] > errs[1] > errs[2]


def test_cubic_family_error_decreases():
    errs = [_fresnel_error(lam, 1, cubic=5.0) for lam in (1e2, 1e3, 1e4)]
    assert errs[0] > errs[1] > errs[2]


def test_vanishing_weight_at_stationary_point():
    # w(t0) = w'(t0) = 0: w = ((t - t0)^2) * bump
    base = bump(1.0, 2.0, max_order=12)
    from rankin_delta.weights import SmoothWeight

    def jet(x, n):
        # Taylor coefficients of (x - 1.5)^2 times those of the bump
        c = base.jet(x, n)
        u = x - 1.5
        out = u ** 2 * c
        out[1:] += 2 * u * c[:-1]
        out[2:] += c[:-2]
        return out

    w = SmoothWeight((1.0, 2.0), jet, 1.0, 12, "u^2 bump")
    lam = 2e4
    h = PhaseFunction.quadratic(lam, 1.5, Y0=lam)
    sp = stationary_phase_terms(w, h, 2)
    assert sp.terms[0] == 0
    ex = oscillatory_quadrature(w, h, tol=1e-15)
    assert abs(sp.value - ex) < 0.05 * abs(ex)
    assert abs(np.angle(sp.value / ex)) < 0.05


def test_partial_sum_consistency():
    w = bump(1, 2)
    h = PhaseFunction.quadratic(1e3, 1.4, cubic=10.0, Y0=1e3)
    sp = stationary_phase_terms(w, h, 2)
    d = abs(sp.partial(2) - sp.partial(0))
    bound = abs(sp.prefactor) * (abs(sp.terms[1]) + abs(sp.terms[2]))
    assert d <= bound * (1 + 1e-12)
    assert sp.partial(2) == pytest.approx(stationary_phase_expansion(w, h, 2))


def test_degenerate_phase_refused():
    h = PhaseFunction.polynomial([0.0, 0.0, 0.0, 1.0], center=1.5, Y0=1.0)
    with pytest.raises(DegeneratePhase):
        stationary_phase_terms(bump(1, 2), h, 1)


def test_order_needs_weight_derivatives():
    with pytest.raises(DomainError):
        stationary_phase_terms(bump(1, 2, max_order=3), PhaseFunction.quadratic(1e3, 1.5), 1)


@given(st.floats(1.2, 1.8), st.floats(2e3, 2e4))
@settings(max_examples=10, deadline=None)
def test_stationary_point_anywhere_in_support(t0, lam):
    w = bump(1, 2, (1.1, 1.9))
    h = PhaseFunction.quadratic(lam, t0, Y0=lam)
    sp = stationary_phase_expansion(w, h, 1)
    ex = oscillatory_quadrature(w, h, tol=1e-13)
    assert abs(sp - ex) / abs(ex) < 5e-2
