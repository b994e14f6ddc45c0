import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rankin_delta.delta_symbol import (
    DeltaParams,
    delta_divisor_term,
    delta_expansion,
    delta_q_term,
    g_weight,
    g_weight_properties,
    verify_delta,
)
from rankin_delta.errors import DomainError
from rankin_delta.hecke import ramanujan_sum

P50 = DeltaParams(50)


def test_identity_at_zero_and_seven():
    assert abs(delta_expansion(0, P50) - 1) <= 1e-6
    assert abs(delta_expansion(7, P50)) <= 1e-6


def test_even_in_n():
    for n in (3, 11, 24):
        assert abs(delta_expansion(-n, P50) - delta_expansion(n, P50)) < 1e-12


def test_divisor_identity_by_direct_sum():
    # delta(n) = sum_q c_q(n) Delta_q(n), with Delta_q from the r-sum: no quadrature at all
    for n in (0, 1, 6, 12, 25, 300, 1250):
        total = sum(ramanujan_sum(q, n) * delta_divisor_term(q, n, P50) for q in range(1, 51))
        assert abs(total - (1 if n == 0 else 0)) < 1e-12


def test_q_integral_matches_divisor_sum():
    for q in (1, 2, 7, 25, 49, 50):
        for n in (0, 5, 24):
            # single-grid quadrature: agreement to the expansion's quadrature tolerance
            assert abs(delta_q_term(q, n, P50) - delta_divisor_term(q, n, P50)) < P50.quad_tol


def test_a_sum_is_ramanujan_sum():
    import cmath

    for q in (1, 6, 12, 30):
        for n in (0, 4, 9):
            s = sum(cmath.exp(2j * math.pi * a * n / q) for a in range(1, q + 1) if math.gcd(a, q) == 1)
            assert round(s.real) == ramanujan_sum(q, n) and abs(s.imag) < 1e-10


def test_verify_delta_q50():
    rep = verify_delta((-25, 25), P50)
    assert rep.passed and rep.residuals["max_error"] <= 1e-6
    assert len(rep.details["partial_sum_error_profile"]) == 50


def test_verify_delta_empty():
    rep = verify_delta((1, 0), P50)
    assert rep.passed and rep.details["count"] == 0 and rep.residuals["worst_n"] is None


def test_range_guard():
    with pytest.raises(DomainError):
        delta_expansion(1251, P50)
    with pytest.raises(DomainError):
        DeltaParams(1)
    with pytest.raises(DomainError):
        DeltaParams(10, x_cutoff=1.0)


def test_larger_n_within_range():
    assert abs(delta_expansion(1000, P50)) <= 1e-6


def test_g_weight_near_one():
    P = DeltaParams(100)
    x = np.linspace(-0.01, 0.01, 21)
    for q in range(1, 11):
        assert np.all(np.abs(g_weight(q, x, P) - 1) <= 0.1)


def test_g_weight_properties_report():
    rep = g_weight_properties(DeltaParams(100))
    assert rep.passed and rep.residuals["near_one"] <= 0.1
    assert math.isfinite(rep.residuals["decay_c"]) and math.isfinite(rep.residuals["l1_l2_c"])


def test_g_weight_q_range():
    with pytest.raises(DomainError):
        g_weight(51, 0.0, P50)


@given(st.integers(-200, 200))
@settings(max_examples=15, deadline=None)
def test_expansion_real_valued_identity(n):
    P = DeltaParams(30)
    assert abs(delta_expansion(n, P) - (1 if n == 0 else 0)) <= 1e-6
