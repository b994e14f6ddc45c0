import json
import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rankin_delta.errors import CoverageError, DomainError
from rankin_delta.hecke import (
    MaassFormData,
    alpha_minus,
    alpha_plus,
    bilinear_report,
    count_bilinear,
    eigenvalue_error_budget,
    hecke_eigenvalues,
    l4_norm,
    l4_report,
    load_form,
    mobius_up_to,
    primes_up_to,
    ramanujan_average,
    ramanujan_average_report,
    ramanujan_sum,
    ramanujan_sum_direct,
    ramanujan_sum_mobius,
    rs_dirichlet_coeffs,
)


def _toy_form(values=None):
    table = values or {2: 0.3, 3: -1.1, 5: 0.7, 7: 1.4}
    return MaassFormData(spectral_R=9.5, parity="even", prime_table=table, precision=1e-12)


# -- fixture -----------------------------------------------------------------


def test_fixture_metadata(form):
    assert abs(form.spectral_R - 13.7797513519) < 1e-8
    assert form.parity == "even" and form.epsilon == 1
    assert form.covered_limit() >= 10 ** 4 - 30
    assert form.precision < 1e-8
    assert form.source


def test_fixture_round_trip(form, tmp_path):
    p = tmp_path / "f.json"
    p.write_text(json.dumps(form.to_dict()))
    again = load_form(p)
    assert again.prime_table == form.prime_table and again.spectral_R == form.spectral_R


def test_fixture_env_override(monkeypatch, tmp_path):
    f = _toy_form()
    p = tmp_path / "toy.json"
    p.write_text(json.dumps(f.to_dict()))
    monkeypatch.setenv("RANKIN_DELTA_FIXTURE", str(p))
    assert load_form().spectral_R == 9.5


def test_form_validation():
    with pytest.raises(DomainError):
        MaassFormData(spectral_R=-1, parity="even", prime_table={})
    with pytest.raises(DomainError):
        MaassFormData(spectral_R=1, parity="neither", prime_table={})
    with pytest.raises(DomainError):
        MaassFormData(spectral_R=1, parity="even", prime_table={2: 5.0})


# -- primes and Mobius -------------------------------------------------------


def test_primes_and_mobius():
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    mu = mobius_up_to(12)
    assert list(mu[1:]) == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]


# -- eigenvalues -------------------------------------------------------------


def test_small_eigenvalue_identities(form):
    lam = dict(enumerate(hecke_eigenvalues(form, 12), start=1))
    assert lam[1] == 1
    assert lam[4] == pytest.approx(lam[2] ** 2 - 1, abs=1e-15)
    assert lam[6] == pytest.approx(lam[2] * lam[3], abs=1e-15)
    assert lam[12] == pytest.approx(lam[3] * (lam[2] ** 2 - 1), abs=1e-15)
    assert lam[8] == pytest.approx(lam[2] ** 3 - 2 * lam[2], abs=1e-14)


def test_prime_power_recursion_brute_force(form):
    f = form
    lam = hecke_eigenvalues(f, 10 ** 4)
    for p in (2, 3, 5, 7, 97):
        a, b = 1.0, f.prime_table[p]
        k = 1
        while p ** (k + 1) <= lam.size:
            a, b = b, f.prime_table[p] * b - a
            k += 1
            assert lam[p ** k - 1] == pytest.approx(b, abs=1e-12)


def test_multiplicativity_random_pairs(form):
    rng = np.random.default_rng(0)
    N = form.covered_limit()
    lam = hecke_eigenvalues(form, N)
    worst = 0.0
    pairs = 0
    while pairs < 100:
        m, n = (int(v) for v in rng.integers(1, 1001, 2))
        if math.gcd(m, n) != 1 or m * n > N:
            continue
        pairs += 1
        worst = max(worst, abs(lam[m * n - 1] - lam[m - 1] * lam[n - 1]))
    assert worst <= 1e-9


def test_coverage_error():
    with pytest.raises(CoverageError):
        hecke_eigenvalues(_toy_form(), 11)


def test_error_budget_shape(form):
    b = eigenvalue_error_budget(form, 100)
    assert b.shape == (100,) and b[0] == 0 and np.all(b[1:] > 0)


# -- moments -----------------------------------------------------------------


def test_ramanujan_average_trivial(form):
    assert ramanujan_average(form, 1) == 1.0
    assert l4_norm(form, 1) == 1.0


def test_ramanujan_average_fixture(form):
    v = ramanujan_average(form, 10 ** 4)
    lam = hecke_eigenvalues(form, 10 ** 4)
    assert v == pytest.approx(sum(float(x) ** 2 for x in lam) / 1e4, rel=1e-12)
    assert 0.1 <= v <= 10
    rep = ramanujan_average_report(form, 10 ** 4)
    assert rep.passed and rep.details["nondecreasing"]


def test_l4_report(form):
    rep = l4_report(form, 10 ** 4)
    assert rep.passed
    assert rep.residuals["fitted_log_power"] <= 4
    assert l4_norm(form, 2 * 5000) >= l4_norm(form, 5000)


# -- Ramanujan sums ----------------------------------------------------------


def test_ramanujan_sum_examples():
    assert ramanujan_sum(12, 0) == 4
    assert ramanujan_sum(6, 3) == -2
    assert ramanujan_sum(1, 17) == 1
    for p in (2, 3, 7, 101):
        assert ramanujan_sum(p, p + 1) == -1


def test_ramanujan_sum_complex_oracle():
    import cmath

    for q, n in ((10, 4), (15, 9), (24, 18)):
        s = sum(cmath.exp(2j * math.pi * a * n / q) for a in range(1, q + 1) if math.gcd(a, q) == 1)
        assert abs(s - ramanujan_sum(q, n)) < 1e-10


def test_ramanujan_routes_agree_grid():
    for q in range(1, 201):
        for n in range(0, 201):
            assert ramanujan_sum_direct(q, n) == ramanujan_sum_mobius(q, n)


def test_ramanujan_orthogonality_grid():
    for q in range(1, 201):
        divs = [d for d in range(1, q + 1) if q % d == 0]
        for n in range(0, 201):
            s = sum(ramanujan_sum_mobius(d, n) for d in divs)
            assert s == (q if n % q == 0 else 0)


@given(st.integers(1, 500), st.integers(-10 ** 6, 10 ** 6))
@settings(max_examples=100, deadline=None)
def test_ramanujan_even_and_periodic(q, n):
    assert ramanujan_sum(q, n) == ramanujan_sum(q, -n) == ramanujan_sum(q, n + q)


def test_ramanujan_rejects_q0():
    with pytest.raises(DomainError):
        ramanujan_sum_mobius(0, 1)


# -- Rankin-Selberg coefficients ---------------------------------------------


def test_rs_coefficients(form):
    b = rs_dirichlet_coeffs(form, form, 100)
    lam = hecke_eigenvalues(form, 100)
    assert b[0] == 1
    assert b[3] == pytest.approx(lam[3] ** 2 + 1, abs=1e-14)
    for p in (2, 3, 5, 97):
        assert b[p - 1] == pytest.approx(lam[p - 1] ** 2, abs=1e-14)
    # b(36): d in {1, 2, 3, 6}
    want = sum(lam[36 // (d * d) - 1] ** 2 for d in (1, 2, 3, 6))
    assert b[35] == pytest.approx(want, abs=1e-13)


# -- bilinear count ----------------------------------------------------------


def _count_loop(R, H, delta):
    rs = range(R + 1, 2 * R + 1)
    hs = range(H + 1, 2 * H + 1)
    return sum(1 for r1, r2, h1, h2 in product(rs, rs, hs, hs) if abs(h1 * r2 - h2 * r1) <= delta)


@pytest.mark.parametrize("R,H,delta", [(5, 5, 0), (6, 4, 1), (7, 9, 2.5), (10, 10, 0)])
def test_count_bilinear_small(R, H, delta):
    assert count_bilinear(R, H, delta) == _count_loop(R, H, delta)


def test_count_bilinear_diagonal():
    assert count_bilinear(10, 10, 0) >= 100
    assert count_bilinear(10, 10, 0.7) == count_bilinear(10, 10, 0)
    assert count_bilinear(10, 10, -1) == 0


def test_bilinear_report_R50():
    rep = bilinear_report(50, 50, 2)
    assert rep.passed and rep.residuals["c"] <= 10
    assert rep.residuals["count"] == 9422


# -- alpha roots -------------------------------------------------------------


def test_alpha_roots():
    r, h, d, t = 3, 2, 5, 1e4
    for y in (alpha_plus(r, h, d, t), alpha_minus(r, h, d, t)):
        res = math.pi * r * y * (y + d * h) - t * d * d * h
        assert abs(res) <= 1e-12 * t * d * d * h
    assert alpha_minus(r, h, d, t) < 0 < alpha_plus(r, h, d, t)
    assert alpha_plus(r, h, d, t) * alpha_minus(r, h, d, t) == pytest.approx(-t * d * d * h / (math.pi * r))


def test_alpha_sqrt_t_scaling():
    a1 = alpha_plus(1, 1, 1, 1e8)
    a2 = alpha_plus(1, 1, 1, 4e8)
    assert a2 / a1 == pytest.approx(2.0, rel=1e-3)


def test_alpha_domain():
    with pytest.raises(DomainError):
        alpha_plus(0, 1, 1, 1.0)


def test_general_hecke_relation(form):
    # lambda(m) lambda(n) = sum_{d | (m, n)} lambda(mn / d^2), also for non-coprime pairs
    N = form.covered_limit()
    lam = hecke_eigenvalues(form, N)
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 200:
        m, n = (int(v) for v in rng.integers(2, 200, 2))
        g = math.gcd(m, n)
        if m * n > N or g == 1:
            continue
        checked += 1
        rhs = sum(lam[m * n // (d * d) - 1] for d in range(1, g + 1) if g % d == 0)
        assert abs(lam[m - 1] * lam[n - 1] - rhs) <= 1e-9


def test_fixture_stored_checks_recorded(form):
    # generation-time consistency checks shipped with the data (raw, pre-multiplicative values)
    assert {"multiplicativity", "block_overlap", "prime_square_relation", "two_height_agreement"} <= set(form.checks)
    assert all(float(v) < 1e-8 for v in form.checks.values() if isinstance(v, (int, float)))
