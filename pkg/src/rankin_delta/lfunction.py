"""Rankin-Selberg gamma factors, the analytic conductor and smoothed sums.

No critical-line value is computed.  What is checked numerically is the
archimedean data (gamma factor, conductor), the smoothed Dirichlet sums
``S(N)`` that control the central value, and absolute convergence of the
Dirichlet series to the right of ``Re s = 1``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import CoverageError, DomainError
from .hecke import MaassFormData, _lambda_table, rs_dirichlet_coeffs
from .report import VerificationReport
from .special_functions import log_gamma
from .weights import SmoothWeight

log = logging.getLogger(__name__)

__all__ = [
    "RankinSelbergSpec",
    "ConductorProfile",
    "gamma_factor",
    "log_gamma_factor",
    "gamma_factor_stirling",
    "analytic_conductor",
    "conductor_slope",
    "smoothed_sum",
    "smoothed_sum_report",
    "dirichlet_tail_check",
]


@dataclass(frozen=True)
class RankinSelbergSpec:
    """The pair ``(f, g)`` and the height ``t`` at which ``L(1/2 + it, f x g)`` is studied.

    Forms are optional: the archimedean routines only need the spectral
    parameters and parities.
    """

    t_f: float
    t_g: float
    t: float = 0.0
    parity_f: str = "even"
    parity_g: str = "even"
    f: MaassFormData | None = None
    g: MaassFormData | None = None

    @classmethod
    def from_forms(cls, f: MaassFormData, g: MaassFormData, t: float = 0.0) -> "RankinSelbergSpec":
        return cls(f.spectral_R, g.spectral_R, t, f.parity, g.parity, f, g)

    @property
    def nu(self) -> int:
        """0 when the parities agree, 1 otherwise."""
        return 0 if self.parity_f == self.parity_g else 1

    @property
    def ordinates(self) -> tuple:
        s, d = self.t_f + self.t_g, self.t_f - self.t_g
        return (s, -s, d, -d)

    def _forms(self):
        if self.f is None or self.g is None:
            raise DomainError("this operation needs eigenvalue data for both forms")
        return self.f, self.g


# ---------------------------------------------------------------------------
# gamma factor
# ---------------------------------------------------------------------------


def _gamma_args(spec: RankinSelbergSpec, s):
    s = np.asarray(s, dtype=complex)
    return [(s + 1j * y + spec.nu) / 2 for y in spec.ordinates]


def log_gamma_factor(spec: RankinSelbergSpec, s) -> complex:
    """``log gamma(s, f x g)``, accumulated in log space."""
    args = _gamma_args(spec, s)
    for z in args:
        zr = np.atleast_1d(z)
        if np.any((np.abs(zr.imag) < 1e-14) & (zr.real <= 0) & (np.abs(zr.real - np.round(zr.real)) < 1e-14)):
            raise DomainError(f"s = {s} is a pole of the gamma factor")
    s = np.asarray(s, dtype=complex)
    out = -2 * s * math.log(math.pi) + sum(log_gamma(z) for z in args)
    return complex(out) if out.ndim == 0 else out


def gamma_factor(spec: RankinSelbergSpec, s) -> complex:
    """``pi^{-2s} prod Gamma((s +- i(t_f +- t_g) + nu)/2)``."""
    return np.exp(log_gamma_factor(spec, s))


def gamma_factor_stirling(spec: RankinSelbergSpec, s) -> complex:
    """Leading-order Stirling approximation ``(z - 1/2) log z - z + log(2 pi)/2`` per factor.

    Written out independently of :func:`log_gamma` so it can serve as an
    oracle for the modulus of :func:`gamma_factor`.
    """
    s = complex(s)
    total = -2 * s * math.log(math.pi)
    for z in _gamma_args(spec, s):
        z = complex(z)
        total += (z - 0.5) * np.log(z) - z + 0.5 * math.log(2 * math.pi)
    return complex(np.exp(total))


# ---------------------------------------------------------------------------
# analytic conductor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConductorProfile:
    """The four factors ``1/2 + |t +- t_f +- t_g|`` and their product."""

    t_f: float
    t_g: float
    t: float
    factors: tuple
    conductor: float

    @property
    def log_conductor(self) -> float:
        return float(sum(math.log(x) for x in self.factors))

    def as_dict(self) -> dict:
        return {"t_f": self.t_f, "t_g": self.t_g, "t": self.t,
                "factors": list(self.factors), "conductor": self.conductor,
                "log_conductor": self.log_conductor}


def analytic_conductor(t_f: float, t_g: float, t: float) -> ConductorProfile:
    """``prod_{+-} prod_{+-} (1/2 + |t +- t_f +- t_g|)``.

    Factor order: ``t + t_f + t_g``, ``t - t_f - t_g``, ``t + t_f - t_g``,
    ``t - t_f + t_g``.
    """
    factors = tuple(0.5 + abs(t + a * t_f + b * t_g) for a, b in ((1, 1), (-1, -1), (1, -1), (-1, 1)))
    return ConductorProfile(t_f, t_g, t, factors, float(np.prod(factors)))


def conductor_slope(point: str, T_values=(1e2, 1e3, 1e4), nu: float = 0.75) -> float:
    """Least-squares slope of ``log C`` against ``log T``.

    ``point``: ``"generic"`` (t_f = t_g = t = T), ``"sum"`` (t_f = t_g = T,
    t = 2T) or ``"difference"`` (t_f + t_g = T, t = t_f - t_g = T^nu).
    """
    logs = []
    for T in T_values:
        if point == "generic":
            p = analytic_conductor(T, T, T)
        elif point == "sum":
            p = analytic_conductor(T, T, 2 * T)
        elif point == "difference":
            d = T ** nu
            p = analytic_conductor((T + d) / 2, (T - d) / 2, d)
        else:
            raise DomainError(f"unknown point {point!r}")
        logs.append(p.log_conductor)
    return float(np.polyfit(np.log(T_values), logs, 1)[0])


# ---------------------------------------------------------------------------
# smoothed sums and the Dirichlet series
# ---------------------------------------------------------------------------


def _check_cover(form: MaassFormData, n: int):
    lim = form.covered_limit()
    if n > lim:
        raise CoverageError(next(p for p in range(lim + 1, n + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))))


def _support_range(N: float, V: SmoothWeight):
    lo = max(1, math.ceil(V.a * N))
    hi = math.floor(V.b * N)
    return lo, hi


def smoothed_sum(spec: RankinSelbergSpec, N: float, V: SmoothWeight) -> complex:
    """``S(N) = sum_n lambda_f(n) lambda_g(n) n^{-it} V(n/N)``."""
    f, g = spec._forms()
    lo, hi = _support_range(N, V)
    if hi < lo:
        return 0j
    _check_cover(f, hi)
    _check_cover(g, hi)
    n = np.arange(lo, hi + 1)
    a = _lambda_table(f, hi)[lo:] * _lambda_table(g, hi)[lo:]
    return complex(np.sum(a * V(n / N) * np.exp(-1j * spec.t * np.log(n))))


def smoothed_sum_report(spec: RankinSelbergSpec, N: float, V: SmoothWeight) -> VerificationReport:
    """``|S(N)|/sqrt(N)`` against the Cauchy bound from the second moments of both forms."""
    t0 = time.perf_counter()
    f, g = spec._forms()
    lo, hi = _support_range(N, V)
    S = smoothed_sum(spec, N, V)
    n = np.arange(lo, hi + 1)
    v = np.abs(V(n / N))
    lf, lg = _lambda_table(f, hi)[lo:], _lambda_table(g, hi)[lo:]
    triangle = float(np.sum(np.abs(lf * lg) * v))
    cauchy = float(math.sqrt(np.sum(lf ** 2 * v) * np.sum(lg ** 2 * v)))
    return VerificationReport(
        name="smoothed_sum",
        passed=abs(S) <= triangle * (1 + 1e-12) and triangle <= cauchy * (1 + 1e-12),
        residuals={"abs_S": abs(S), "abs_S_over_sqrtN": abs(S) / math.sqrt(N),
                   "triangle_bound": triangle, "cauchy_bound": cauchy,
                   "cancellation_ratio": abs(S) / cauchy if cauchy else 0.0},
        tolerances={},
        details={"N": N, "t": spec.t, "S": S, "terms": int(n.size)},
        elapsed=time.perf_counter() - t0,
    )


def _envelope_constant(b: np.ndarray) -> float:
    """``sup_x x^{-1} sum_{n <= x} |b(n)|`` over the second half of the table."""
    cum = np.cumsum(np.abs(b))
    x = np.arange(1, b.size + 1)
    return float(np.max(cum[b.size // 2:] / x[b.size // 2:]))


def dirichlet_tail_check(spec: RankinSelbergSpec, sigma: float, N: int,
                         safety: float = 2.0) -> VerificationReport:
    """Stability of ``sum_{n <= N} b(n) n^{-sigma}`` for the Rankin-Selberg coefficients.

    With ``sum_{n <= x} |b(n)| <= C x`` (``C`` measured on the available
    table, times ``safety``), partial summation bounds the tail beyond ``M``
    by ``C sigma M^{1-sigma} / (sigma - 1)``.  The check compares the partial
    sums at ``N/10`` and ``N`` with that envelope at ``N/10``.
    """
    t0 = time.perf_counter()
    if sigma < 1.5:
        raise DomainError("sigma must be >= 1.5")
    f, g = spec._forms()
    _check_cover(f, N)
    _check_cover(g, N)
    b = rs_dirichlet_coeffs(f, g, N)
    n = np.arange(1, N + 1, dtype=float)
    terms = b * n ** -sigma
    partial = np.cumsum(terms)
    M = max(1, N // 10)
    C = safety * _envelope_constant(b)
    envelope = C * sigma * M ** (1 - sigma) / (sigma - 1)
    diff = abs(partial[-1] - partial[M - 1])
    return VerificationReport(
        name="dirichlet_tail",
        passed=bool(diff <= envelope),
        residuals={"partial_difference": float(diff), "envelope": float(envelope),
                   "envelope_constant": C},
        tolerances={"partial_difference": float(envelope)},
        details={"sigma": sigma, "N": N, "M": M, "partial_sum_N": float(partial[-1]),
                 "partial_sum_M": float(partial[M - 1])},
        elapsed=time.perf_counter() - t0,
    )
