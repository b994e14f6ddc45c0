"""Maass form data, Hecke eigenvalues, Ramanujan sums and the arithmetic
counting used in the bilinear estimates."""

from __future__ import annotations

import json
import logging
import math
import os
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConsistencyError, CoverageError, DomainError
from .report import VerificationReport

log = logging.getLogger(__name__)

KIM_SARNAK_THETA = 7 / 64
DEFAULT_FIXTURE = "maass_even_13_7797.json"
FIXTURE_ENV = "RANKIN_DELTA_FIXTURE"

__all__ = [
    "MaassFormData",
    "load_form",
    "primes_up_to",
    "mobius_up_to",
    "hecke_eigenvalues",
    "eigenvalue_error_budget",
    "ramanujan_average",
    "ramanujan_average_report",
    "l4_norm",
    "l4_report",
    "ramanujan_sum",
    "ramanujan_sum_direct",
    "ramanujan_sum_mobius",
    "rs_dirichlet_coeffs",
    "count_bilinear",
    "bilinear_report",
    "alpha_plus",
    "alpha_minus",
]


# ---------------------------------------------------------------------------
# sieves
# ---------------------------------------------------------------------------


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve).tolist()


def mobius_up_to(n: int) -> np.ndarray:
    """mu(0..n) as an int array (mu(0) is set to 0)."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_up_to(n):
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
    return mu


# ---------------------------------------------------------------------------
# form data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MaassFormData:
    """One Hecke-Maass cusp form for SL2(Z), described by its prime eigenvalues.

    ``prime_table`` maps p -> lambda(p) with lambda(1) = 1 implied.
    ``precision`` is the absolute uncertainty of each table entry.
    """

    spectral_R: float
    parity: str
    prime_table: dict
    source: str = ""
    precision: float = 0.0
    name: str = ""
    checks: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.spectral_R > 0:
            raise DomainError("spectral_R must be positive")
        if self.parity not in ("even", "odd"):
            raise DomainError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        for p, v in self.prime_table.items():
            bound = p ** KIM_SARNAK_THETA + p ** -KIM_SARNAK_THETA + 1e-6
            if abs(v) > bound:
                raise DomainError(f"lambda({p}) = {v} violates the Kim-Sarnak bound {bound:.6f}")

    @property
    def epsilon(self) -> int:
        """Parity sign: +1 for even forms, -1 for odd forms."""
        return 1 if self.parity == "even" else -1

    @property
    def max_prime(self) -> int:
        return max(self.prime_table) if self.prime_table else 1

    def covered_limit(self) -> int:
        """Largest N such that every prime <= N has an eigenvalue."""
        for p in primes_up_to(self.max_prime + 1):
            if p not in self.prime_table:
                return p - 1
        return self.max_prime

    @classmethod
    def from_dict(cls, doc: dict) -> "MaassFormData":
        table = {int(p): float(v) for p, v in doc["eigenvalues"]}
        return cls(
            spectral_R=float(doc["spectral_R"]),
            parity=doc["parity"],
            prime_table=table,
            source=doc.get("source", ""),
            precision=float(doc.get("precision", 0.0)),
            name=doc.get("name", ""),
            checks=doc.get("checks", {}),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "spectral_R": self.spectral_R,
            "parity": self.parity,
            "eigenvalues": [[p, self.prime_table[p]] for p in sorted(self.prime_table)],
            "source": self.source,
            "precision": self.precision,
        }


def load_form(path: str | os.PathLike | None = None) -> MaassFormData:
    """Load a fixture file; defaults to ``$RANKIN_DELTA_FIXTURE`` or the bundled form."""
    if path is None:
        path = os.environ.get(FIXTURE_ENV)
    if path is None:
        text = resources.files("rankin_delta.data").joinpath(DEFAULT_FIXTURE).read_text()
    else:
        text = Path(path).read_text()
    return MaassFormData.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Hecke eigenvalues
# ---------------------------------------------------------------------------


def _prime_power_values(lp: float, kmax: int) -> np.ndarray:
    """lambda(p^k), k = 0..kmax, from lambda(p^{k+1}) = lambda(p) lambda(p^k) - lambda(p^{k-1})."""
    out = np.empty(kmax + 1)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = lp
    for k in range(1, kmax):
        out[k + 1] = lp * out[k] - out[k - 1]
    return out


def _lambda_table(form: MaassFormData, N: int) -> np.ndarray:
    """lambda(n) at index n for 0 <= n <= N (index 0 unused, set to 0)."""
    lam = np.ones(N + 1)
    lam[0] = 0.0
    for p in primes_up_to(N):
        lp = form.prime_table.get(p)
        if lp is None:
            raise CoverageError(p)
        kmax = int(math.log(N) / math.log(p) + 1e-9)
        while p ** (kmax + 1) <= N:
            kmax += 1
        while p ** kmax > N:
            kmax -= 1
        pw = _prime_power_values(lp, kmax)
        idx = np.arange(p, N + 1, p)
        v = np.ones(idx.size, dtype=np.int64)
        q = p * p
        while q <= N:
            v[(idx % q) == 0] += 1
            q *= p
        lam[idx] *= pw[v]
    return lam


def hecke_eigenvalues(form: MaassFormData, N: int) -> np.ndarray:
    """lambda(1), ..., lambda(N) as an array (entry n-1 holds lambda(n))."""
    if N < 1:
        return np.zeros(0)
    return _lambda_table(form, N)[1:]


def eigenvalue_error_budget(form: MaassFormData, N: int) -> np.ndarray:
    """First-order absolute uncertainty of lambda(1..N) from the table precision.

    A perturbation delta of each lambda(p) moves lambda(p^k) by at most
    k (k+1)/2 * max|lambda(p)|^{k-1} * delta; for composite n the prime
    power errors are multiplied by the other factors.  Here every factor is
    bounded by the divisor-type estimate d(m) m^{7/64}, giving
    ``precision * Omega(n) * d(n)^2 * n^{7/64}`` as a crude but safe bound.
    """
    n = np.arange(1, N + 1)
    omega = np.zeros(N + 1)
    d = np.ones(N + 1)
    for p in primes_up_to(N):
        q = p
        while q <= N:
            omega[q::q] += 1
            q *= p
        # divisor function: multiply by (k+1)/k for each extra power
        idx = np.arange(p, N + 1, p)
        k = np.zeros(idx.size)
        q = p
        while q <= N:
            k += (idx % q) == 0
            q *= p
        d[idx] *= k + 1
    return form.precision * omega[1:] * d[1:] ** 2 * n ** KIM_SARNAK_THETA


def ramanujan_average(form: MaassFormData, N: int, normalized: str = "count") -> float:
    """sum_{n<=N} lambda(n)^2 / N, or sum lambda(n)^2/n with ``normalized="log"``."""
    lam = hecke_eigenvalues(form, N)
    if normalized == "count":
        return float(np.sum(lam ** 2) / N)
    if normalized == "log":
        return float(np.sum(lam ** 2 / np.arange(1, N + 1)))
    raise ValueError(f"unknown normalisation {normalized!r}")


def _checkpoints(N: int, start: int = 10) -> np.ndarray:
    pts = np.unique(np.round(np.geomspace(min(start, N), N, 25)).astype(int))
    return pts[pts >= 1]


def ramanujan_average_report(form: MaassFormData, N: int) -> VerificationReport:
    """Second moment of the eigenvalues with a fitted constant in sum <= c N^{1+eps}."""
    t0 = time.perf_counter()
    lam2 = hecke_eigenvalues(form, N) ** 2
    partial = np.cumsum(lam2)
    pts = _checkpoints(N)
    ratio = partial[pts - 1] / pts
    monotone = bool(np.all(np.diff(partial) >= 0))
    slope = float(np.polyfit(np.log(pts), np.log(partial[pts - 1]), 1)[0]) if pts.size > 1 else float("nan")
    return VerificationReport(
        name="ramanujan_average",
        passed=monotone and bool(np.all(np.isfinite(ratio))),
        residuals={"mean_square": float(partial[-1] / N), "fitted_c": float(ratio.max()),
                   "loglog_slope": slope,
                   "log_normalized": float(np.sum(lam2 / np.arange(1, N + 1)))},
        tolerances={},
        details={"N": N, "checkpoints": pts.tolist(), "ratio": ratio.tolist(),
                 "nondecreasing": monotone},
        elapsed=time.perf_counter() - t0,
    )


def l4_norm(form: MaassFormData, N: int) -> float:
    """sum_{n<=N} lambda(n)^4 / n."""
    lam = hecke_eigenvalues(form, N)
    return float(np.sum(lam ** 4 / np.arange(1, N + 1)))


def l4_report(form: MaassFormData, N: int, max_log_power: float = 4.0) -> VerificationReport:
    """Fourth moment sum lambda^4/n with a fit a (log n)^b over dyadic checkpoints.

    Passes when the partial sums are nondecreasing, the fitted power b is at
    most ``max_log_power``, and L4/(log n)^4 stays bounded (its maximum over
    the upper half of the checkpoints does not exceed that over the lower half
    by more than a factor 2).
    """
    t0 = time.perf_counter()
    lam = hecke_eigenvalues(form, N)
    partial = np.cumsum(lam ** 4 / np.arange(1, N + 1))
    pts = _checkpoints(N)
    pts = pts[pts >= 3]
    vals = partial[pts - 1]
    logs = np.log(pts)
    b, loga = np.polyfit(np.log(logs), np.log(vals), 1)
    ratio = vals / logs ** 4
    half = ratio.size // 2
    bounded = bool(ratio[half:].max() <= 2 * ratio[:half].max()) if half else True
    monotone = bool(np.all(np.diff(partial) >= 0))
    return VerificationReport(
        name="l4_norm",
        passed=monotone and bounded and b <= max_log_power,
        residuals={"l4": float(partial[-1]), "fitted_log_power": float(b),
                   "fitted_constant": float(np.exp(loga)), "max_ratio_log4": float(ratio.max())},
        tolerances={"max_log_power": max_log_power},
        details={"N": N, "checkpoints": pts.tolist(), "ratio_log4": ratio.tolist(),
                 "nondecreasing": monotone, "bounded": bounded},
        elapsed=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# Ramanujan sums
# ---------------------------------------------------------------------------


def ramanujan_sum_direct(q: int, n: int) -> int:
    """sum over a mod q, (a,q)=1 of e(an/q), rounded to the nearest integer.

    The residues a*n mod q are reduced in integer arithmetic before the
    cosine is taken; the imaginary parts cancel between a and q-a.
    """
    if q < 1:
        raise DomainError("q must be >= 1")
    a = np.arange(1, q + 1)
    a = a[np.gcd(a, q) == 1]
    frac = (a * (n % q)) % q
    s = float(np.cos(2 * np.pi * frac / q).sum())
    out = int(round(s))
    if abs(s - out) > 1e-6:
        raise ConsistencyError(f"direct Ramanujan sum c_{q}({n}) = {s} is not near an integer")
    return out


def _divisors(q: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(q) + 1) if q % d == 0]
    return sorted(set(small + [q // d for d in small]))


def _mobius(n: int) -> int:
    mu, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            mu = -mu
        p += 1
    return -mu if m > 1 else mu


def ramanujan_sum_mobius(q: int, n: int) -> int:
    """c_q(n) = sum_{d | q, d | n} d mu(q/d), in integer arithmetic."""
    if q < 1:
        raise DomainError("q must be >= 1")
    return sum(d * _mobius(q // d) for d in _divisors(q) if n % d == 0)


def ramanujan_sum(q: int, n: int) -> int:
    """c_q(n), computed by both the exponential sum and the Mobius formula.

    Raises :class:`ConsistencyError` if the two routes disagree.
    """
    a = ramanujan_sum_direct(q, n)
    b = ramanujan_sum_mobius(q, n)
    if a != b:
        raise ConsistencyError(f"c_{q}({n}): direct {a} != Mobius {b}")
    return a


# ---------------------------------------------------------------------------
# Rankin-Selberg coefficients
# ---------------------------------------------------------------------------


def rs_dirichlet_coeffs(f: MaassFormData, g: MaassFormData, N: int) -> np.ndarray:
    """b(1..N) with zeta(2s) sum lambda_f lambda_g n^{-s} = sum b(n) n^{-s}.

    ``b(n) = sum_{d^2 | n} lambda_f(n/d^2) lambda_g(n/d^2)``.
    """
    a = _lambda_table(f, N) * _lambda_table(g, N)
    b = np.zeros(N + 1)
    for d in range(1, math.isqrt(N) + 1):
        d2 = d * d
        m = np.arange(1, N // d2 + 1)
        b[m * d2] += a[m]
    return b[1:]


# ---------------------------------------------------------------------------
# bilinear counting and the quadratic root
# ---------------------------------------------------------------------------


def count_bilinear(R: int, H: int, delta: float) -> int:
    """#{r1, r2 in (R, 2R], h1, h2 in (H, 2H] : |h1 r2 - h2 r1| <= delta}.

    The products h1*r2 are integers, so the count is computed by sorting
    the multiset {h2*r1} and counting, for each h1*r2, the entries within
    floor(delta) of it.
    """
    if R < 1 or H < 1:
        raise DomainError("R and H must be >= 1")
    if delta < 0:
        return 0
    r = np.arange(R + 1, 2 * R + 1, dtype=np.int64)
    h = np.arange(H + 1, 2 * H + 1, dtype=np.int64)
    prods = np.sort(np.outer(h, r).ravel())
    k = int(math.floor(delta))
    lo = np.searchsorted(prods, prods - k, side="left")
    hi = np.searchsorted(prods, prods + k, side="right")
    return int((hi - lo).sum())


def bilinear_report(R: int, H: int, delta: float, c_max: float = 10.0) -> VerificationReport:
    """Count with the envelope constants c = count / (H R log(HR)) and c / (1 + delta)."""
    t0 = time.perf_counter()
    cnt = count_bilinear(R, H, delta)
    L = math.log(H * R) if H * R > 1 else 1.0
    c = cnt / (H * R * L)
    return VerificationReport(
        name="count_bilinear",
        passed=c <= c_max,
        residuals={"count": cnt, "c": c, "c_with_delta": c / (1 + delta)},
        tolerances={"c_max": c_max},
        details={"R": R, "H": H, "delta": delta},
        elapsed=time.perf_counter() - t0,
    )


def _alpha_check(r, h, d, t):
    if min(r, h, d) < 1 or not t > 0:
        raise DomainError("need r, h, d >= 1 and t > 0")
    disc = (math.pi * r * d * h) ** 2 + 4 * math.pi * t * d * d * h * r
    if disc < 0:
        raise DomainError("negative discriminant")
    return math.sqrt(disc)


def alpha_plus(r: int, h: int, d: int, t: float) -> float:
    """Positive root y of pi r y (y + d h) - t d^2 h = 0.

    Written as 2 t d^2 h / (pi r d h + sqrt(disc)) to avoid cancellation.
    """
    s = _alpha_check(r, h, d, t)
    return 2 * t * d * d * h / (math.pi * r * d * h + s)


def alpha_minus(r: int, h: int, d: int, t: float) -> float:
    """Negative root of the same quadratic."""
    s = _alpha_check(r, h, d, t)
    return -(math.pi * r * d * h + s) / (2 * math.pi * r)
