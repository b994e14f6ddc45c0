"""Oscillatory integrals: a quadrature oracle, integration-by-parts
certificates for nonstationary phases, and the stationary phase expansion.

Internally every phase is used in the ``e^{i phi}`` form.  A phase declared
with ``convention="e_of_h"`` means ``e(h) = e^{2 pi i h}`` and is multiplied
by ``2 pi`` before use.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.special import comb

from .errors import (AmbiguousStationaryPoint, BudgetError, CertificateRefused,
                     DegeneratePhase, DomainError, NoStationaryPoint)
from .report import VerificationReport
from .weights import SmoothWeight, _gl_nodes

log = logging.getLogger(__name__)

__all__ = [
    "PhaseFunction",
    "oscillatory_quadrature",
    "nonstationary_bound",
    "certify_nonstationary",
    "find_stationary",
    "stationary_phase_terms",
    "stationary_phase_expansion",
    "StationaryPhaseTerms",
]

CONVENTIONS = ("exp_ih", "e_of_h")
DerivFn = Callable[[np.ndarray, int], np.ndarray]


@dataclass(frozen=True)
class PhaseFunction:
    """Smooth phase with exact derivative oracles and size descriptors.

    ``derivs_fn(x, order)`` returns an array of shape ``(order+1, len(x))``
    whose row ``k`` is ``h^{(k)}(x)``.  The descriptors follow the usual
    integration-by-parts bookkeeping: ``h' >> R0``, ``h^{(j)} << Y0 Q0^{-j}``,
    the weight satisfies ``w^{(j)} << X0 V0^{-j}`` and lives on an interval of
    length ``Omega``.
    """

    derivs_fn: DerivFn
    max_order: int = 40
    X0: float = 1.0
    V0: float = 1.0
    Y0: float = 1.0
    Q0: float = 1.0
    R0: float = 1.0
    Omega: float = 1.0
    convention: str = "exp_ih"
    label: str = "h"

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise DomainError(f"convention must be one of {CONVENTIONS}")
        for name in ("X0", "V0", "Y0", "Q0", "R0", "Omega"):
            if not getattr(self, name) > 0:
                raise DomainError(f"descriptor {name} must be positive")

    # -- evaluation ------------------------------------------------------------

    def derivs(self, x, order: int) -> np.ndarray:
        if order > self.max_order:
            raise DomainError(f"order {order} exceeds max_order {self.max_order}")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.asarray(self.derivs_fn(x, order), dtype=float).reshape(order + 1, x.size)

    def deriv(self, j: int, x):
        scalar = np.ndim(x) == 0
        d = self.derivs(x, j)[j]
        return float(d[0]) if scalar else d

    def eval(self, x):
        return self.deriv(0, x)

    __call__ = eval

    @property
    def scale(self) -> float:
        """Factor turning the declared phase into the internal ``e^{i phi}`` phase."""
        return 2 * math.pi if self.convention == "e_of_h" else 1.0

    def internal_derivs(self, x, order: int) -> np.ndarray:
        return self.scale * self.derivs(x, order)

    # -- transformations ---------------------------------------------------------

    def negated(self) -> "PhaseFunction":
        f = self.derivs_fn
        return replace(self, derivs_fn=lambda x, n: -np.asarray(f(x, n)), label=f"-({self.label})")

    def with_descriptors(self, **kw) -> "PhaseFunction":
        return replace(self, **kw)

    @classmethod
    def polynomial(cls, coeffs, center: float = 0.0, **kw) -> "PhaseFunction":
        """``h(t) = sum_k coeffs[k] (t - center)^k``."""
        p = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
        polys = [p]
        for _ in range(len(coeffs) + 1):
            polys.append(polys[-1].deriv())

        def fn(x, n):
            u = x - center
            out = np.zeros((n + 1, x.size))
            for k in range(min(n + 1, len(polys))):
                out[k] = polys[k](u)
            return out

        kw.setdefault("label", f"poly{tuple(coeffs)}@{center:g}")
        return cls(fn, **kw)

    @classmethod
    def linear(cls, lam: float, **kw) -> "PhaseFunction":
        return cls.polynomial([0.0, lam], **kw)

    @classmethod
    def quadratic(cls, lam: float, t0: float, cubic: float = 0.0, **kw) -> "PhaseFunction":
        """``lam (t - t0)^2 / 2 + cubic (t - t0)^3``."""
        return cls.polynomial([0.0, 0.0, lam / 2, cubic], center=t0, **kw)

    # -- validation ----------------------------------------------------------------

    def validate(self, support, samples: int = 401, jmax: int = 4, eps: float = 1e-5,
                 tol: float = 1e-6) -> VerificationReport:
        """Finite-difference check of ``h'`` plus sampled descriptor ratios.

        The ratios ``min|h'|/R0`` and ``max|h^{(j)}| Q0^j / Y0`` are recorded;
        only the derivative oracle check decides ``passed``.
        """
        t0 = time.perf_counter()
        a, b = support
        x = np.linspace(a + 2 * eps, b - 2 * eps, samples)
        d = self.derivs(x, max(jmax, 1))
        fd = (self.eval(x + eps) - self.eval(x - eps)) / (2 * eps)
        scale = 1 + np.abs(d[1])
        fd_err = float(np.max(np.abs(fd - d[1]) / scale))
        ratios = {f"h{j}_over_Y0Q0^-{j}": float(np.max(np.abs(d[j])) * self.Q0 ** j / self.Y0)
                  for j in range(2, jmax + 1)}
        ratios["min_h1_over_R0"] = float(np.min(np.abs(d[1])) / self.R0)
        return VerificationReport(
            name="phase_validate",
            passed=fd_err <= tol,
            residuals={"fd_error": fd_err, **ratios},
            tolerances={"fd_error": tol},
            details={"support": [a, b], "samples": samples, "convention": self.convention},
            elapsed=time.perf_counter() - t0,
        )


# ---------------------------------------------------------------------------
# quadrature oracle
# ---------------------------------------------------------------------------


def _integrand(w: SmoothWeight, h: PhaseFunction, u):
    return w(u) * np.exp(1j * h.scale * h.eval(u))


def _panel_edges(h: PhaseFunction, a: float, b: float, per_period: float, base: int):
    """Panel edges with at least ``per_period`` panels per local oscillation period."""
    x = np.linspace(a, b, 4 * base + 1)
    speed = np.abs(h.scale * h.deriv(1, x)) / (2 * math.pi)
    cells = 0.5 * (speed[1:] + speed[:-1]) * np.diff(x) * per_period
    cum = np.concatenate([[0.0], np.cumsum(np.maximum(cells, base / (4 * base)))])
    m = max(base, int(math.ceil(cum[-1])))
    return np.interp(np.linspace(0, cum[-1], m + 1), cum, x)


def _gl_sum(f, edges, deg=20):
    g, gw = np.polynomial.legendre.leggauss(deg)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    u = (mid + half * g).ravel()
    q = (half * gw).ravel()
    return complex(np.sum(f(u) * q))


def oscillatory_quadrature(w: SmoothWeight, h: PhaseFunction, tol: float = 1e-10,
                           max_panels: int = 1 << 18, return_error: bool = False):
    """``int w(t) e^{i phi(t)} dt`` over the support of ``w``.

    Panels are placed by the cumulative local frequency of the phase so that
    each one covers a fraction of a period; the panel density doubles until
    two successive Gauss-Legendre estimates agree to ``tol``.
    """
    a, b = w.support
    f = lambda u: _integrand(w, h, u)
    per_period, base = 2.0, 16
    prev = None
    err = math.inf
    while True:
        edges = _panel_edges(h, a, b, per_period, base)
        if edges.size - 1 > max_panels:
            raise BudgetError("oscillatory quadrature exceeded its panel budget",
                              estimate=prev, error=err)
        val = _gl_sum(f, edges)
        if prev is not None:
            err = abs(val - prev)
            if err <= tol:
                return (val, err) if return_error else val
        prev = val
        per_period *= 2
        base *= 2


# ---------------------------------------------------------------------------
# nonstationary phase
# ---------------------------------------------------------------------------


def _e_descriptors(h: PhaseFunction):
    """R0, Y0 rescaled to the ``e(h)`` normalisation the certificate is stated in."""
    s = h.scale / (2 * math.pi)
    return h.R0 * s, h.Y0 * s


def nonstationary_bound(w: SmoothWeight, h: PhaseFunction, A: int, samples: int = 2001,
                        validate: bool = True) -> float:
    """``(beta-alpha) X0 [(Q0 R0/sqrt(Y0))^{-A} + (R0 V0)^{-A}]``.

    The certificate is only issued when sampling confirms that ``|h'|``
    stays above ``R0`` without changing sign on the support of ``w``;
    otherwise :class:`CertificateRefused` is raised.
    """
    if A < 0:
        raise DomainError("A must be nonnegative")
    a, b = w.support
    if validate:
        x = np.linspace(a, b, samples)
        d1 = h.deriv(1, x)
        if np.any(d1 > 0) and np.any(d1 < 0):
            raise CertificateRefused("h' changes sign on the support")
        if float(np.min(np.abs(d1))) < h.R0 * (1 - 1e-12):
            raise CertificateRefused(
                f"min |h'| = {np.min(np.abs(d1)):.3g} is below the claimed R0 = {h.R0:.3g}")
    R0, Y0 = _e_descriptors(h)
    return (b - a) * h.X0 * ((h.Q0 * R0 / math.sqrt(Y0)) ** -A + (R0 * h.V0) ** -A)


def certify_nonstationary(w: SmoothWeight, h: PhaseFunction, A: int, factor: float = 10.0,
                          tol: float = 1e-14) -> VerificationReport:
    """Compare the quadrature value with ``factor`` times the certificate."""
    t0 = time.perf_counter()
    bound = nonstationary_bound(w, h, A)
    val = oscillatory_quadrature(w, h, tol=tol)
    ratio = abs(val) / bound if bound > 0 else (0.0 if val == 0 else math.inf)
    return VerificationReport(
        name="nonstationary_certificate",
        passed=ratio <= factor,
        residuals={"abs_integral": abs(val), "bound": bound, "ratio": ratio},
        tolerances={"ratio": factor},
        details={"A": A, "support": list(w.support), "label": h.label},
        elapsed=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# stationary phase
# ---------------------------------------------------------------------------


def find_stationary(h: PhaseFunction, interval, samples: int = 4001) -> float:
    """The unique zero of ``h'`` in ``interval``, by bisection and Newton polish."""
    lo, hi = map(float, interval)
    if not lo < hi:
        raise DomainError(f"degenerate interval {interval}")
    x = np.linspace(lo, hi, samples)
    d1 = h.deriv(1, x)
    sgn = np.sign(d1)
    exact = np.flatnonzero(sgn == 0)
    nz = sgn != 0
    changes = np.flatnonzero(sgn[nz][1:] != sgn[nz][:-1])
    if changes.size + (1 if exact.size and not changes.size else 0) == 0:
        raise NoStationaryPoint(f"h' has no sign change on [{lo}, {hi}]")
    if changes.size > 1 or exact.size > 1:
        raise AmbiguousStationaryPoint(f"h' changes sign {changes.size} times on [{lo}, {hi}]")
    if changes.size == 0:
        return float(x[exact[0]])
    xs = x[nz]
    a, b = float(xs[changes[0]]), float(xs[changes[0] + 1])
    fa = h.deriv(1, a)
    for _ in range(200):
        m = 0.5 * (a + b)
        if m in (a, b):
            break
        fm = h.deriv(1, m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    t = 0.5 * (a + b)
    for _ in range(3):
        d = h.derivs(t, 2)[:, 0]
        if d[2] == 0 or d[1] == 0:
            break
        step = d[1] / d[2]
        if not lo <= t - step <= hi or abs(h.deriv(1, t - step)) >= abs(d[1]):
            break
        t -= step
    return float(t)


@dataclass
class StationaryPhaseTerms:
    """Ingredients of the expansion: ``value = prefactor * sum(terms)``."""

    t0: float
    h0: float
    h2: float
    prefactor: complex
    terms: list = field(default_factory=list)

    @property
    def value(self) -> complex:
        return self.prefactor * sum(self.terms)

    def partial(self, order: int) -> complex:
        return self.prefactor * sum(self.terms[: order + 1])


def _exp_iH_derivs(phi: np.ndarray, m: int) -> np.ndarray:
    """Derivatives of ``E = e^{iH}`` at ``t0`` up to order ``m``.

    ``H`` vanishes to second order at ``t0`` and agrees with the phase from
    the third derivative on; ``E' = iH' E`` differentiated ``k`` times gives
    ``E^{(k+1)} = sum_j C(k,j) (iH)^{(j+1)} E^{(k-j)}``.
    """
    iH = np.zeros(m + 1, dtype=complex)
    iH[3:] = 1j * phi[3:m + 1]
    E = np.zeros(m + 1, dtype=complex)
    E[0] = 1.0
    for k in range(m):
        E[k + 1] = sum(comb(k, j, exact=True) * iH[j + 1] * E[k - j] for j in range(k + 1))
    return E


def stationary_phase_terms(w: SmoothWeight, h: PhaseFunction, order: int,
                           interval=None) -> StationaryPhaseTerms:
    """Stationary point data and the terms ``p_n(t0)`` for ``n <= order``.

    ``p_n = sqrt(2 pi) e^{i pi/4} / n! * (i / (2 h''))^n * G^{(2n)}(t0)`` with
    ``G = w e^{iH}`` and ``H = h - h(t0) - h''(t0)(t - t0)^2 / 2``; the
    derivatives of ``G`` come from Leibniz' rule on exact oracles.
    """
    if order < 0:
        raise DomainError("order must be nonnegative")
    m = 2 * order
    if w.max_order < m + 2:
        raise DomainError(f"weight max_order {w.max_order} < {m + 2}")
    t0 = find_stationary(h, interval if interval is not None else w.support)
    phi = h.internal_derivs(t0, max(m, 2))[:, 0]
    h2 = float(phi[2])
    threshold = 1e-8 * h.scale * h.Y0 / h.Q0 ** 2
    if abs(h2) < threshold:
        raise DegeneratePhase(f"|h''(t0)| = {abs(h2):.3g} below {threshold:.3g}")
    E = _exp_iH_derivs(phi, m)
    wd = w.derivs(t0, m)[:, 0]
    G = np.array([sum(comb(k, j, exact=True) * wd[k - j] * E[j] for j in range(k + 1))
                  for k in range(m + 1)])
    c0 = math.sqrt(2 * math.pi) * np.exp(1j * math.pi / 4)
    terms = [complex(c0 / math.factorial(n) * (1j / (2 * h2)) ** n * G[2 * n])
             for n in range(order + 1)]
    prefactor = complex(np.exp(1j * phi[0]) / np.sqrt(complex(h2)))
    return StationaryPhaseTerms(t0=t0, h0=float(phi[0]), h2=h2, prefactor=prefactor, terms=terms)


def stationary_phase_expansion(w: SmoothWeight, h: PhaseFunction, order: int,
                               interval=None) -> complex:
    """``e^{i h(t0)} / sqrt(h''(t0)) * sum_{n <= order} p_n(t0)``."""
    return stationary_phase_terms(w, h, order, interval).value
