"""Complex log-Gamma, the Stirling phase of Gamma ratios, and Bessel
functions of purely imaginary order.

Conventions
-----------
Throughout, ``r`` is half the imaginary order, so the functions are
``J_{2ir}`` and ``K_{2ir}``.  The asymptotic form of ``J_{±2ir}(2x)`` is
normalised by ``sinh(pi r)``; with that choice the two branches are exact
complex conjugates of each other for real ``r, x``.  (Normalising by
``sin(pi i r) = i sinh(pi r)`` instead only multiplies by ``-i``.)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import DomainError, RegimeError

log = logging.getLogger(__name__)

__all__ = [
    "log_gamma",
    "gamma_ratio",
    "gamma_ratio_asymptotic",
    "GammaRatioAsymptotic",
    "BesselKernelParams",
    "BesselAsymptotic",
    "bessel_j_imag_order",
    "bessel_j_series",
    "bessel_j_asymptotic",
    "bessel_j_asymptotic_parts",
    "bessel_j_switchover",
    "bessel_k_imag_order",
]

# ---------------------------------------------------------------------------
# log Gamma
# ---------------------------------------------------------------------------

_LD = np.longdouble
_HALF_LOG_2PI = _LD("0.91893853320467274178032973640561763986139747363778")
_TWO_PI_LD = _LD("6.28318530717958647692528676655900576839433879875021")
# B_{2k} / (2k (2k-1)) for k = 1..8
_STIRLING = [
    (_LD(1), _LD(12)),
    (_LD(-1), _LD(360)),
    (_LD(1), _LD(1260)),
    (_LD(-1), _LD(1680)),
    (_LD(1), _LD(1188)),
    (_LD(-691), _LD(360360)),
    (_LD(1), _LD(156)),
    (_LD(-3617), _LD(122400)),
]
_STIRLING_MIN_MODULUS = 17.0


def _stirling_series(z):
    """log Gamma(z) for |z| >= 17, Re z > 0, in extended precision."""
    lz = np.log(z)
    out = (z - _LD(0.5)) * lz - z + _HALF_LOG_2PI
    zinv = 1 / z
    zinv2 = zinv * zinv
    p = zinv
    for num, den in _STIRLING:
        out = out + (num / den) * p
        p = p * zinv2
    return out


def _log_gamma_ld(z):
    """Extended-precision log Gamma on an array; returns clongdouble."""
    z = np.asarray(z, dtype=np.clongdouble)
    re = z.real.astype(float)
    im = z.imag.astype(float)
    pole = (im == 0) & (re <= 0) & (re == np.round(re))
    if np.any(pole):
        raise DomainError(f"log_gamma has a pole at {complex(z[pole].flat[0])}")
    need = ~((re > 0) & (np.hypot(re, im) >= _STIRLING_MIN_MODULUS))
    shift = np.where(need, np.ceil(_STIRLING_MIN_MODULUS - re), 0).astype(int)
    shift = np.maximum(shift, 0)
    # log Gamma(z) = log Gamma(z+n) - sum_{k<n} log(z+k); principal logs
    # of z+k keep the result on the branch continuous from the right half
    # plane, which is the branch scipy.special.loggamma uses.
    acc = np.zeros_like(z)
    nmax = int(shift.max()) if shift.size else 0
    for k in range(nmax):
        m = shift > k
        acc[m] += np.log(z[m] + k)
    return _stirling_series(z + shift) - acc


def log_gamma(z):
    """log Gamma(z) on the branch analytic off the non-positive real axis.

    Accepts a scalar or array.  The recurrence shift and the Stirling
    series are accumulated in ``clongdouble`` so the imaginary part stays
    accurate to roughly ``1e-13`` absolute for ``|Im z|`` up to ``1e5``.
    The branch agrees with :func:`scipy.special.loggamma`.
    """
    scalar = np.ndim(z) == 0
    out = _log_gamma_ld(np.atleast_1d(z)).astype(complex)
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Gamma ratio Gamma(s+it)/Gamma(s-it)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaRatioAsymptotic:
    """Stirling description of Gamma(sigma+it)/Gamma(sigma-it).

    ``predicted_phase`` is ``2 t log(|t|/e)`` reduced mod 2*pi.  The
    slowly varying factor is ``correction_modulus * exp(i correction_phase)``.
    """

    sigma: float
    t: float
    predicted_phase: float
    correction_modulus: float
    correction_phase: float

    @property
    def value(self) -> complex:
        ph = self.predicted_phase + self.correction_phase
        return self.correction_modulus * complex(math.cos(ph), math.sin(ph))


def _reduce_2pi(x):
    x = _LD(x)
    return float(x - _TWO_PI_LD * np.floor(x / _TWO_PI_LD))


def gamma_ratio_asymptotic(sigma: float, t: float, terms: int = 1) -> GammaRatioAsymptotic:
    """Leading Stirling form of the Gamma ratio for real ``sigma``.

    The slowly varying phase collects ``(sigma-1/2) arg(sigma+i|t|)``,
    ``(|t|/2) log(1+sigma^2/t^2)`` and ``terms`` Bernoulli corrections.
    """
    if t == 0:
        raise RegimeError("asymptotic Gamma ratio needs t != 0")
    at = abs(float(t))
    z = complex(sigma, at)
    phase = (sigma - 0.5) * math.atan2(at, sigma) + 0.5 * at * math.log1p((sigma / at) ** 2)
    p = 1 / z
    for num, den in _STIRLING[:terms]:
        phase += float(num / den) * p.imag
        p /= z * z
    tl = _LD(at)
    predicted = 2 * tl * (np.log(tl) - 1)
    sign = 1.0 if t > 0 else -1.0
    return GammaRatioAsymptotic(
        sigma=float(sigma),
        t=float(t),
        predicted_phase=_reduce_2pi(sign * predicted),
        correction_modulus=1.0,
        correction_phase=sign * 2 * phase,
    )


def gamma_ratio(sigma: float, t: float, mode: str = "exact", terms: int = 1) -> complex:
    """Gamma(sigma+it) / Gamma(sigma-it).

    ``mode="exact"`` uses :func:`log_gamma`; ``mode="asymptotic"`` uses
    ``exp(2it log(|t|/e))`` times the slowly varying Stirling factor.
    """
    if mode == "asymptotic":
        return gamma_ratio_asymptotic(sigma, t, terms).value
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    lp, lm = _log_gamma_ld(np.array([complex(sigma, t), complex(sigma, -t)]))
    d = lp - lm
    ph = _reduce_2pi(d.imag)
    return float(np.exp(d.real)) * complex(math.cos(ph), math.sin(ph))


# ---------------------------------------------------------------------------
# J_{2ir}
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BesselKernelParams:
    r: float
    x: float
    branch: str = "plus"

    def __post_init__(self):
        if not (np.isfinite(self.r) and np.isfinite(self.x)) or self.r <= 0 or self.x <= 0:
            raise DomainError("r and x must be finite and positive")
        if self.branch not in ("plus", "minus"):
            raise DomainError(f"unknown branch {self.branch!r}")


@dataclass(frozen=True)
class BesselAsymptotic:
    """Pieces of ``J_{±2ir}(2x)/sinh(pi r) ~ W (4r^2+x^2)^{-1/4} e^{±2i omega}``."""

    params: BesselKernelParams
    W: complex
    envelope: float
    omega: float

    @property
    def value(self) -> complex:
        s = 1 if self.params.branch == "plus" else -1
        return self.W * self.envelope * complex(math.cos(2 * self.omega), s * math.sin(2 * self.omega))


def bessel_j_switchover(r: float) -> float:
    """Argument above which ``J_{2ir}(x)`` is taken from the asymptotic form."""
    return max(30.0, 10.0 * abs(r))


def _debye_factor(nu, X):
    """Two-term uniform Hankel correction for order i*nu, argument X.

    Returns (w, Phi, 1 + c) where w = sqrt(X^2+nu^2) and
    Phi = w - nu asinh(nu/X) is the WKB phase.
    """
    w = math.hypot(X, nu)
    phi = w - nu * math.asinh(nu / X)
    p2 = (nu / w) ** 2
    u1 = (3 - 5 * p2) / 24
    u2 = (81 - 462 * p2 + 385 * p2 * p2) / 1152
    return w, phi, complex(1 - u2 / (w * w), -u1 / w)


def bessel_j_asymptotic_parts(r: float, x: float, branch: str = "plus") -> BesselAsymptotic:
    """Large-argument form of ``J_{±2ir}(2x) / sinh(pi r)``.

    The bounded factor is
    ``W = sqrt(2/pi) e^{∓i pi/4} ((4r^2+x^2)/(4r^2+4x^2))^{1/4} (1+c) / (1-e^{-2 pi r})``
    with ``c`` the two-term uniform Hankel correction, and
    ``omega = sqrt(r^2+x^2) - r asinh(r/x)`` for both branches.  The
    exponentially small ``e^{-2 pi r}`` counter-rotating piece is left out;
    :func:`bessel_j_imag_order` restores it.
    """
    params = BesselKernelParams(float(r), float(x), branch)
    if x < 10 * r:
        raise RegimeError(f"asymptotic J needs x >= 10 r (x={x}, r={r}); use the series route")
    nu, X = 2 * r, 2 * x
    w, phi, corr = _debye_factor(nu, X)
    envelope = (4 * r * r + x * x) ** -0.25
    W = math.sqrt(2 / math.pi) * ((4 * r * r + x * x) / (w * w)) ** 0.25
    W = W * complex(math.cos(math.pi / 4), -math.sin(math.pi / 4)) * corr / (-math.expm1(-2 * math.pi * r))
    if branch == "minus":
        W = W.conjugate()
    return BesselAsymptotic(params, W, envelope, phi / 2)


def bessel_j_asymptotic(r: float, x: float, branch: str = "plus") -> complex:
    """Asymptotic value of ``J_{±2ir}(2x) / sinh(pi r)``; see :func:`bessel_j_asymptotic_parts`."""
    return bessel_j_asymptotic_parts(r, x, branch).value


def bessel_j_series(r: float, x: float, scaled: bool = False) -> complex:
    """``J_{2ir}(x)`` from its power series in extended precision.

    The largest terms are about ``e^x`` times the result, so the working
    precision grows with ``x``.  ``scaled`` multiplies by ``e^{-pi r}``.
    """
    if x <= 0:
        raise DomainError("x must be positive")
    dps = 20 + int(x / 2.3) + int(2 * math.pi * abs(r) / 2.3)
    with mpmath.workdps(dps):
        mu = mpmath.mpc(0, 2 * r)
        h = mpmath.mpf(x) / 2
        h2 = -h * h
        term = mpmath.power(h, mu) * mpmath.rgamma(mu + 1)
        total = term
        eps = mpmath.mpf(10) ** (-dps + 2)
        k = 0
        while True:
            k += 1
            term = term * h2 / (k * (k + mu))
            total += term
            if k > h and abs(term) <= eps * abs(total):
                break
        if scaled:
            total *= mpmath.exp(-mpmath.pi * r)
        return complex(total)


def bessel_j_imag_order(r: float, x: float, scaled: bool = False) -> complex:
    """``J_{2ir}(x)`` for real ``r >= 0`` and ``x > 0``.

    Power series below the switchover ``max(30, 10 r)``, the uniform
    asymptotic form above it.  ``scaled=True`` returns ``e^{-pi r} J_{2ir}(x)``,
    which stays bounded; the unscaled value overflows once ``pi r`` passes
    roughly 700 and that case raises.
    """
    if x <= 0:
        raise DomainError("x must be positive")
    if r < 0:
        return bessel_j_imag_order(-r, x, scaled).conjugate()
    if not scaled and math.pi * r > 700:
        raise OverflowError("J_{2ir} overflows double precision; call with scaled=True")
    if x < bessel_j_switchover(r):
        return bessel_j_series(r, x, scaled)
    # J = (1/2) sqrt(2/pi) w^{-1/2} (e^{pi r} P + e^{-pi r} conj(P)),
    # P = e^{i(Phi - pi/4)} (1 + c)
    nu = 2 * r
    w, phi, corr = _debye_factor(nu, x)
    P = complex(math.cos(phi - math.pi / 4), math.sin(phi - math.pi / 4)) * corr
    amp = 0.5 * math.sqrt(2 / math.pi) / math.sqrt(w)
    if scaled:
        return amp * (P + math.exp(-2 * math.pi * r) * P.conjugate())
    return amp * (math.exp(math.pi * r) * P + math.exp(-math.pi * r) * P.conjugate())


# ---------------------------------------------------------------------------
# K_{2ir}
# ---------------------------------------------------------------------------


def _k_direct(nu, x, h=0.05):
    """int_0^inf exp(-x cosh u) cos(nu u) du by the trapezoid rule.

    Used for small orders, where the cosine barely oscillates.
    """
    umax = math.acosh(max(40.0 / x.min(), 1.0)) + 1.0
    u = np.arange(int(math.ceil(umax / h)) + 1) * h
    f = np.exp(-np.outer(x, np.cosh(u))) * np.cos(nu * u)[None, :]
    f[:, 0] *= 0.5
    return h * f.sum(axis=1)


def _k_contour_scaled(nu, x, h=0.02, chunk=20000):
    """``e^{pi nu/2} K_{i nu}(x)`` for ``nu >= 1``.

    Same integral as :func:`_k_direct`, written as
    ``(1/2) int_R exp(-x cosh tau + i nu tau) dtau`` and moved onto the
    path ``tau = t + i(pi/2 - atan(s (x cosh t - nu)/nu))``, along which the
    integrand no longer oscillates.  ``s`` sets how sharply the path turns
    near the turning point ``x cosh t = nu``.  The trapezoid rule then
    converges geometrically in ``1/h``.
    """
    out = np.empty_like(x)
    for i0 in range(0, x.size, chunk):
        xs = x[i0:i0 + chunk][:, None]
        with np.errstate(invalid="ignore", divide="ignore"):
            s = np.where(nu > xs, nu / np.sqrt(np.abs(nu * nu - xs * xs)),
                         np.sqrt(np.abs((xs + nu) / (xs - nu))))
        s = np.minimum(np.nan_to_num(s, nan=1e9, posinf=1e9), 2 * max(nu, 1) ** (1 / 3) + 1)
        tmax = math.acosh(max((nu + 60) / xs.min(), 1.0)) + 3.0
        t = np.arange(int(math.ceil(tmax / h)) + 1) * h
        c = np.cosh(t)[None, :]
        u = s * (xs * c - nu) / nu
        d = np.arctan(u)
        dd = s * xs * np.sinh(t)[None, :] / nu / (1 + u * u)
        tau = t[None, :] + 1j * (np.pi / 2 - d)
        e = -xs * np.cosh(tau) + 1j * nu * tau + nu * np.pi / 2
        f = np.exp(np.maximum(e.real, -745)) * np.exp(1j * e.imag) * (1 - 1j * dd)
        f[:, 0] *= 0.5
        out[i0:i0 + chunk] = h * f.sum(axis=1).real
    return out


def bessel_k_imag_order(r: float, x, scaled: bool = False):
    """``K_{2ir}(x)`` for real ``r`` and ``x > 0``; vectorised over ``x``.

    ``scaled=True`` returns ``cosh(pi r) K_{2ir}(x)``, which is O(1) in the
    oscillatory range ``x < 2|r|`` and never overflows.  The unscaled value
    is of size ``e^{-pi |r|}`` there.
    """
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(xa > 0)):
        raise DomainError("K_{2ir}(x) needs x > 0")
    nu = 2 * abs(float(r))
    if nu < 2:
        val = _k_direct(nu, xa)
        out = val * math.cosh(math.pi * nu / 2) if scaled else val
    else:
        es = _k_contour_scaled(nu, xa)
        if scaled:
            out = es * 0.5 * (1 + math.exp(-math.pi * nu))
        else:
            out = es * math.exp(-math.pi * nu / 2)
    return float(out[0]) if scalar else out
