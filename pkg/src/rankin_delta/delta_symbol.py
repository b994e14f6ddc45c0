"""The delta-symbol expansion of the Kronecker delta with an explicit weight g(q, x).

Construction.  Let ``w`` be a smooth weight supported in ``[Q/2, Q]`` with
``sum_{d in Z} w(d) = 1``.  Pairing the divisors ``d`` and ``|n|/d`` of
``n != 0`` gives ``delta(n) = sum_{d | n} (w(d) - w(|n|/d))``; detecting
``d | n`` with additive characters turns this into

    delta(n) = sum_{q <= Q} c_q(n) Delta_q(n),
    Delta_q(y) = sum_{r >= 1} (qr)^{-1} [w(qr) - w(|y|/(qr))],

valid for ``|n| <= Q^2/2`` (for larger ``q`` every term vanishes in that
range).  Writing ``Delta_q(y) = (qQ)^{-1} int g(q, x) e(xy/(qQ)) dx`` and
applying Poisson summation to the ``r``-sum gives

    g(q, x) = g_2(x) + qQ C_q rho_q^(x),
    g_2(x) = int w - (Q/|x|) sum_{k >= 1} w(kQ/|x|),
    C_q = sum_r w(qr)/(qr) - q^{-1} int w(u) du/u,

where ``rho_q`` is the indicator of ``|u| <= P + 1/2`` (``P = Q/(2q)``)
smoothed by a narrow Gaussian, so it equals 1 at every ``n/(qQ)`` with
``|n| <= Q^2/2``; its transform is ``sin(pi(2P+1)x)/(pi x) exp(-2 pi^2 s^2 x^2)``.
``g_2(x)`` equals ``int w`` (which is 1 up to a negligible Poisson error) for
``|x| < 1`` and decays rapidly, and ``C_q`` is tiny unless ``q`` is
comparable to ``Q``.
"""

from __future__ import annotations

import functools
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, DomainError
from .hecke import ramanujan_sum
from .report import VerificationReport
from .weights import SmoothWeight, _gl_nodes, bump

log = logging.getLogger(__name__)

__all__ = [
    "DeltaParams",
    "g_weight",
    "g_weight_properties",
    "delta_divisor_term",
    "delta_q_term",
    "delta_expansion",
    "verify_delta",
]

DEFAULT_X_CUTOFF = 40.0
RHO_WIDTH = 0.06


def _default_seed():
    # psi^3 rather than psi: its Fourier transform, and hence g_2, decays much
    # faster, so a short x-window suffices; higher powers narrow the profile
    # and make the Riemann sums behind C_q (so g near x = 0) less accurate
    b = bump(0.5, 1.0)
    return b * b * b


@dataclass(frozen=True)
class DeltaParams:
    """Parameters of the expansion.

    ``seed_weight`` is a shape on ``[1/2, 1]``; the generating weight is
    ``w(v) = seed(v/Q)`` normalised so that its values at the integers sum
    to 1.  The ``x``-integral is cut by ``W(x/x_cutoff)`` with ``W`` equal
    to 1 on ``[-1, 1]`` and supported in ``[-2, 2]``.
    """

    Q: int
    x_cutoff: float = DEFAULT_X_CUTOFF
    quad_tol: float = 1e-8
    seed_weight: SmoothWeight = field(default_factory=_default_seed)
    rho_width: float = RHO_WIDTH

    def __post_init__(self):
        if int(self.Q) != self.Q or self.Q < 2:
            raise DomainError("Q must be an integer >= 2")
        if self.x_cutoff < 2:
            raise DomainError("x_cutoff must be >= 2")
        a, b = self.seed_weight.support
        if a < 0.5 - 1e-12 or b > 1 + 1e-12:
            raise DomainError("seed weight must be supported in [1/2, 1]")


# ---------------------------------------------------------------------------
# the generating weight and the ingredients of g
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Tables:
    Q: int
    norm: float
    int_w: float
    m_inf: float
    C: np.ndarray  # C[q], q = 0..Q (C[0] unused)
    S: np.ndarray


@functools.lru_cache(maxsize=32)
def _tables(params: DeltaParams) -> _Tables:
    Q = params.Q
    s = params.seed_weight
    d = np.arange(math.ceil(Q * s.a), math.floor(Q * s.b) + 1)
    norm = float(np.sum(s(d / Q)))
    u, qw = _gl_nodes(s.a, s.b, 64)
    su = s(u)
    int_w = float(Q * np.sum(qw * su) / norm)
    m_inf = float(np.sum(qw * su / u) / norm)
    S = np.zeros(Q + 1)
    C = np.zeros(Q + 1)
    for q in range(1, Q + 1):
        r = np.arange(1, Q // q + 1)
        S[q] = float(np.sum(s(q * r / Q) / (q * r))) / norm
        C[q] = S[q] - m_inf / q
    return _Tables(Q, norm, int_w, m_inf, C, S)


def _w(params: DeltaParams, v, norm: float):
    return params.seed_weight(np.asarray(v, dtype=float) / params.Q) / norm


def _g2(params: DeltaParams, x):
    """``int w - (Q/|x|) sum_{k >= 1} w(kQ/|x|)``; terms live on ``|x|/2 <= k <= |x|``."""
    tb = _tables(params)
    ax = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    out = np.full(ax.shape, tb.int_w)
    if ax.size == 0:
        return out
    kmax = int(math.floor(ax.max()))
    acc = np.zeros(ax.shape)
    for k in range(1, kmax + 1):
        m = (ax >= k) & (ax <= 2 * k)
        if np.any(m):
            acc[m] += _w(params, k * params.Q / ax[m], tb.norm)
    live = ax > 0
    out[live] -= params.Q / ax[live] * acc[live]
    return out


def _rho_hat(params: DeltaParams, q: int, x):
    P = params.Q / (2 * q)
    x = np.asarray(x, dtype=float)
    sinc = (2 * P + 1) * np.sinc((2 * P + 1) * x)  # sin(pi(2P+1)x)/(pi x)
    return sinc * np.exp(-2 * (math.pi * params.rho_width * x) ** 2)


def _rho_extent(params: DeltaParams) -> float:
    """Beyond this ``|x|`` the Gaussian factor of ``rho^`` is below 1e-18."""
    return math.sqrt(math.log(1e18) / 2) / (math.pi * params.rho_width)


def g_weight(q: int, x, params: DeltaParams):
    """``g(q, x) = g_2(x) + qQ C_q rho_q^(x)`` (see the module docstring)."""
    if not 1 <= q <= params.Q:
        raise DomainError(f"q = {q} outside 1..{params.Q}")
    scalar = np.ndim(x) == 0
    tb = _tables(params)
    val = _g2(params, x) + q * params.Q * tb.C[q] * _rho_hat(params, q, np.atleast_1d(x))
    return float(val[0]) if scalar else val


def _window():
    return bump(-2.0, 2.0, (-1.0, 1.0))


# ---------------------------------------------------------------------------
# the expansion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Grid:
    x: np.ndarray
    weight: np.ndarray  # quadrature weight times W(x/X)
    g2: np.ndarray


@functools.lru_cache(maxsize=64)
def _grid(params: DeltaParams, lo: float, hi: float, panel: float) -> _Grid:
    panels = max(1, int(math.ceil((hi - lo) / panel)))
    x, qw = _gl_nodes(lo, hi, panels)
    W = _window()(x / params.x_cutoff)
    return _Grid(x, qw * W, _g2(params, x))


def _panel_width(params: DeltaParams, n: int, refine: int) -> float:
    freq = abs(n) / params.Q + 1.0
    return min(0.25, 0.5 / freq) / refine


def _q_integrals(n: int, params: DeltaParams, refine: int) -> np.ndarray:
    """``J_q(n) = (qQ)^{-1} int W(x/X) g(q,x) e(nx/(qQ)) dx`` for q = 1..Q."""
    Q = params.Q
    tb = _tables(params)
    X2 = 2 * params.x_cutoff
    h = _panel_width(params, n, refine)
    ga = _grid(params, 0.0, X2, h)
    xr = min(X2, _rho_extent(params))
    gb = _grid(params, 0.0, xr, min(h, 8.0 / (Q + 1) / refine))
    out = np.zeros(Q + 1)
    for q in range(1, Q + 1):
        k = 2 * math.pi * n / (q * Q)
        part2 = float(np.sum(ga.weight * ga.g2 * np.cos(k * ga.x)))
        out[q] = 2 * part2 / (q * Q)
        if tb.C[q] != 0.0:
            rho = _rho_hat(params, q, gb.x)
            out[q] += 2 * tb.C[q] * float(np.sum(gb.weight * rho * np.cos(k * gb.x)))
    return out


def _check_n(n: int, params: DeltaParams):
    if abs(n) > params.Q ** 2 / 2:
        raise DomainError(f"|n| = {abs(n)} exceeds Q^2/2 = {params.Q ** 2 / 2}; the identity does not hold there")


def delta_q_term(q: int, n: int, params: DeltaParams) -> float:
    """``J_q(n)`` by quadrature; it should equal :func:`delta_divisor_term`."""
    _check_n(n, params)
    return float(_q_integrals(n, params, 1)[q])


def delta_divisor_term(q: int, n: int, params: DeltaParams) -> float:
    """``Delta_q(n) = sum_r (qr)^{-1} [w(qr) - w(|n|/(qr))]`` summed directly."""
    tb = _tables(params)
    r = np.arange(1, 2 * params.Q + abs(n) + 2)
    qr = q * r
    terms = (_w(params, qr, tb.norm) - _w(params, abs(n) / qr, tb.norm)) / qr
    return float(np.sum(terms))


def _expansion_profile(n: int, params: DeltaParams, refine: int):
    J = _q_integrals(n, params, refine)
    c = np.array([0] + [ramanujan_sum(q, n) for q in range(1, params.Q + 1)], dtype=float)
    return np.cumsum(c[1:] * J[1:])


def delta_expansion(n: int, params: DeltaParams) -> float:
    """``(1/Q) sum_{q <= Q} q^{-1} c_q(n) int W(x/X) g(q,x) e(nx/(qQ)) dx``.

    The ``a``-sum is the Ramanujan sum (integers, checked by two routes).
    The ``x``-integral is taken over ``[0, 2X]`` using evenness, on a fixed
    panel grid and on one twice as fine; a disagreement beyond ``quad_tol``
    raises :class:`BudgetError`.
    """
    _check_n(n, params)
    coarse = _expansion_profile(n, params, 1)[-1]
    fine = _expansion_profile(n, params, 2)[-1]
    if abs(coarse - fine) > params.quad_tol:
        raise BudgetError("delta expansion quadrature did not settle", estimate=fine,
                          error=abs(coarse - fine))
    return float(fine)


def verify_delta(n_range, params: DeltaParams, tol: float = 1e-6) -> VerificationReport:
    """Sweep ``n`` over ``[lo, hi]``; report the max deviation from ``delta(n)``
    and, for the worst ``n``, the profile of partial sums over ``q``."""
    t0 = time.perf_counter()
    lo, hi = n_range
    ns = list(range(int(lo), int(hi) + 1))
    errors, worst, profile = {}, None, []
    for n in ns:
        val = delta_expansion(n, params)
        errors[n] = abs(val - (1.0 if n == 0 else 0.0))
        if worst is None or errors[n] > errors[worst]:
            worst = n
    if worst is not None:
        prof = _expansion_profile(worst, params, 2)
        profile = [float(abs(p - (1.0 if worst == 0 else 0.0))) for p in prof]
    max_err = max(errors.values()) if errors else 0.0
    return VerificationReport(
        name="verify_delta",
        passed=bool(max_err <= tol),
        residuals={"max_error": max_err, "worst_n": worst},
        tolerances={"max_error": tol},
        details={"Q": params.Q, "x_cutoff": params.x_cutoff, "n_range": [lo, hi],
                 "count": len(ns), "errors": {str(k): v for k, v in errors.items()},
                 "partial_sum_error_profile": profile},
        elapsed=time.perf_counter() - t0,
    )


def g_weight_properties(params: DeltaParams, samples: int = 201) -> VerificationReport:
    """Sampled constants for the size, decay and mean-square behaviour of ``g``.

    ``near_one``: ``max |g - 1|`` over ``q <= sqrt(Q)``, ``|x| <= 0.01``;
    ``decay_c``: ``max |g(q, x)| x^2`` over all ``q`` and ``|x| = 10``;
    ``l1_l2_c``: ``max_q int (|g| + |g|^2) dx / Q^{0.1}`` over the cutoff window.
    """
    t0 = time.perf_counter()
    Q = params.Q
    xs = np.linspace(-0.01, 0.01, samples)
    near = max(float(np.max(np.abs(g_weight(q, xs, params) - 1)))
               for q in range(1, int(math.isqrt(Q)) + 1))
    decay = max(abs(g_weight(q, 10.0, params)) * 100 for q in range(1, Q + 1))
    X2 = 2 * params.x_cutoff
    x, qw = _gl_nodes(-X2, X2, int(8 * X2 * (Q / 2 + 1) / 10) + 8)
    W = _window()(x / params.x_cutoff)
    l12 = 0.0
    for q in range(1, Q + 1):
        g = np.abs(g_weight(q, x, params))
        l12 = max(l12, float(np.sum(qw * W * (g + g * g))))
    return VerificationReport(
        name="g_weight_properties",
        passed=near <= 0.1,
        residuals={"near_one": near, "decay_c": decay, "l1_l2_c": l12 / Q ** 0.1},
        tolerances={"near_one": 0.1},
        details={"Q": Q, "x_cutoff": params.x_cutoff},
        elapsed=time.perf_counter() - t0,
    )
