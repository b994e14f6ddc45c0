"""Two-sided numerical check of the Voronoi formula for a Maass cusp form.

For ``(a, q) = 1`` and a smooth ``g`` with compact support in ``(0, inf)``

    sum_n lambda(n) e(an/q) g(n)
        = q sum_{+-} sum_n lambda(n)/n e(-+ abar n/q) G^{+-}(n/q^2).

``G^{+-}`` is available by two routes: a Bessel transform
``eps^{(1-+1)/2} y int g(z) J^{+-}(4 pi sqrt(yz)) dz`` with

    J^+(x) = -pi/sin(pi i t) (J_{2it}(x) - J_{-2it}(x)) = -2 pi Im J_{2it}(x) / sinh(pi t),
    J^-(x) = 4 cosh(pi t) K_{2it}(x),

and a Mellin-Barnes integral of the Mellin transform of ``g`` against a
ratio of Gamma functions.  The right side is summed through the Mellin
route, which gives ``G^{+-}`` at all ``n/q^2`` at once; its tail is
bounded by shifting the contour to the right.
"""

from __future__ import annotations

import functools
import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConsistencyError, CoverageError, DomainError, TruncationError
from .hecke import KIM_SARNAK_THETA, MaassFormData, _lambda_table, eigenvalue_error_budget, primes_up_to
from .report import VerificationReport
from .special_functions import bessel_j_imag_order, bessel_k_imag_order, log_gamma
from .weights import SmoothWeight, _gl_nodes

log = logging.getLogger(__name__)

__all__ = [
    "VoronoiInstance",
    "voronoi_lhs",
    "voronoi_g_transform",
    "voronoi_rhs",
    "RhsResult",
    "verify_voronoi",
    "kernel_plus",
    "kernel_minus",
    "mellin_tail_bound",
]

SIGNS = ("plus", "minus")
ROUTES = ("bessel", "mellin")


@dataclass(frozen=True)
class VoronoiInstance:
    """One side-by-side evaluation: form, additive twist ``a/q`` and weight ``g``.

    ``rhs_truncation=None`` and ``mellin_height=None`` are chosen
    automatically (certified tail below ``tail_target``; integrand of the
    Mellin-Barnes integrand negligible beyond ``mellin_height``).  ``epsilon`` is the parity
    sign attached to ``G^-``.
    """

    form: MaassFormData
    a: int
    q: int
    weight: SmoothWeight
    rhs_truncation: int | None = None
    mellin_height: float | None = None
    mellin_sigma: float = 0.5
    tail_target: float = 1e-8

    def __post_init__(self):
        if self.q < 1:
            raise DomainError("q must be >= 1")
        if math.gcd(self.a, self.q) != 1:
            raise DomainError(f"gcd(a, q) = gcd({self.a}, {self.q}) != 1")
        if not self.weight.a > 0:
            raise DomainError("weight support must lie in (0, inf)")
        if not self.mellin_sigma > KIM_SARNAK_THETA - 1:
            raise DomainError("mellin_sigma must exceed theta - 1")

    @property
    def t(self) -> float:
        return self.form.spectral_R

    @property
    def epsilon(self) -> int:
        return self.form.epsilon

    @property
    def a_bar(self) -> int:
        return pow(self.a, -1, self.q) if self.q > 1 else 0

    def shifted(self, **kw) -> "VoronoiInstance":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(kw)
        return VoronoiInstance(**d)


def _e(num: int, den: int) -> complex:
    """``e(num/den)`` with the fraction reduced mod 1 in integer arithmetic."""
    r = Fraction(num % den, den)
    ang = 2 * math.pi * float(r)
    return complex(math.cos(ang), math.sin(ang))


def _e_array(num: np.ndarray, den: int) -> np.ndarray:
    r = np.mod(num, den).astype(float) / den
    return np.exp(2j * math.pi * r)


# ---------------------------------------------------------------------------
# left side
# ---------------------------------------------------------------------------


def _weight_is_zero(inst: VoronoiInstance) -> bool:
    w = inst.weight
    return not np.any(w(np.linspace(w.a, w.b, 1025)))


def _covered(form: MaassFormData, n: int):
    lim = form.covered_limit()
    if n > lim:
        missing = next(p for p in primes_up_to(n) if p > lim)
        raise CoverageError(missing)


def voronoi_lhs(inst: VoronoiInstance) -> complex:
    """``sum_n lambda(n) e(an/q) g(n)`` over the integers in the support of ``g``."""
    if _weight_is_zero(inst):
        return 0j
    lo = max(1, math.ceil(inst.weight.a))
    hi = math.floor(inst.weight.b)
    if hi < lo:
        return 0j
    _covered(inst.form, hi)
    n = np.arange(lo, hi + 1)
    lam = _lambda_table(inst.form, hi)[lo:]
    return complex(np.sum(lam * _e_array(inst.a * n, inst.q) * inst.weight(n)))


# ---------------------------------------------------------------------------
# kernels and the Bessel route
# ---------------------------------------------------------------------------


def kernel_plus(t: float, x) -> np.ndarray:
    """``J^+(x) = -2 pi Im J_{2it}(x) / sinh(pi t)``, evaluated from the scaled ``J``."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    js = np.array([bessel_j_imag_order(t, float(v), scaled=True).imag for v in xs])
    # Im J / sinh(pi t) = Im(e^{-pi t} J) * 2 / (1 - e^{-2 pi t})
    return -2 * math.pi * js * 2 / (1 - math.exp(-2 * math.pi * t))


def kernel_minus(t: float, x) -> np.ndarray:
    """``J^-(x) = 4 cosh(pi t) K_{2it}(x)`` via the scaled ``K``."""
    return 4 * np.atleast_1d(bessel_k_imag_order(t, np.asarray(x, dtype=float), scaled=True))


def _bessel_route(inst: VoronoiInstance, y: float, sign: str, panels: int | None = None) -> float:
    a, b = inst.weight.support
    t = inst.t
    if panels is None:
        # the kernel argument 4 pi sqrt(yz) sweeps this many radians over the support
        sweep = 4 * math.pi * math.sqrt(y) * (math.sqrt(b) - math.sqrt(a))
        panels = 16 + int(sweep / math.pi)
    z, qw = _gl_nodes(a, b, panels)
    g = inst.weight(z)
    live = g != 0
    x = 4 * math.pi * np.sqrt(y * z[live])
    if sign == "plus":
        k = kernel_plus(t, x)
        pre = 1.0
    else:
        k = kernel_minus(t, x)
        pre = inst.epsilon
    return float(pre * y * np.sum(qw[live] * g[live] * k))


# ---------------------------------------------------------------------------
# Mellin route
# ---------------------------------------------------------------------------


def _gamma_ratio_pair(t: float, s: np.ndarray):
    """The two Gamma quotients of the Mellin-Barnes integrand, as arrays."""
    it = 1j * t
    r1 = (log_gamma((1 + s + it) / 2) + log_gamma((1 + s - it) / 2)
          - log_gamma((-s + it) / 2) - log_gamma((-s - it) / 2))
    r2 = (log_gamma((2 + s + it) / 2) + log_gamma((2 + s - it) / 2)
          - log_gamma((1 - s + it) / 2) - log_gamma((1 - s - it) / 2))
    return np.exp(r1), np.exp(r2)


def _mellin_g(w: SmoothWeight, s: np.ndarray, chunk: int = 512) -> np.ndarray:
    """``g~(s) = int g(z) z^{s-1} dz`` for many ``s`` on one fixed log-grid."""
    la, lb = math.log(w.a), math.log(w.b)
    tmax = float(np.abs(s.imag).max())
    panels = max(32, int(tmax * (lb - la) / (2 * math.pi)) + 32)
    u, qw = _gl_nodes(la, lb, panels)
    wu = w(np.exp(u)) * qw
    out = np.empty(s.size, dtype=complex)
    for i in range(0, s.size, chunk):
        out[i:i + chunk] = np.exp(np.outer(s[i:i + chunk], u)) @ wu
    return out


@dataclass
class _MellinTable:
    sigma: float
    tau: np.ndarray
    qw: np.ndarray
    F: dict  # sign -> R^{+-}(s) g~(-s) on the grid (tau >= 0)
    height: float


def _integrand(inst: VoronoiInstance, sigma: float, tau: np.ndarray) -> dict:
    s = sigma + 1j * tau
    r1, r2 = _gamma_ratio_pair(inst.t, s)
    gt = _mellin_g(inst.weight, -s)
    return {"plus": (r1 - r2) * gt, "minus": (r1 + r2) * gt}


@functools.lru_cache(maxsize=16)
def _weight_derivative_table(w: SmoothWeight, kmax: int):
    z, qw = _gl_nodes(w.a, w.b, 256)
    return z, qw, np.abs(w.derivs(z, kmax))


def _mellin_abs_bound(w: SmoothWeight, c: float, tau: np.ndarray, kmax: int = 30) -> np.ndarray:
    """Upper bound for ``|g~(-c - i tau)|`` from ``k``-fold integration by parts.

    ``g~(s) = (-1)^k / (s (s+1) ... (s+k-1)) int g^{(k)}(z) z^{s+k-1} dz``,
    so ``|g~(s)| <= int |g^{(k)}| z^{Re s + k - 1} dz / prod_j |s + j|``;
    the minimum over ``k <= kmax`` is returned.
    """
    kmax = min(kmax, w.max_order)
    z, qw, d = _weight_derivative_table(w, kmax)
    best = np.full(tau.shape, np.inf)
    logden = np.zeros(tau.shape)
    with np.errstate(divide="ignore"):
        for k in range(kmax + 1):
            Ik = float(np.sum(qw * d[k] * z ** (-c + k - 1)))
            best = np.minimum(best, Ik * np.exp(-logden))
            logden = logden + 0.5 * np.log((k - c) ** 2 + tau ** 2)
    return best


_TAU_PROBE = np.concatenate([np.linspace(0, 10, 201)[:-1], np.geomspace(10, 1e7, 4000)])


def _majorant(t: float, w: SmoothWeight, c: float, tau: np.ndarray = _TAU_PROBE) -> np.ndarray:
    """``(|R_1| + |R_2|)(c + i tau)`` times the bound on ``|g~(-c - i tau)|``."""
    r1, r2 = _gamma_ratio_pair(t, c + 1j * tau)
    return (np.abs(r1) + np.abs(r2)) * _mellin_abs_bound(w, c, tau)


def _auto_height(inst: VoronoiInstance, sigma: float, rel: float = 1e-12) -> float:
    """Height beyond which the majorant of the Mellin-Barnes integrand, integrated
    to infinity, is below ``rel`` times the integral of the computed integrand."""
    f = _majorant(inst.t, inst.weight, sigma)
    tail = np.concatenate([np.cumsum((0.5 * (f[1:] + f[:-1]) * np.diff(_TAU_PROBE))[::-1])[::-1], [0.0]])
    probe = np.linspace(0, 200, 801)
    F = _integrand(inst, sigma, probe)
    scale = float(np.trapezoid(np.abs(F["plus"]) + np.abs(F["minus"]), probe))
    if scale == 0:
        return 0.0
    ok = np.flatnonzero(tail <= rel * scale)
    if ok.size == 0:
        raise TruncationError("Mellin-Barnes integrand majorant is not integrable on the probe grid")
    return float(_TAU_PROBE[ok[0]])


def _mellin_table(inst: VoronoiInstance, y_max: float) -> _MellinTable:
    sigma = inst.mellin_sigma
    H = inst.mellin_height if inst.mellin_height is not None else _auto_height(inst, sigma)
    # y levels share a grid when they fall in the same power of two
    ybin = max(0, math.ceil(math.log2(max(y_max, 1.0))))
    return _mellin_table_cached(inst.t, inst.weight, sigma, H, ybin)


@functools.lru_cache(maxsize=8)
def _mellin_table_cached(t: float, w: SmoothWeight, sigma: float, H: float, ybin: int) -> _MellinTable:
    # phase speed in tau: |log(pi^2 y)| + log z + 2 log(tau/2) from the Gamma quotient
    omega = abs(math.log(math.pi ** 2 * 2.0 ** ybin)) + abs(math.log(w.b)) \
        + 2 * abs(math.log(max(H, 2.0) / 2)) + 4
    width = min(1.0, 6 * math.pi / omega)  # about three oscillations per panel
    panels = max(16, int(math.ceil(H / width)))
    tau, qw = _gl_nodes(0.0, H, panels)
    s = sigma + 1j * tau
    r1, r2 = _gamma_ratio_pair(t, s)
    gt = _mellin_g(w, -s)
    return _MellinTable(sigma, tau, qw, {"plus": (r1 - r2) * gt, "minus": (r1 + r2) * gt}, H)


def _mellin_eval(table: _MellinTable, y: np.ndarray, sign: str, epsilon: int,
                 chunk: int = 256) -> np.ndarray:
    """``G^{+-}(y) = eps/(4 pi^2) int (pi^2 y)^{-s} R g~(-s) dtau`` using conjugate symmetry."""
    pre = (1.0 if sign == "plus" else epsilon) / (4 * math.pi ** 2)
    F = table.F[sign] * table.qw
    out = np.empty(y.size)
    ly = np.log(math.pi ** 2 * y)
    for i in range(0, y.size, chunk):
        L = ly[i:i + chunk, None]
        kern = np.exp(-(table.sigma + 1j * table.tau[None, :]) * L)
        out[i:i + chunk] = 2 * pre * (kern @ F).real
    return out


def voronoi_g_transform(inst: VoronoiInstance, y: float, sign: str, route: str) -> complex:
    """``G^{+-}(y)`` by the Bessel transform or by the Mellin-Barnes integral."""
    if sign not in SIGNS or route not in ROUTES:
        raise DomainError(f"sign must be in {SIGNS}, route in {ROUTES}")
    if not y > 0:
        raise DomainError("y must be positive")
    if _weight_is_zero(inst):
        return 0j
    if route == "bessel":
        return complex(_bessel_route(inst, y, sign))
    table = _mellin_table(inst, y)
    return complex(_mellin_eval(table, np.array([float(y)]), sign, inst.epsilon)[0])


# ---------------------------------------------------------------------------
# right side and its tail
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=16)
def _tail_constants(t: float, w: SmoothWeight, sigmas=(2, 3, 4, 5, 6, 8)) -> tuple:
    """``(c, M(c))`` pairs with ``|G^{+-}(y)| <= M(c) (pi^2 y)^{-c}``."""
    out = []
    for c in sigmas:
        if c <= 0.5 + KIM_SARNAK_THETA:
            continue
        f = _majorant(t, w, c)
        total = float(np.trapezoid(f, _TAU_PROBE))
        if not np.isfinite(total) or f[-1] * _TAU_PROBE[-1] > 1e-3 * total:
            continue  # not integrable with the available derivatives
        out.append((c, 2 * total / (4 * math.pi ** 2)))
    return tuple(out)


def mellin_tail_bound(inst: VoronoiInstance, N: int) -> tuple:
    """Bound on ``q sum_{n > N} |lambda(n)|/n (|G^+| + |G^-|)(n/q^2)``.

    On ``Re s = c`` one has ``|G^{+-}(y)| <= M(c) (pi^2 y)^{-c}`` with
    ``M(c) = (2/4 pi^2) int_0^inf (|R_1| + |R_2|) |g~(-s)| dtau``, where
    ``|g~|`` is replaced by its integration-by-parts bound.  With
    ``|lambda(n)| <= d(n) n^theta <= 2 n^{1/2 + theta}`` the tail is at most
    ``2 q M(c) (pi^2/q^2)^{-c} 2 N^{1/2+theta-c} / (c - 1/2 - theta)`` (the
    leading 2 counts both signs).  Returns ``(bound, c)`` for the best ``c``.
    """
    theta = KIM_SARNAK_THETA
    best = (math.inf, None)
    for c, M in _tail_constants(inst.t, inst.weight):
        expo = 0.5 + theta - c
        bound = 2 * inst.q * M * (math.pi ** 2 / inst.q ** 2) ** (-c) * 2 * N ** expo / (c - 0.5 - theta)
        if bound < best[0]:
            best = (bound, c)
    return best


@dataclass
class RhsResult:
    value: complex
    truncation: int
    tail_bound: float
    tail_sigma: float | None
    terms_plus: np.ndarray = field(repr=False, default=None)
    terms_minus: np.ndarray = field(repr=False, default=None)


def _choose_truncation(inst: VoronoiInstance) -> tuple:
    lim = inst.form.covered_limit()
    N = 64
    while True:
        bound, c = mellin_tail_bound(inst, N)
        if bound <= inst.tail_target:
            return N, bound, c
        if N >= lim:
            raise TruncationError(
                f"tail bound {bound:.3g} at N = {N} (eigenvalue coverage limit) exceeds "
                f"the target {inst.tail_target:.3g}")
        N = min(2 * N, lim)


def voronoi_rhs_detail(inst: VoronoiInstance) -> RhsResult:
    if _weight_is_zero(inst):
        return RhsResult(0j, 0, 0.0, None)
    if inst.rhs_truncation is None:
        N, bound, c = _choose_truncation(inst)
    else:
        N = int(inst.rhs_truncation)
        bound, c = mellin_tail_bound(inst, N)
    _covered(inst.form, N)
    n = np.arange(1, N + 1)
    y = n / inst.q ** 2
    table = _mellin_table(inst, float(y.max()))
    Gp = _mellin_eval(table, y, "plus", inst.epsilon)
    Gm = _mellin_eval(table, y, "minus", inst.epsilon)
    lam = _lambda_table(inst.form, N)[1:]
    ab = inst.a_bar
    tp = lam / n * _e_array(-ab * n, inst.q) * Gp
    tm = lam / n * _e_array(ab * n, inst.q) * Gm
    value = complex(inst.q * (tp.sum() + tm.sum()))
    return RhsResult(value, N, bound, c, inst.q * tp, inst.q * tm)


def voronoi_rhs(inst: VoronoiInstance) -> complex:
    """``q sum_{+-} sum_{n <= N} lambda(n)/n e(-+ abar n/q) G^{+-}(n/q^2)``."""
    return voronoi_rhs_detail(inst).value


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def _route_check(inst: VoronoiInstance, ys) -> dict:
    worst = 0.0
    rows = []
    for y in ys:
        for sg in SIGNS:
            b = voronoi_g_transform(inst, y, sg, "bessel").real
            m = voronoi_g_transform(inst, y, sg, "mellin").real
            scale = max(abs(b), abs(m))
            rel = abs(b - m) / scale if scale > 1e-300 else 0.0
            # values far below the overall size of G are compared absolutely
            rel = min(rel, abs(b - m) / 1e-8) if scale < 1e-8 else rel
            worst = max(worst, rel)
            rows.append({"y": y, "sign": sg, "bessel": b, "mellin": m, "rel": rel})
    return {"max_rel": worst, "rows": rows}


def verify_voronoi(inst: VoronoiInstance, tol: float = 1e-4, route_ys=None,
                   route_tol: float = 1e-4) -> VerificationReport:
    """Both sides, their relative residual, the tail certificate and a route cross-check."""
    t0 = time.perf_counter()
    lhs = voronoi_lhs(inst)
    rhs = voronoi_rhs_detail(inst)
    resid = abs(lhs - rhs.value) / (1 + abs(lhs) + abs(rhs.value))
    hi = math.floor(inst.weight.b)
    budget = float(np.sum(eigenvalue_error_budget(inst.form, hi))) if hi >= 1 else 0.0
    routes = _route_check(inst, route_ys) if route_ys is not None else None
    passed = resid <= tol and rhs.tail_bound <= inst.tail_target
    residuals = {"relative_residual": resid, "tail_bound": rhs.tail_bound}
    tolerances = {"relative_residual": tol, "tail_bound": inst.tail_target}
    if routes is not None:
        residuals["route_max_rel"] = routes["max_rel"]
        tolerances["route_max_rel"] = route_tol
        passed = passed and routes["max_rel"] <= route_tol
    return VerificationReport(
        name="verify_voronoi",
        passed=bool(passed),
        residuals=residuals,
        tolerances=tolerances,
        details={"a": inst.a, "q": inst.q, "a_bar": inst.a_bar,
                 "support": list(inst.weight.support), "lhs": lhs, "rhs": rhs.value,
                 "truncation": rhs.truncation, "tail_sigma": rhs.tail_sigma,
                 "eigenvalue_error_budget": budget,
                 "routes": routes["rows"] if routes else None},
        elapsed=time.perf_counter() - t0,
    )
