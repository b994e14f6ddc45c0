"""Compactly supported smooth weights with exact derivative oracles.

Weights are built from the mollifier ``psi(u) = exp(-1/(1-u^2))`` on
``(-1, 1)``.  Derivatives are propagated with truncated Taylor series
(jets), so ``w^{(j)}(x)`` is available to any order without finite
differences.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BudgetError, DomainError
from .report import VerificationReport

log = logging.getLogger(__name__)

__all__ = [
    "SmoothWeight",
    "DyadicPartition",
    "bump",
    "zero_weight",
    "smooth_step",
    "dyadic_partition",
    "mellin",
    "check_inert",
    "jet_mul",
    "jet_exp",
    "jet_reciprocal",
    "taylor_to_derivs",
]

DEFAULT_MAX_ORDER = 40


# ---------------------------------------------------------------------------
# truncated Taylor series; axis 0 holds normalised coefficients f^{(k)}/k!
# ---------------------------------------------------------------------------


def jet_mul(a, b):
    n = a.shape[0]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
    for k in range(n):
        out[k] = np.einsum("i...,i...->...", a[:k + 1], b[k::-1])
    return out


def jet_exp(f):
    n = f.shape[0]
    e = np.zeros_like(f)
    e[0] = np.exp(f[0])
    for k in range(1, n):
        j = np.arange(1, k + 1).reshape((-1,) + (1,) * (f.ndim - 1))
        e[k] = np.sum(j * f[1:k + 1] * e[k - 1::-1][:k], axis=0) / k
    return e


def jet_reciprocal(f):
    n = f.shape[0]
    r = np.zeros_like(f)
    r[0] = 1 / f[0]
    for k in range(1, n):
        r[k] = -np.sum(f[1:k + 1] * r[k - 1::-1][:k], axis=0) / f[0]
    return r


def taylor_to_derivs(c):
    fact = np.array([math.factorial(k) for k in range(c.shape[0])], dtype=float)
    return c * fact.reshape((-1,) + (1,) * (c.ndim - 1))


def _affine_jet(x, slope, intercept, order):
    """Jet of u = slope*x + intercept at the points x."""
    c = np.zeros((order + 1,) + x.shape)
    c[0] = slope * x + intercept
    if order >= 1:
        c[1] = slope
    return c


def _mollifier_jet(u, order):
    """Taylor coefficients of psi(u(x)) = exp(-1/(1-u^2)) given the jet of u.

    Points with 1 - u^2 below 0.002 (where psi < e^{-500}) get a zero jet.
    """
    one_minus = -jet_mul(u, u)
    one_minus[0] += 1
    live = one_minus[0] > 2e-3
    out = np.zeros_like(u)
    if np.any(live):
        om = one_minus[:, live]
        out[:, live] = jet_exp(-jet_reciprocal(om))
    return out


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

JetFn = Callable[[np.ndarray, int], np.ndarray]


@dataclass(frozen=True)
class SmoothWeight:
    """Smooth weight supported in ``[a, b]`` with exact derivatives.

    ``jet(x, order)`` returns normalised Taylor coefficients with shape
    ``(order+1, len(x))``; it is only called on points inside the support.
    """

    support: tuple
    jet: JetFn
    inert_scale: float = 1.0
    max_order: int = DEFAULT_MAX_ORDER
    label: str = "weight"

    def __post_init__(self):
        a, b = self.support
        if not a < b:
            raise DomainError(f"degenerate support {self.support}")

    @property
    def a(self):
        return self.support[0]

    @property
    def b(self):
        return self.support[1]

    def derivs(self, x, order: int) -> np.ndarray:
        """Array of w^{(k)}(x) for k = 0..order, shape (order+1, len(x))."""
        if order > self.max_order:
            raise DomainError(f"order {order} exceeds max_order {self.max_order}")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros((order + 1, x.size))
        inside = (x > self.a) & (x < self.b)
        if np.any(inside):
            out[:, inside] = taylor_to_derivs(self.jet(x[inside], order))
        return out

    def deriv(self, j: int, x):
        scalar = np.ndim(x) == 0
        d = self.derivs(x, j)[j]
        return float(d[0]) if scalar else d

    def __call__(self, x):
        return self.deriv(0, x)

    def eval(self, x):
        return self(x)

    # -- derived weights -------------------------------------------------------

    def scaled(self, c: float) -> "SmoothWeight":
        f = self.jet
        return SmoothWeight(self.support, lambda x, n: c * f(x, n), self.inert_scale, self.max_order,
                            f"{c:g}*{self.label}")

    def dilate(self, s: float) -> "SmoothWeight":
        """x -> w(x / s), supported in [s a, s b]."""
        if s <= 0:
            raise DomainError("dilation factor must be positive")
        f = self.jet
        scale = float(s) ** -np.arange(self.max_order + 1.0)

        def jet(x, n):
            return f(x / s, n) * scale[:n + 1, None]

        return SmoothWeight((s * self.a, s * self.b), jet, self.inert_scale, self.max_order,
                            f"{self.label}(x/{s:g})")

    def __mul__(self, other: "SmoothWeight") -> "SmoothWeight":
        lo, hi = max(self.a, other.a), min(self.b, other.b)
        if not lo < hi:
            raise DomainError("product of weights with disjoint supports")
        f, g = self.jet, other.jet
        return SmoothWeight((lo, hi), lambda x, n: jet_mul(f(x, n), g(x, n)),
                            max(self.inert_scale, other.inert_scale),
                            min(self.max_order, other.max_order), f"{self.label}*{other.label}")

    def integral(self, n: int = 400) -> float:
        """int w by composite Gauss-Legendre."""
        return float(_gl_integrate(self, lambda z: np.ones_like(z), n))

    def normalized(self) -> "SmoothWeight":
        """Same shape rescaled to unit integral."""
        return self.scaled(1.0 / self.integral())


def _gl_nodes(lo, hi, panels, deg=20):
    x, w = np.polynomial.legendre.leggauss(deg)
    edges = np.linspace(lo, hi, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    return (mid + half * x).ravel(), (half * w).ravel()


def _gl_integrate(w: SmoothWeight, kernel, panels):
    z, q = _gl_nodes(w.a, w.b, panels)
    return np.sum(q * w(z) * kernel(z))


def smooth_step(t):
    """0 for t <= 0, 1 for t >= 1, psi(1-t) / (psi(1-t) + psi(t)) in between."""
    t = np.asarray(t, dtype=float)
    return _step_jet(t[None, :] if t.ndim else t.reshape(1, 1), 0)[0].reshape(t.shape)


def _step_jet(tj, order):
    """Jet of S(t(x)) given the (order+1, n) jet of t."""
    n = tj.shape[1]
    out = np.zeros((order + 1, n))
    t0 = tj[0]
    out[0, t0 >= 1] = 1.0
    mid = (t0 > 0) & (t0 < 1)
    if np.any(mid):
        t = tj[:, mid]
        left = _mollifier_jet(-t + _unit(order, t.shape[1]), order)  # psi(1 - t)
        right = _mollifier_jet(t, order)  # psi(t)
        out[:, mid] = jet_mul(left, jet_reciprocal(left + right))
    return out


def _unit(order, n):
    e = np.zeros((order + 1, n))
    e[0] = 1.0
    return e


def bump(a: float, b: float, plateau=None, max_order: int = DEFAULT_MAX_ORDER,
         power: int = 1) -> SmoothWeight:
    """Smooth weight supported in [a, b].

    With ``plateau=(c, d)``, ``a < c < d < b``, the weight is identically 1
    on ``[c, d]`` and rises/falls through smooth steps on ``[a, c]`` and
    ``[d, b]``.  Without a plateau it is the rescaled mollifier
    ``(e * psi((2x - a - b)/(b - a)))^power``, which has maximum 1 at the
    midpoint; larger powers trade a narrower profile for faster decay of
    the Fourier and Mellin transforms.
    """
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    if int(power) != power or power < 1:
        raise DomainError("power must be a positive integer")
    if plateau is None:
        slope, icpt = 2 / (b - a), -(a + b) / (b - a)

        def jet(x, n):
            u = _affine_jet(x, slope, icpt, n)
            if power == 1:
                return math.e * _mollifier_jet(u, n)
            # (e psi)^k = exp(k (1 - 1/(1-u^2)))
            one_minus = -jet_mul(u, u)
            one_minus[0] += 1
            out = np.zeros_like(u)
            live = one_minus[0] > 2e-3 * power
            if np.any(live):
                e = -power * jet_reciprocal(one_minus[:, live])
                e[0] += power
                out[:, live] = jet_exp(e)
            return out

        label = f"bump({a:g},{b:g})" if power == 1 else f"bump({a:g},{b:g})^{power}"
        return SmoothWeight((a, b), jet, 1.0, max_order, label)
    if power != 1:
        raise DomainError("power applies to plateau-free bumps only")
    c, d = plateau
    if not (a < c < d < b):
        raise DomainError(f"plateau {plateau} must satisfy a < c < d < b")

    def jet(x, n):
        up = _step_jet(_affine_jet(x, 1 / (c - a), -a / (c - a), n), n)
        down = _step_jet(_affine_jet(x, -1 / (b - d), b / (b - d), n), n)
        return jet_mul(up, down)

    return SmoothWeight((a, b), jet, 1.0, max_order, f"bump({a:g},{b:g},[{c:g},{d:g}])")


def zero_weight(a: float, b: float) -> SmoothWeight:
    """The identically zero weight, nominally supported in [a, b]."""
    return SmoothWeight((a, b), lambda x, n: np.zeros((n + 1, x.size)), 1.0, DEFAULT_MAX_ORDER,
                        f"zero({a:g},{b:g})")


def _descending_step(x0, x1, max_order=DEFAULT_MAX_ORDER):
    """Jet function of F with F = 1 for x <= x0 and F = 0 for x >= x1."""

    def jet(x, n):
        return _step_jet(_affine_jet(x, -1 / (x1 - x0), x1 / (x1 - x0), n), n)

    return jet


@dataclass(frozen=True)
class DyadicPartition:
    """Smooth partition of unity on [lo, hi]; piece k is F(x/2^{k+1}) - F(x/2^k)."""

    pieces: tuple
    range: tuple
    scales: tuple

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return sum(p(x) for p in self.pieces)


def dyadic_partition(lo: float, hi: float) -> DyadicPartition:
    """Pieces supported in [2^k, 2^{k+2}] summing to 1 on [lo, hi].

    F is a smooth step equal to 1 on (0, 1] and 0 on [2, inf); the pieces
    ``F(x/2^{k+1}) - F(x/2^k)`` telescope.
    """
    if not 0 < lo < hi:
        raise DomainError(f"need 0 < lo < hi, got {lo}, {hi}")
    k0 = math.floor(math.log2(lo)) - 1
    k1 = math.ceil(math.log2(hi)) - 1
    F = _descending_step(1.0, 2.0)
    pieces = []
    for k in range(k0, k1 + 1):
        c = 2.0 ** k

        def jet(x, n, c=c):
            big = F(x / (2 * c), n) * (2 * c) ** -np.arange(n + 1)[:, None]
            small = F(x / c, n) * c ** -np.arange(n + 1)[:, None]
            return big - small

        pieces.append(SmoothWeight((c, 4 * c), jet, 1.0, DEFAULT_MAX_ORDER, f"dyadic[{c:g}]"))
    return DyadicPartition(tuple(pieces), (lo, hi), tuple(2.0 ** k for k in range(k0, k1 + 1)))


# ---------------------------------------------------------------------------
# Mellin transform
# ---------------------------------------------------------------------------


def mellin(w: SmoothWeight, s, tol: float = 1e-12, max_panels: int = 1 << 14):
    """int_0^inf w(z) z^{s-1} dz for scalar or array ``s``.

    Computed as int w(e^u) e^{us} du over log-support with composite
    Gauss-Legendre; the panel count is doubled until two successive
    estimates agree to ``tol`` (relative to int |w| z^{Re s - 1}).
    """
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    la, lb = math.log(w.a), math.log(w.b)
    freq = float(np.abs(s.imag).max()) * (lb - la) / (2 * math.pi)
    panels = max(8, int(2 * freq) + 8)
    prev = None
    while panels <= max_panels:
        u, q = _gl_nodes(la, lb, panels)
        wu = w(np.exp(u)) * q
        val = np.exp(np.outer(s, u)) @ wu
        if prev is not None:
            scale = np.abs(np.exp(np.outer(s.real, u)) @ np.abs(wu)) + 1e-300
            err = np.abs(val - prev) / scale
            if np.all(err <= tol):
                return complex(val[0]) if scalar else val
        prev = val
        panels *= 2
    raise BudgetError("Mellin quadrature did not converge", estimate=prev, error=float(err.max()))


# ---------------------------------------------------------------------------
# inertness
# ---------------------------------------------------------------------------


def check_inert(w: SmoothWeight, X: float, jmax: int, samples: int = 4001) -> VerificationReport:
    """Sample ``c_j = sup |x^j w^{(j)}(x)| / X^j`` over the support for j <= jmax."""
    t0 = time.perf_counter()
    if jmax > w.max_order:
        raise DomainError(f"jmax {jmax} exceeds max_order {w.max_order}")
    x = np.linspace(w.a, w.b, samples)
    d = w.derivs(x, jmax)
    consts = [float(np.max(np.abs(x ** j * d[j])) / X ** j) for j in range(jmax + 1)]
    return VerificationReport(
        name="check_inert",
        passed=bool(np.all(np.isfinite(consts))),
        residuals={f"c_{j}": c for j, c in enumerate(consts)},
        tolerances={},
        details={"X": X, "jmax": jmax, "support": list(w.support), "samples": samples},
        elapsed=time.perf_counter() - t0,
    )
