"""Exact rational bookkeeping of power-of-T bounds and their minimax balancing.

A bound such as ``N/K + T N^{1/2}/K^{3/2}`` is a :class:`BoundExpr`: a
finite set of :class:`ExpMonomial` terms, read as the pointwise maximum of
their exponents once everything is expressed as a power of ``T``.
Exponents are :class:`AffineForm` values, i.e. ``c + sum_i a_i * p_i`` with
rational ``c, a_i`` over named parameters such as ``nu`` and ``kappa``.
No floating point is used anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

__all__ = [
    "AffineForm",
    "ExpMonomial",
    "BoundExpr",
    "MinimaxResult",
    "SYMBOLS",
    "proposition_terms",
    "substitute",
    "minimax_kappa",
    "cancellation_window",
    "dominated_terms",
    "theorem1_terms",
    "theorem1_bound",
    "theorem2_terms",
    "theorem2_bound",
    "theorem2_regime_formulas",
    "crossover_nu",
    "parse_fraction",
]

SYMBOLS = ("T", "K", "N", "X", "C", "B", "D")
KAPPA = "kappa"
NU = "nu"


def parse_fraction(s) -> Fraction:
    """Fraction from an int, Fraction or a ``"p/q"`` / decimal string."""
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s.strip())
    raise TypeError(f"cannot read {s!r} as an exact rational")


# ---------------------------------------------------------------------------
# affine forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineForm:
    """``const + sum coeffs[p] * p`` with exact rational entries."""

    const: Fraction = Fraction(0)
    coeffs: tuple = ()  # sorted (name, Fraction) pairs with nonzero coefficient

    @staticmethod
    def of(const=0, **coeffs) -> "AffineForm":
        items = tuple(sorted((k, parse_fraction(v)) for k, v in coeffs.items() if parse_fraction(v) != 0))
        return AffineForm(parse_fraction(const), items)

    @staticmethod
    def lift(x) -> "AffineForm":
        return x if isinstance(x, AffineForm) else AffineForm(parse_fraction(x))

    def coeff(self, name: str) -> Fraction:
        return dict(self.coeffs).get(name, Fraction(0))

    @property
    def params(self) -> tuple:
        return tuple(k for k, _ in self.coeffs)

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def _combine(self, other, sign):
        other = AffineForm.lift(other)
        d = dict(self.coeffs)
        for k, v in other.coeffs:
            d[k] = d.get(k, Fraction(0)) + sign * v
        return AffineForm(self.const + sign * other.const,
                          tuple(sorted((k, v) for k, v in d.items() if v != 0)))

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return AffineForm.lift(other)._combine(self, -1)

    def __neg__(self):
        return AffineForm(-self.const, tuple((k, -v) for k, v in self.coeffs))

    def __mul__(self, other):
        other = AffineForm.lift(other)
        if other.is_constant:
            c = other.const
            return AffineForm(self.const * c, tuple((k, v * c) for k, v in self.coeffs if v * c != 0))
        if self.is_constant:
            return other * self
        raise ValueError("product of two non-constant affine forms is not affine")

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = AffineForm.lift(other)
        if not other.is_constant or other.const == 0:
            raise ValueError("can only divide an affine form by a nonzero constant")
        return self * (1 / other.const)

    def subs(self, **values) -> "AffineForm":
        """Replace parameters by rationals or other affine forms."""
        out = AffineForm(self.const)
        for k, v in self.coeffs:
            out = out + (AffineForm.lift(values[k]) * v if k in values else AffineForm.of(0, **{k: v}))
        return out

    def value(self, **values) -> Fraction:
        f = self.subs(**values)
        if not f.is_constant:
            raise ValueError(f"unbound parameters {f.params}")
        return f.const

    def __str__(self):
        parts = []
        if self.const != 0 or not self.coeffs:
            parts.append(str(self.const))
        for k, v in self.coeffs:
            mag = abs(v)
            term = k if mag == 1 else f"{mag}*{k}"
            parts.append(("- " if v < 0 else "+ ") + term if parts else ("-" if v < 0 else "") + term)
        return " ".join(parts)


# ---------------------------------------------------------------------------
# monomials and bounds
# ---------------------------------------------------------------------------


def _clean(exps: Mapping) -> tuple:
    out = []
    for s, e in exps.items():
        e = AffineForm.lift(e)
        if e != AffineForm():
            out.append((s, e))
    return tuple(sorted(out))


@dataclass(frozen=True)
class ExpMonomial:
    """``prod_s s^{e_s}`` over the formal symbols, with affine exponents."""

    exponents: tuple = ()

    @staticmethod
    def of(**exps) -> "ExpMonomial":
        for s in exps:
            if s not in SYMBOLS:
                raise ValueError(f"unknown symbol {s!r}")
        return ExpMonomial(_clean(exps))

    def exp(self, symbol: str) -> AffineForm:
        return dict(self.exponents).get(symbol, AffineForm())

    def __mul__(self, other: "ExpMonomial") -> "ExpMonomial":
        d = dict(self.exponents)
        for s, e in other.exponents:
            d[s] = d.get(s, AffineForm()) + e
        return ExpMonomial(_clean(d))

    def __pow__(self, k) -> "ExpMonomial":
        k = AffineForm.lift(k)
        return ExpMonomial(_clean({s: e * k for s, e in self.exponents}))

    def __truediv__(self, other: "ExpMonomial") -> "ExpMonomial":
        return self * other ** -1

    def substitute(self, symbol: str, replacement: "ExpMonomial") -> "ExpMonomial":
        """Replace ``symbol`` by ``replacement``: ``symbol^e -> replacement^e``."""
        e = self.exp(symbol)
        rest = ExpMonomial(tuple((s, v) for s, v in self.exponents if s != symbol))
        if e == AffineForm():
            return rest
        return rest * replacement ** e

    def __str__(self):
        if not self.exponents:
            return "1"
        return " ".join(f"{s}^({e})" for s, e in self.exponents)


@dataclass(frozen=True)
class BoundExpr:
    """Maximum of finitely many monomials; order-preserving and deduplicated."""

    terms: tuple
    labels: tuple = field(default=(), compare=False)

    def __post_init__(self):
        seen, terms, labels = set(), [], []
        lab = list(self.labels) + [""] * (len(self.terms) - len(self.labels))
        for t, l in zip(self.terms, lab):
            if t not in seen:
                seen.add(t)
                terms.append(t)
                labels.append(l)
        if not terms:
            raise ValueError("a bound needs at least one term")
        object.__setattr__(self, "terms", tuple(terms))
        object.__setattr__(self, "labels", tuple(labels))

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "BoundExpr") -> "BoundExpr":
        return BoundExpr(self.terms + other.terms, self.labels + other.labels)

    def scale(self, m: ExpMonomial) -> "BoundExpr":
        return BoundExpr(tuple(t * m for t in self.terms), self.labels)

    def substitute(self, symbol: str, replacement: ExpMonomial) -> "BoundExpr":
        return BoundExpr(tuple(t.substitute(symbol, replacement) for t in self.terms), self.labels)

    def t_exponents(self) -> list:
        """Exponent of T in each term; other symbols must already be eliminated."""
        out = []
        for t in self.terms:
            extra = [s for s, _ in t.exponents if s != "T"]
            if extra:
                raise ValueError(f"term {t} still contains {extra}")
            out.append(t.exp("T"))
        return out


def substitute(expr: BoundExpr, symbol: str, replacement: ExpMonomial) -> BoundExpr:
    """Exact substitution ``symbol -> replacement`` in every term."""
    return expr.substitute(symbol, replacement)


# ---------------------------------------------------------------------------
# term lists
# ---------------------------------------------------------------------------

_H = Fraction(1, 2)


def _m(**e):
    return ExpMonomial.of(**e)


def _nu(c, a):
    return AffineForm.of(c, nu=a)


_TERMS = {
    "P6_1": [_m(N=1, K=-1), _m(T=1, N=_H, K=Fraction(-3, 2))],
    "P7_1": [_m(T=Fraction(3, 2), N=_H, K=Fraction(-3, 2)), _m(T=_H, N=1, K=-1)],
    "P7_3": [_m(T=_H, N=1, K=-1), _m(T=_H, N=Fraction(3, 4), K=Fraction(-1, 4)), _m(T=1, N=_H, K=-_H)],
    "P7_4": [_m(N=1, K=1, T=Fraction(-5, 6)), _m(N=_H, K=Fraction(3, 2), T=Fraction(-1, 6))],
    "P7_5": [_m(N=1, K=1, T=-1), _m(N=Fraction(3, 4), K=Fraction(5, 4), T=-_H),
             _m(N=_H, K=Fraction(3, 2), T=-_H)],
    "E9_13": [_m(T=_nu(1, -_H), N=1, K=-1), _m(T=_nu(2, -_H), N=_H, K=Fraction(-3, 2))],
    "E9_14": [_m(N=1, K=1, T=_nu(-1, Fraction(1, 6))), _m(N=_H, K=Fraction(3, 2), T=_nu(-1, Fraction(5, 6)))],
    "E9_15": [_m(T=_nu(1, -_H), N=1, K=-1), _m(T=_H, N=Fraction(3, 4), K=Fraction(-1, 4)),
              _m(T=1, N=_H, K=-_H)],
}
_TERMS["E9_6"] = _TERMS["P6_1"]
_TERMS["E9_7"] = _TERMS["P7_5"]

PROPOSITION_IDS = ("P6_1", "P7_1", "P7_3", "P7_4", "P7_5", "E9_6", "E9_7", "E9_13", "E9_14", "E9_15")

# The assembled list printed before the substitution N = T^{3/2}: ten terms,
# which omits the T N^{1/2} K^{-1/2} term of P7_3 (it is dominated on the window).
ASSEMBLED_TEN = [
    _m(N=1, K=-1), _m(T=1, N=_H, K=Fraction(-3, 2)), _m(T=Fraction(3, 2), N=_H, K=Fraction(-3, 2)),
    _m(T=_H, N=1, K=-1), _m(T=_H, N=Fraction(3, 4), K=Fraction(-1, 4)),
    _m(N=1, K=1, T=Fraction(-5, 6)), _m(N=_H, K=Fraction(3, 2), T=Fraction(-1, 6)),
    _m(N=1, K=1, T=-1), _m(N=Fraction(3, 4), K=Fraction(5, 4), T=-_H), _m(N=_H, K=Fraction(3, 2), T=-_H),
]


def proposition_terms(pid: str) -> BoundExpr:
    """Term list of one of the range-wise bounds, as exponent vectors."""
    if pid not in _TERMS:
        raise KeyError(f"unknown proposition id {pid!r}; expected one of {PROPOSITION_IDS}")
    terms = _TERMS[pid]
    return BoundExpr(tuple(terms), tuple(f"{pid}[{i}]" for i in range(len(terms))))


# ---------------------------------------------------------------------------
# minimax over kappa
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinimaxResult:
    kappa: Fraction
    value: Fraction
    interval: tuple  # (lo, hi) of all minimisers
    binding: tuple  # indices of terms attaining the max at kappa
    on_boundary: bool
    window: tuple

    def as_dict(self) -> dict:
        return {"kappa": self.kappa, "value": self.value, "interval": list(self.interval),
                "binding": list(self.binding), "on_boundary": self.on_boundary,
                "window": list(self.window)}


def _as_line(term) -> tuple:
    """(a, b) for a term a + b*kappa given as AffineForm or pair."""
    if isinstance(term, AffineForm):
        extra = [p for p in term.params if p != KAPPA]
        if extra:
            raise ValueError(f"term {term} depends on {extra}; substitute them first")
        return term.const, term.coeff(KAPPA)
    a, b = term
    return parse_fraction(a), parse_fraction(b)


def minimax_kappa(terms: Iterable, window) -> MinimaxResult:
    """Exact minimiser of ``max_i (a_i + b_i kappa)`` over a closed window.

    Every candidate (window endpoints and pairwise crossings inside the
    window) is evaluated; the full set of minimisers is an interval, and
    its left end is returned as the canonical kappa.
    """
    lines = [_as_line(t) for t in terms]
    if not lines:
        raise ValueError("need at least one term")
    lo, hi = (parse_fraction(w) for w in window)
    if lo > hi:
        raise ValueError("empty window")

    def peak(k):
        return max(a + b * k for a, b in lines)

    cands = {lo, hi}
    for (a1, b1), (a2, b2) in combinations(lines, 2):
        if b1 != b2:
            k = (a2 - a1) / (b1 - b2)
            if lo <= k <= hi:
                cands.add(k)
    best = min(peak(k) for k in cands)
    # minimisers: kappa in window with a_i + b_i kappa <= best for all i
    L, R = lo, hi
    for a, b in lines:
        if b > 0:
            R = min(R, (best - a) / b)
        elif b < 0:
            L = max(L, (best - a) / b)
    binding = tuple(i for i, (a, b) in enumerate(lines) if a + b * L == best)
    return MinimaxResult(L, best, (L, R), binding, L in (lo, hi), (lo, hi))


def cancellation_window(terms: Iterable, convexity) -> tuple:
    """Closed interval of kappa on which every term is at most ``convexity``.

    Returns ``(lo, hi)``; ``lo > hi`` signals an empty window.  Terms with no
    kappa dependence must themselves lie below the threshold.
    """
    conv = parse_fraction(convexity)
    lo, hi = Fraction(-10 ** 9), Fraction(10 ** 9)
    for t in terms:
        a, b = _as_line(t)
        if b > 0:
            hi = min(hi, (conv - a) / b)
        elif b < 0:
            lo = max(lo, (conv - a) / b)
        elif a > conv:
            return (Fraction(1), Fraction(0))
    return lo, hi


def dominated_terms(terms: list, window=None) -> dict:
    """Map each dominated index to an index of a term that is >= it.

    With a window, domination is checked at both endpoints (enough for
    affine terms).  Without one it must hold for every kappa, which for
    lines means equal slope and a smaller constant.
    """
    lines = [_as_line(t) for t in terms]
    out = {}
    for i, (a, b) in enumerate(lines):
        for j, (c, d) in enumerate(lines):
            if i == j or j in out:
                continue
            if window is None:
                ok = d == b and c >= a
            else:
                lo, hi = (parse_fraction(w) for w in window)
                ok = c + d * lo >= a + b * lo and c + d * hi >= a + b * hi
            if ok:
                out[i] = j
                break
    return out


# ---------------------------------------------------------------------------
# assembling the two theorems
# ---------------------------------------------------------------------------


def _reduce_to_kappa(expr: BoundExpr, n_exp: AffineForm) -> list:
    """Substitute N = T^{n_exp}, K = T^kappa, divide by sqrt(N); return T-exponents."""
    T = lambda e: ExpMonomial.of(T=e)  # noqa: E731
    e = substitute(expr, "N", T(n_exp))
    e = substitute(e, "K", T(AffineForm.of(0, kappa=1)))
    e = e.scale(T(-n_exp / 2))
    return e.t_exponents()


THEOREM1_CONVEXITY = Fraction(3, 4)
THEOREM1_N = AffineForm.of(Fraction(3, 2))
THEOREM1_STATED_WINDOW = (Fraction(1, 2), Fraction(11, 18))
THEOREM1_STATED_SIX = [AffineForm.of(Fraction(3, 2), kappa=Fraction(-3, 2)), AffineForm.of(Fraction(5, 4), kappa=-1),
                      AffineForm.of(Fraction(7, 8), kappa=Fraction(-1, 4)), AffineForm.of(Fraction(-1, 12), kappa=1),
                      AffineForm.of(Fraction(-1, 6), kappa=Fraction(3, 2)),
                      AffineForm.of(Fraction(-1, 8), kappa=Fraction(5, 4))]


def theorem1_terms(source: str = "propositions") -> list:
    """T-exponents (affine in kappa) of S(N)/sqrt(N) with N = T^{3/2}.

    ``source="propositions"`` assembles P6_1, P7_1, P7_3, P7_4, P7_5
    (eleven distinct terms); ``source="assembled"`` uses the printed
    ten-term list.
    """
    if source == "propositions":
        expr = proposition_terms("P6_1")
        for pid in ("P7_1", "P7_3", "P7_4", "P7_5"):
            expr = expr + proposition_terms(pid)
    elif source == "assembled":
        expr = BoundExpr(tuple(ASSEMBLED_TEN))
    else:
        raise ValueError(f"unknown source {source!r}")
    exps = _reduce_to_kappa(expr, THEOREM1_N)
    out = []
    for e in exps:
        if e not in out:
            out.append(e)
    return out


def theorem1_bound(source: str = "propositions") -> dict:
    """Exponent, kappa and theta for the sum point t = t_f + t_g.

    The window is derived as the set where every term is below the
    convexity exponent 3/4 and compared with the stated window [1/2, 11/18].
    """
    terms = theorem1_terms(source)
    window = cancellation_window(terms, THEOREM1_CONVEXITY)
    res = minimax_kappa(terms, window)
    dom = dominated_terms(terms, window)
    glob = dominated_terms(terms)
    return {
        "exponent": res.value,
        "kappa": res.kappa,
        "theta": THEOREM1_CONVEXITY - res.value,
        "convexity": THEOREM1_CONVEXITY,
        "window": window,
        "window_matches_stated": window == THEOREM1_STATED_WINDOW,
        "binding_terms": [terms[i] for i in res.binding],
        "surviving_terms": [t for i, t in enumerate(terms) if i not in dom],
        "undominated_terms": [t for i, t in enumerate(terms) if i not in glob],
        "minimiser_interval": res.interval,
        "on_boundary": res.on_boundary,
        "terms": terms,
    }


def theorem2_terms() -> list:
    """T-exponents, affine in (nu, kappa), with N = T^{1+nu/2}.

    Assembled from E9_6, E9_7, E9_13, E9_14 and E9_15.
    """
    expr = proposition_terms("E9_6")
    for pid in ("E9_7", "E9_13", "E9_14", "E9_15"):
        expr = expr + proposition_terms(pid)
    exps = _reduce_to_kappa(expr, AffineForm.of(1, nu=_H))
    out = []
    for e in exps:
        if e not in out:
            out.append(e)
    return out


def _theorem2_convexity(nu: Fraction) -> Fraction:
    return _H + nu / 4


def theorem2_bound(nu) -> dict:
    """Exponent and kappa at the difference point with t_f - t_g = T^nu.

    Requires 2/3 < nu <= 1; the lower limit is where the cancellation
    window becomes empty.
    """
    nu = parse_fraction(nu)
    if not (Fraction(2, 3) < nu <= 1):
        raise ValueError(f"nu must satisfy 2/3 < nu <= 1, got {nu}")
    terms = [t.subs(nu=nu) for t in theorem2_terms()]
    conv = _theorem2_convexity(nu)
    window = cancellation_window(terms, conv)
    stated = (1 - nu / 2, min(1 - 7 * nu / 18, Fraction(3, 5) + nu / 10))
    res = minimax_kappa(terms, window)
    low, high = theorem2_regime_formulas()
    f_low = low["exponent"].value(nu=nu)
    regime = "low" if res.value == f_low and res.kappa == low["kappa"].value(nu=nu) else "high"
    if regime == "high" and res.value != high["exponent"].value(nu=nu):
        regime = "other"
    dom = dominated_terms(terms, window)
    return {
        "exponent": res.value,
        "kappa": res.kappa,
        "theta": conv - res.value,
        "regime": regime,
        "convexity": conv,
        "window": window,
        "window_matches_stated": window == stated,
        "binding_terms": [terms[i] for i in res.binding],
        "surviving_terms": [t for i, t in enumerate(terms) if i not in dom],
        "minimiser_interval": res.interval,
        "on_boundary": res.on_boundary,
    }


def _crossing(f: AffineForm, g: AffineForm) -> AffineForm:
    """kappa (affine in nu) where two terms with constant kappa-slopes meet."""
    bf, bg = f.coeff(KAPPA), g.coeff(KAPPA)
    if bf == bg:
        raise ValueError("parallel terms never cross")
    af = f - AffineForm.of(0, kappa=bf)
    ag = g - AffineForm.of(0, kappa=bg)
    return (ag - af) / (bf - bg)


def theorem2_regime_formulas() -> tuple:
    """Symbolic exponents of the two regimes as affine forms in nu.

    The decreasing term 3/4 + nu/8 - kappa/4 meets the increasing term
    5kappa/4 - 1/4 + nu/8 (low regime) or 3kappa/2 - 1 + 5nu/6 (high regime).
    """
    terms = theorem2_terms()
    f = AffineForm.of(Fraction(3, 4), nu=Fraction(1, 8), kappa=Fraction(-1, 4))
    g = AffineForm.of(Fraction(-1, 4), nu=Fraction(1, 8), kappa=Fraction(5, 4))
    d = AffineForm.of(-1, nu=Fraction(5, 6), kappa=Fraction(3, 2))
    for t in (f, g, d):
        if t not in terms:
            raise AssertionError(f"expected term {t} missing from the assembled list")
    out = []
    for other in (g, d):
        k = _crossing(f, other)
        out.append({"kappa": k, "exponent": f.subs(kappa=k),
                    "theta": AffineForm.of(_H, nu=Fraction(1, 4)) - f.subs(kappa=k)})
    return tuple(out)


def crossover_nu() -> dict:
    """The nu at which the two regime exponents coincide, and the shared value."""
    low, high = theorem2_regime_formulas()
    diff = low["exponent"] - high["exponent"]
    nu = -diff.const / diff.coeff(NU)
    return {"nu": nu, "value": low["exponent"].value(nu=nu),
            "low_formula": low["exponent"], "high_formula": high["exponent"]}
