"""Command-line front end: each subcommand runs one verification and prints a report.

Exit status: 0 when every report passes, 1 on a verification failure,
2 on a usage error.  Output is JSON (default) or CSV and contains no
timings unless ``--timing`` is given, so identical flags give identical
bytes.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from fractions import Fraction

from . import exponent_calculus as ec
from .errors import DomainError
from .report import ReportEnvelope, VerificationReport

log = logging.getLogger(__name__)

__all__ = ["run", "main", "build_parser", "DEFAULT_TOLERANCES"]

# default per-command tolerances; --tol overrides.  Commands absent here are
# exact or purely descriptive and ignore --tol.
DEFAULT_TOLERANCES = {
    "verify-delta": 1e-6,
    "verify-voronoi": 1e-4,
    "stationary-phase": 1e-3,
    "count-bilinear": 10.0,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _support(text: str):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected lo,hi") from exc
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError("need 0 < lo < hi")
    return lo, hi


def _fraction(text: str) -> Fraction:
    try:
        return ec.parse_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _rational_entry(x: Fraction) -> dict:
    return {"exact": f"{x.numerator}/{x.denominator}", "decimal": float(x)}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_verify_delta(args, tol):
    from .delta_symbol import DeltaParams, verify_delta

    params = DeltaParams(args.Q, x_cutoff=args.x_cutoff)
    return [verify_delta((-args.nmax, args.nmax), params, tol=tol)]


def _cmd_verify_voronoi(args, tol):
    from .hecke import load_form
    from .voronoi import VoronoiInstance, verify_voronoi
    from .weights import bump

    form = load_form(args.fixture)
    w = bump(*args.support, power=args.power)
    inst = VoronoiInstance(form, args.a, args.q, w)
    ys = None
    if args.route_samples:
        lo, hi = 0.05, 50.0
        k = args.route_samples
        ys = [lo * (hi / lo) ** (i / max(k - 1, 1)) for i in range(k)]
    return [verify_voronoi(inst, tol=tol, route_ys=ys)]


def _cmd_stationary_phase(args, tol):
    from .oscillatory import PhaseFunction, oscillatory_quadrature, stationary_phase_terms
    from .weights import bump

    t0 = time.perf_counter()
    lam = args.lam
    w = bump(1.0, 2.0)
    cubic = 0.0 if args.demo == "fresnel" else lam / 10
    h = PhaseFunction.quadratic(lam, 1.5, cubic=cubic, Y0=lam, Q0=1.0)
    sp = stationary_phase_terms(w, h, args.order)
    exact = oscillatory_quadrature(w, h, tol=1e-13)
    rel = abs(sp.value - exact) / abs(exact)
    return [VerificationReport(
        name="stationary_phase",
        passed=rel <= tol,
        residuals={"relative_error": rel},
        tolerances={"relative_error": tol},
        details={"demo": args.demo, "lambda": lam, "order": args.order, "t0": sp.t0,
                 "expansion": sp.value, "quadrature": exact, "terms": sp.terms},
        elapsed=time.perf_counter() - t0,
    )]


def _exponent_report(name: str, res: dict, checks: dict, extra: dict) -> VerificationReport:
    details = {k: (_rational_entry(v) if isinstance(v, Fraction) else v) for k, v in extra.items()}
    return VerificationReport(
        name=name,
        passed=all(checks.values()),
        residuals={k: bool(v) for k, v in checks.items()},
        tolerances={"exact": True},
        details=details,
    )


def _cmd_balance(args, tol):
    t0 = time.perf_counter()
    if args.theorem == 1:
        if args.nu is not None:
            raise UsageError("--nu applies to --theorem 2 only")
        res = ec.theorem1_bound()
        extra = {
            "exponent": res["exponent"], "kappa": res["kappa"], "theta": res["theta"],
            "convexity": res["convexity"],
            "window": [_rational_entry(x) for x in res["window"]],
            "binding_terms": [str(b) for b in res["binding_terms"]],
            "surviving_terms": [str(b) for b in res["surviving_terms"]],
        }
        checks = {"window_matches_stated": res["window_matches_stated"],
                  "exponent_below_convexity": res["exponent"] < res["convexity"]}
        reports = [_exponent_report("theorem1", res, checks, extra)]
    else:
        nu = args.nu if args.nu is not None else Fraction(1)
        try:
            res = ec.theorem2_bound(nu)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        extra = {
            "nu": nu, "exponent": res["exponent"], "kappa": res["kappa"], "theta": res["theta"],
            "regime": res["regime"], "convexity": res["convexity"],
            "window": [_rational_entry(x) for x in res["window"]],
            "binding_terms": [str(b) for b in res["binding_terms"]],
        }
        checks = {"window_matches_stated": res["window_matches_stated"],
                  "exponent_below_convexity": res["exponent"] < res["convexity"]}
        cross = ec.crossover_nu()
        reports = [_exponent_report("theorem2", res, checks, extra),
                   _exponent_report("crossover", cross,
                                    {"formulas_agree": cross["low_formula"].value(nu=cross["nu"])
                                     == cross["high_formula"].value(nu=cross["nu"]) == cross["value"]},
                                    {"nu": cross["nu"], "value": cross["value"],
                                     "low_formula": str(cross["low_formula"]),
                                     "high_formula": str(cross["high_formula"])})]
    for r in reports:
        r.elapsed = time.perf_counter() - t0
    return reports


def _cmd_conductor(args, tol):
    from .lfunction import analytic_conductor

    t0 = time.perf_counter()
    p = analytic_conductor(args.tf, args.tg, args.t)
    prod = math.prod(p.factors)
    return [VerificationReport(
        name="conductor",
        passed=all(f >= 0.5 for f in p.factors) and abs(prod - p.conductor) <= 1e-12 * prod,
        residuals={"conductor": p.conductor, "log_conductor": p.log_conductor},
        tolerances={},
        details=p.as_dict(),
        elapsed=time.perf_counter() - t0,
    )]


def _cmd_smoothed_sum(args, tol):
    from .hecke import load_form
    from .lfunction import RankinSelbergSpec, smoothed_sum_report
    from .weights import bump

    f = load_form(args.fixture)
    spec = RankinSelbergSpec.from_forms(f, f, args.t)
    V = bump(1.0, 2.0, (1.25, 1.75)).normalized()
    return [smoothed_sum_report(spec, args.N, V)]


def _cmd_ramanujan(args, tol):
    from .hecke import ramanujan_sum_direct, ramanujan_sum_mobius

    t0 = time.perf_counter()
    d = ramanujan_sum_direct(args.q, args.n)
    m = ramanujan_sum_mobius(args.q, args.n)
    return [VerificationReport(
        name="ramanujan_sum",
        passed=d == m,
        residuals={"value": m, "route_difference": abs(d - m)},
        tolerances={"route_difference": 0},
        details={"q": args.q, "n": args.n, "direct": d, "mobius": m},
        elapsed=time.perf_counter() - t0,
    )]


def _cmd_bilinear(args, tol):
    from .hecke import bilinear_report

    return [bilinear_report(args.R, args.H, args.delta, c_max=tol)]


COMMANDS = {
    "verify-delta": _cmd_verify_delta,
    "verify-voronoi": _cmd_verify_voronoi,
    "stationary-phase": _cmd_stationary_phase,
    "balance-exponents": _cmd_balance,
    "conductor": _cmd_conductor,
    "smoothed-sum": _cmd_smoothed_sum,
    "ramanujan-sum": _cmd_ramanujan,
    "count-bilinear": _cmd_bilinear,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol", type=float, default=None, help="override the default tolerance")
    common.add_argument("--timing", action="store_true", help="include wall-clock timings")

    p = _Parser(prog="rankin-delta", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("verify-delta", parents=[common], help="delta-symbol identity sweep")
    s.add_argument("--Q", type=int, required=True)
    s.add_argument("--nmax", type=int, required=True)
    s.add_argument("--x-cutoff", type=float, default=40.0)

    s = sub.add_parser("verify-voronoi", parents=[common], help="two-sided Voronoi check")
    s.add_argument("--fixture", default=None, help="eigenvalue fixture (JSON); default: bundled form")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--support", type=_support, required=True, help="lo,hi")
    s.add_argument("--power", type=int, default=4, help="bump sharpness exponent")
    s.add_argument("--route-samples", type=int, default=0,
                   help="also compare the Bessel and Mellin routes at this many y")

    s = sub.add_parser("stationary-phase", parents=[common], help="expansion vs quadrature")
    s.add_argument("--demo", choices=("fresnel", "cubic"), required=True)
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--order", type=int, required=True)

    s = sub.add_parser("balance-exponents", parents=[common], help="exact exponent optimisation")
    s.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    s.add_argument("--nu", type=_fraction, default=None, help="rational in (2/3, 1], e.g. 3/4")

    s = sub.add_parser("conductor", parents=[common], help="analytic conductor")
    s.add_argument("--tf", type=float, required=True)
    s.add_argument("--tg", type=float, required=True)
    s.add_argument("--t", type=float, required=True)

    s = sub.add_parser("smoothed-sum", parents=[common], help="smoothed Rankin-Selberg sum S(N)")
    s.add_argument("--fixture", default=None)
    s.add_argument("--N", type=float, required=True)
    s.add_argument("--t", type=float, required=True)

    s = sub.add_parser("ramanujan-sum", parents=[common], help="c_q(n) by two routes")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("count-bilinear", parents=[common], help="bilinear near-coincidence count")
    s.add_argument("--R", type=int, required=True)
    s.add_argument("--H", type=int, required=True)
    s.add_argument("--delta", type=float, required=True)
    return p


def _params(args) -> dict:
    skip = {"command", "format", "tol", "timing"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        if isinstance(v, Fraction):
            v = f"{v.numerator}/{v.denominator}"
        elif isinstance(v, tuple):
            v = list(v)
        out[k] = v
    return out


def run(argv=None, stdout=None) -> int:
    """Parse ``argv``, run the subcommand, print the report; return the exit code."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    tol = args.tol if args.tol is not None else DEFAULT_TOLERANCES.get(args.command)
    t0 = time.perf_counter()
    try:
        results = COMMANDS[args.command](args, tol)
    except (UsageError, DomainError) as exc:
        print(f"rankin-delta {args.command}: error: {exc}", file=sys.stderr)
        return 2
    params = _params(args)
    if args.command in DEFAULT_TOLERANCES:
        params["tol"] = tol
    env = ReportEnvelope(args.command, params, results,
                         time.perf_counter() - t0)
    if args.format == "json":
        stdout.write(env.to_json(include_timing=args.timing) + "\n")
    else:
        stdout.write(env.to_csv(include_timing=args.timing))
    return 0 if env.passed else 1


def main() -> None:
    logging.basicConfig(level=logging.WARNING)
    sys.exit(run())


if __name__ == "__main__":
    main()
