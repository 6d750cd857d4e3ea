"""Command-line front end.

    growthgauge derive   EXPR --var x --order N
    growthgauge taylor   EXPR --x0 V --order N [--at X ...] [--output json|csv|text]
    growthgauge radius   EXPR --x0 V --order N --method ratio|root
    growthgauge bound    EXPR [--var x] [flags]
    growthgauge classify EXPR [--vars x,y] [flags]
    growthgauge fit      --input FILE --format csv|json [--report json|text]

Exit codes: 0 candidate/success, 1 not polynomial, 2 inconclusive,
64 usage error, 65 input data error, 70 internal limit.
"""

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import __version__
from .boundedness import find_bounding_order
from .calculus import nth_derivative, N_MAX
from .classifier import Verdict, classify_multivariate
from .config import AnalysisConfig, ProbeConfig, X_MIN, default_precision
from .errors import InputError, LimitExceeded
from .expr import to_json
from .fitting import classify_empirical, fit_models, load_samples
from .syntax import format_expr, parse
from .taylor import (TAYLOR_N_MAX, radius_ratio, radius_root, remainder_table,
                     taylor_series)

EXIT_OK = 0
EXIT_NOT_POLYNOMIAL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_LIMIT = 70

SCHEMA_VERSION = "1.0"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("%s: %s" % (self.prog, message))


def _jsonable(v):
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _dump(report):
    return json.dumps(_jsonable(report), sort_keys=True, indent=2, allow_nan=False)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_analysis_flags(p):
    p.add_argument("--n-max", type=int, default=8, help="highest derivative order to scan")
    p.add_argument("--x-min", type=float, default=X_MIN, help="start of the analysed domain")
    p.add_argument("--full", action="store_true", help="compute every order, no early exit")
    p.add_argument("--probe-start", type=float, default=4.0)
    p.add_argument("--probe-factor", type=float, default=2.0)
    p.add_argument("--probe-steps", type=int, default=60)
    p.add_argument("--stabilize-tol", type=float, default=1e-6)
    p.add_argument("--sup-density", type=int, default=4,
                   help="sup-grid points per probe-factor step")
    _add_precision(p)


def _add_precision(p):
    p.add_argument("--precision", type=int, default=None,
                   help="working precision in bits (default 128, or GG_PRECISION_BITS)")


def _add_output(p, choices=("text", "json")):
    p.add_argument("--output", choices=choices, default="json")


def build_parser():
    parser = _Parser(prog="growthgauge",
                     description="Taylor-criterion growth-class analyzer.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("derive", help="n-th symbolic derivative")
    p.add_argument("expr")
    p.add_argument("--var", default="x")
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--n-max", type=int, default=N_MAX)
    p.add_argument("--output", choices=("text", "json"), default="text")

    p = sub.add_parser("taylor", help="Taylor coefficients and remainder table")
    p.add_argument("expr")
    p.add_argument("--var", default="x")
    p.add_argument("--x0", type=Fraction, default=Fraction(0))
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--at", type=Fraction, nargs="*", default=[],
                   help="points for the remainder table")
    p.add_argument("--M", type=float, default=None,
                   help="bound on |f^(n+1)|; default is its grid sup")
    _add_precision(p)
    _add_output(p, ("text", "json", "csv"))

    p = sub.add_parser("radius", help="radius-of-convergence estimate")
    p.add_argument("expr")
    p.add_argument("--var", default="x")
    p.add_argument("--x0", type=Fraction, default=Fraction(0))
    p.add_argument("--order", type=int, default=30)
    p.add_argument("--method", choices=("ratio", "root"), default="ratio")
    _add_precision(p)
    _add_output(p)

    p = sub.add_parser("bound", help="derivative boundedness scan")
    p.add_argument("expr")
    p.add_argument("--var", default="x")
    _add_analysis_flags(p)
    _add_output(p)

    p = sub.add_parser("classify", help="polynomial-time candidate verdict")
    p.add_argument("expr")
    p.add_argument("--vars", default=None, help="comma-separated variables (default: all free)")
    p.add_argument("--fix-values", default="2,10",
                   help="constants substituted for the other variables")
    _add_analysis_flags(p)
    _add_output(p)

    p = sub.add_parser("fit", help="fit runtime samples and classify the best family")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--report", "--output", dest="output", choices=("text", "json"),
                   default="json")
    _add_analysis_flags(p)
    return parser


def _precision(args):
    if args.precision is not None:
        bits = args.precision
    else:
        try:
            bits = default_precision()
        except ValueError as err:
            raise UsageError(str(err)) from None
    if not 64 <= bits <= 1024:
        raise UsageError("--precision must be in [64, 1024], got %d" % bits)
    return bits


def _config(args):
    try:
        probe = ProbeConfig(start=args.probe_start, factor=args.probe_factor,
                            steps=args.probe_steps, stabilize_tol=args.stabilize_tol,
                            precision=_precision(args))
        fix = tuple(Fraction(s) for s in getattr(args, "fix_values", "2,10").split(","))
        return AnalysisConfig(n_max=args.n_max, x_min=args.x_min, probe=probe,
                              sup_density=args.sup_density, full=args.full,
                              fix_values=fix, output_format=args.output)
    except ValueError as err:
        raise UsageError(str(err)) from None


def _config_echo(cfg):
    p = cfg.probe
    return {
        "n_max": cfg.n_max, "x_min": cfg.x_min, "full": cfg.full,
        "probe_start": p.start, "probe_factor": p.factor, "probe_steps": p.steps,
        "stabilize_tol": p.stabilize_tol, "precision_bits": p.precision,
        "sup_density": cfg.sup_density, "fix_values": [str(c) for c in cfg.fix_values],
    }


# ---------------------------------------------------------------------------
# subcommands; each returns (exit code, report dict or text)
# ---------------------------------------------------------------------------

def _cmd_derive(args):
    f = parse(args.expr)
    d = nth_derivative(f, args.var, args.order, n_max=args.n_max)
    if args.output == "text":
        return EXIT_OK, format_expr(d)
    return EXIT_OK, {"command": "derive", "input": args.expr, "variable": args.var,
                     "order": args.order, "result": format_expr(d), "tree": to_json(d)}


def _coef_text(a):
    return str(a) if isinstance(a, Fraction) else repr(float(a))


def _cmd_taylor(args):
    f = parse(args.expr)
    s = taylor_series(f, args.var, args.x0, args.order, TAYLOR_N_MAX, _precision(args))
    rows, M = remainder_table(f, s, args.at, args.M) if args.at else ([], args.M)
    coefs = [{"k": k, "a_k": _coef_text(a), "value": float(a), "exact": s.is_exact(k)}
             for k, a in enumerate(s.coefficients)]
    if args.output == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "a_k", "x", "T_n(x)", "|R_n(x)|", "bound"])
        for c in coefs:
            w.writerow([c["k"], c["a_k"], "", "", "", ""])
        for r in rows:
            w.writerow(["", "", repr(r["x"]), repr(r["T"]), repr(r["R"]), repr(r["bound"])])
        return EXIT_OK, buf.getvalue().rstrip("\n")
    if args.output == "text":
        lines = ["a_%d = %s" % (c["k"], c["a_k"]) for c in coefs]
        lines += ["x=%r  T_n=%r  |R_n|=%r  bound=%r" % (r["x"], r["T"], r["R"], r["bound"])
                  for r in rows]
        return EXIT_OK, "\n".join(lines)
    return EXIT_OK, {"command": "taylor", "input": args.expr, "variable": args.var,
                     "x0": str(args.x0), "order": args.order, "coefficients": coefs,
                     "M": M, "remainder": rows}


def _cmd_radius(args):
    f = parse(args.expr)
    s = taylor_series(f, args.var, args.x0, args.order, TAYLOR_N_MAX, _precision(args))
    est = (radius_ratio if args.method == "ratio" else radius_root)(s)
    if args.output == "text":
        value = "" if est.value is None else " %s" % est.value
        return EXIT_OK, "%s: %s%s" % (est.method, est.verdict, value)
    return EXIT_OK, {"command": "radius", "input": args.expr, "variable": args.var,
                     "x0": str(args.x0), "order": args.order, "estimate": est.to_json()}


def _report_exit(report, n_max):
    if report.bounding_order is not None:
        return EXIT_OK
    if report.all_unbounded(n_max):
        return EXIT_NOT_POLYNOMIAL
    return EXIT_INCONCLUSIVE


def _cmd_bound(args):
    cfg = _config(args)
    f = parse(args.expr)
    report = find_bounding_order(f, args.var, cfg.x_min, cfg.n_max, cfg)
    code = _report_exit(report, cfg.n_max)
    if args.output == "text":
        lines = ["n=%d %s sup=%s M=%s" % (v.order, v.status.value, v.sup_estimate, v.M)
                 for v in report.verdicts]
        lines.append("bounding_order: %s" % report.bounding_order)
        return code, "\n".join(lines)
    out = report.to_json()
    out.update(command="bound", input=args.expr, config_echo=_config_echo(cfg))
    return code, out


def _classification_text(c):
    lines = ["verdict: %s" % c.verdict.value, "degree_estimate: %s" % c.degree_estimate]
    lines += ["note: %s" % n for n in c.notes]
    return "\n".join(lines)


def _cmd_classify(args):
    cfg = _config(args)
    f = parse(args.expr)
    variables = [v.strip() for v in args.vars.split(",")] if args.vars else (sorted(f.free) or ["x"])
    c = classify_multivariate(f, variables, cfg)
    code = c.verdict.exit_code
    if args.output == "text":
        return code, _classification_text(c)
    out = c.to_json()
    out.update(command="classify", input=args.expr, variables=variables,
               config_echo=_config_echo(cfg))
    return code, out


def _cmd_fit(args):
    cfg = _config(args)
    try:
        with open(args.input, "rb") as fh:
            samples = load_samples(fh, args.format)
    except OSError as err:
        raise InputError("cannot read %s: %s" % (args.input, err.strerror)) from None
    fits = fit_models(samples)
    c = classify_empirical(samples, cfg, fits)
    code = c.verdict.exit_code
    if args.output == "text":
        lines = ["%-15s residual=%.6g scale=%.6g" % (f.family, f.residual, f.scale) for f in fits]
        return code, "\n".join(lines + [_classification_text(c)])
    return code, {"command": "fit", "input": args.input, "samples": len(samples),
                  "fits": [f.to_json() for f in fits], "classification": c.to_json(),
                  "config_echo": _config_echo(cfg)}


_COMMANDS = {
    "derive": _cmd_derive, "taylor": _cmd_taylor, "radius": _cmd_radius,
    "bound": _cmd_bound, "classify": _cmd_classify, "fit": _cmd_fit,
}


def run(argv, stdout=None, stderr=None):
    """Run one command; returns the exit code and writes the report to ``stdout``."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        code, report = _COMMANDS[args.command](args)
    except SystemExit as exc:  # --help / --version
        return exc.code or 0
    except UsageError as err:
        print("usage error: %s" % err, file=stderr)
        return EXIT_USAGE
    except InputError as err:
        print("input error: %s: %s" % (type(err).__name__, err), file=stderr)
        return EXIT_DATA
    except LimitExceeded as err:
        print("limit exceeded: %s: %s" % (type(err).__name__, err), file=stderr)
        return EXIT_LIMIT
    except RecursionError:
        print("limit exceeded: expression nested too deeply", file=stderr)
        return EXIT_LIMIT
    except (ValueError, ArithmeticError) as err:
        print("error: %s" % err, file=stderr)
        return EXIT_DATA
    if isinstance(report, dict):
        report["schema_version"] = SCHEMA_VERSION
        report = _dump(report)
    print(report, file=stdout)
    return code


def main(argv=None):
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
