"""Command line interface: ``hardy-means {mean,hardy,verify,analyze}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any, Sequence

import numpy as np

from .errors import ExpressionSyntaxError, HardyMeansError
from .generators import (
    GridSpec, compare_generators, custom_generator, gini_chi, kappa_table, power_generator, shape_report,
)
from .hardy import (
    CLOSED_FORM_POWER, HardyEstimate, custom, geometric, gini_hardy_constant, hardy_deviation_constant,
    hardy_limit_estimate, hardy_lower_bound, hardy_power_constant, harmonic, jsonable, limit_table,
    power_law, qa_hardy_analysis, random_summable, verify_hardy_inequality,
)
from .means import (
    Gini, HomogeneousDeviation, PowerMean, QuasiArithmetic, check_mean_properties,
    difference_deviation, evaluate,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_HARDY = 3
EXIT_VIOLATED = 4

TOL_ENV = "HARDY_MEANS_TOL"
FAMILIES = ("power", "qa", "gini", "devmean", "deviation")
METHODS = ("closed", "limit", "integral", "kappa", "bound", "all")


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument parsing

def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from exc


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return v


def _count(text: str) -> int:
    v = int(float(text))
    if v < 1 or v != float(text):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("json", "csv", "plain"), dest="output_format")
    p.add_argument("--output", dest="output_path", help="write to this file instead of stdout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=_positive_float, help=f"tolerance (default: ${TOL_ENV} or per method)")
    return p


def _family_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--gen", help='generator expression in x, e.g. "ln(x)"')
    return p


def build_parser() -> argparse.ArgumentParser:
    common, family = _common(), _family_flags()
    parser = argparse.ArgumentParser(prog="hardy-means", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    mean = sub.add_parser("mean", parents=[common, family], help="evaluate a mean")
    mean.add_argument("--values", type=_float_list, required=True)

    hardy = sub.add_parser("hardy", parents=[common, family], help="Hardy constant of a mean")
    hardy.add_argument("--method", choices=METHODS, required=True)
    hardy.add_argument("--n-max", type=_count, default=100_000)
    hardy.add_argument("--ys", type=_float_list, default=[1.0], help="y grid for --method bound")
    hardy.add_argument("--require-hardy", action="store_true", help="exit 3 when the constant is +inf")

    verify = sub.add_parser("verify", parents=[common, family], help="check the Hardy inequality on a sequence")
    verify.add_argument("--seq", choices=("harmonic", "powerlaw", "geometric", "random", "custom"), required=True)
    verify.add_argument("--y", type=_positive_float, default=1.0)
    verify.add_argument("--s", type=float, default=2.0)
    verify.add_argument("--r", type=_positive_float, default=0.5)
    verify.add_argument("--values", type=_float_list)
    verify.add_argument("--N", type=_count, required=True)
    verify.add_argument("--bound", type=float, default=math.inf)

    analyze = sub.add_parser("analyze", help="shape, comparison and property analysis")
    asub = analyze.add_subparsers(dest="analysis", required=True)
    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid", type=_float_list, help="lo,hi,count of the geometric grid")
    shape = asub.add_parser("shape", parents=[common, grid])
    shape.add_argument("--gen", required=True)
    kap = asub.add_parser("kappa", parents=[common, grid])
    kap.add_argument("--gen", required=True)
    cmp_ = asub.add_parser("compare", parents=[common, grid])
    cmp_.add_argument("--f", required=True)
    cmp_.add_argument("--g", required=True)
    props = asub.add_parser("props", parents=[common, family])
    props.add_argument("--trials", type=_count, default=100)
    return parser


# --------------------------------------------------------------------------
# configuration helpers

def _tolerance(args, default: float | None = None) -> float | None:
    if args.tol is not None:
        return args.tol
    env = os.environ.get(TOL_ENV)
    if env:
        try:
            v = float(env)
        except ValueError:
            raise UsageError(f"{TOL_ENV} must be a number, got {env!r}") from None
        if not v > 0:
            raise UsageError(f"{TOL_ENV} must be positive, got {env!r}")
        return v
    return default


def _need(args, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"family {args.family!r} needs {', '.join(missing)}")


def _grid(args) -> GridSpec:
    if args.grid is None:
        return GridSpec()
    if len(args.grid) != 3:
        raise UsageError("--grid takes lo,hi,count")
    lo, hi, count = args.grid
    return GridSpec(lo, hi, int(count))


def mean_from_args(args):
    fam = args.family
    if fam == "power":
        _need(args, "p")
        return PowerMean(args.p)
    if fam == "gini":
        _need(args, "p", "q")
        return Gini(args.p, args.q)
    _need(args, "gen")
    g = custom_generator(args.gen)
    if fam == "qa":
        return QuasiArithmetic(g)
    if fam == "devmean":
        return HomogeneousDeviation(g)
    return difference_deviation(g)


# --------------------------------------------------------------------------
# output

def _fmt(v: Any) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "inf" if v == math.inf else "-inf" if v == -math.inf else repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(jsonable(v))
    return str(v)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _render(data: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(jsonable(data), indent=2) + "\n"
    if fmt == "csv":
        return _csv_text(list(data), [list(data.values())])
    return "".join(f"{k}: {_fmt(v)}\n" for k, v in data.items())


def _emit(args, text: str) -> None:
    if args.output_path:
        with open(args.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# commands

def cmd_mean(args) -> int:
    m = mean_from_args(args)
    value = evaluate(m, args.values)
    fmt = args.output_format or "plain"
    if fmt == "plain":
        _emit(args, _fmt(value) + "\n")
    else:
        _emit(args, _render({"mean": m.label, "values": args.values, "value": value}, fmt))
    return EXIT_OK


def _closed(args, m) -> HardyEstimate:
    if isinstance(m, PowerMean):
        value = hardy_power_constant(m.p)
        caveats = ["not a Hardy mean"] if math.isinf(value) else []
        return HardyEstimate(value, CLOSED_FORM_POWER, diagnostics={"p": m.p}, caveats=caveats)
    if isinstance(m, Gini):
        return gini_hardy_constant(m.p, m.q)
    raise UsageError("closed form is available for the power and gini families only")


def _integral(args, m) -> HardyEstimate:
    tol = _tolerance(args)
    kw = {} if tol is None else {"tol": tol}
    if isinstance(m, HomogeneousDeviation):
        return hardy_deviation_constant(m.f, **kw)
    if isinstance(m, Gini):
        return hardy_deviation_constant(gini_chi(m.p, m.q), **kw)
    if isinstance(m, PowerMean) and math.isfinite(m.p):
        # P_p is the homogeneous deviation mean of (x^p - 1)/p
        return hardy_deviation_constant(gini_chi(m.p, 0.0), **kw)
    raise UsageError("integral method needs a homogeneous deviation mean (devmean, gini or power family)")


def _kappa(args, m) -> HardyEstimate:
    tol = _tolerance(args)
    kw = {} if tol is None else {"tol": tol}
    if isinstance(m, QuasiArithmetic):
        return qa_hardy_analysis(m.g, **kw)
    if isinstance(m, PowerMean) and math.isfinite(m.p):
        return qa_hardy_analysis(power_generator(m.p), **kw)
    raise UsageError("kappa method needs a quasi-arithmetic mean (qa or power family)")


def _limit(args, m) -> HardyEstimate:
    tol = _tolerance(args)
    kw = {} if tol is None else {"tol": tol}
    return hardy_limit_estimate(m, args.n_max, seed=args.seed, **kw)


def _bound(args, m) -> HardyEstimate:
    return hardy_lower_bound(m, args.ys, args.n_max)


_METHOD_FUNCS = {"closed": _closed, "limit": _limit, "integral": _integral, "kappa": _kappa, "bound": _bound}


def _estimate_row(name: str, est: HardyEstimate) -> list:
    lo, hi = est.interval if est.interval is not None else (None, None)
    return [name, est.method, est.constant, lo, hi, "; ".join(est.caveats)]


_ESTIMATE_HEADER = ["requested", "method", "constant", "interval_lo", "interval_hi", "caveats"]


def cmd_hardy(args) -> int:
    m = mean_from_args(args)
    fmt = args.output_format or ("csv" if args.method == "all" else "json")
    if args.method == "all":
        results = {}
        for name, fn in _METHOD_FUNCS.items():
            try:
                results[name] = fn(args, m)
            except UsageError:
                continue
        if fmt == "json":
            text = json.dumps({k: v.to_dict() for k, v in results.items()}, indent=2) + "\n"
        elif fmt == "csv":
            text = _csv_text(_ESTIMATE_HEADER, [_estimate_row(k, v) for k, v in results.items()])
        else:
            text = "".join(f"{k}: {_fmt(v.constant)}\n" for k, v in results.items())
        _emit(args, text)
        estimates = list(results.values())
    else:
        est = _METHOD_FUNCS[args.method](args, m)
        if fmt == "json":
            text = json.dumps(est.to_dict(), indent=2) + "\n"
        elif fmt == "csv" and args.method == "limit":
            text = _csv_text(["n", "a_n", "extrapolated_so_far"], limit_table(m, args.n_max))
        elif fmt == "csv":
            text = _csv_text(_ESTIMATE_HEADER, [_estimate_row(args.method, est)])
        else:
            text = _render({"constant": est.constant, "method": est.method, "interval": est.interval,
                            "caveats": est.caveats}, "plain")
        _emit(args, text)
        estimates = [est]
    if args.require_hardy and any(e.constant == math.inf for e in estimates):
        return EXIT_NOT_HARDY
    return EXIT_OK


def _sequence(args):
    kind = args.seq
    if kind == "harmonic":
        return harmonic(args.y)
    if kind == "powerlaw":
        return power_law(args.s)
    if kind == "geometric":
        return geometric(args.r)
    if kind == "random":
        return random_summable(args.N, args.seed)
    if not args.values:
        raise UsageError("--seq custom needs --values")
    return custom(args.values)


def cmd_verify(args) -> int:
    m = mean_from_args(args)
    report = verify_hardy_inequality(m, _sequence(args), args.N, args.bound)
    fmt = args.output_format or "json"
    data = report.to_dict()
    data["mean"] = m.label
    if fmt == "csv":
        data.pop("per_step_ratios")
        _emit(args, _csv_text(list(data), [list(data.values())]))
    else:
        _emit(args, _render(data, fmt))
    return EXIT_OK if report.satisfied else EXIT_VIOLATED


def cmd_analyze(args) -> int:
    fmt = args.output_format or "json"
    kind = args.analysis
    if kind == "shape":
        report = shape_report(custom_generator(args.gen), _grid(args), _tolerance(args, 1e-6))
        data = report.to_dict()
        if fmt != "json":
            data.pop("grid")
        _emit(args, _render(data, fmt))
    elif kind == "kappa":
        rows = kappa_table(custom_generator(args.gen), _grid(args))
        if fmt == "json":
            _emit(args, _render({"x": [r[0] for r in rows], "kappa": [r[1] for r in rows]}, fmt))
        else:
            _emit(args, _csv_text(["x", "kappa"], rows))
    elif kind == "compare":
        f, g = custom_generator(args.f), custom_generator(args.g)
        verdict = compare_generators(f, g, _grid(args), _tolerance(args, 1e-9))
        if fmt == "plain":
            _emit(args, verdict + "\n")
        else:
            _emit(args, _render({"f": f.text, "g": g.text, "verdict": verdict}, fmt))
    else:
        m = mean_from_args(args)
        report = check_mean_properties(m, args.seed, args.trials, _tolerance(args, 1e-9))
        data = {"mean": m.label, **report.to_dict()}
        if fmt != "json":
            data.pop("counterexamples")
        _emit(args, _render(data, fmt))
    return EXIT_OK


COMMANDS = {"mean": cmd_mean, "hardy": cmd_hardy, "verify": cmd_verify, "analyze": cmd_analyze}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ExpressionSyntaxError as exc:
        print(f"hardy-means: {exc}\n{exc.caret()}", file=sys.stderr)
    except (UsageError, HardyMeansError, ValueError) as exc:
        print(f"hardy-means: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
