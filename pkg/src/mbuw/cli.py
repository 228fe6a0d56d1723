"""Command-line interface: ``mbuw {fit,reproduce,curves,moments,sample,eval}``.

Exit status is 0 on success, 1 on input errors and 2 when an optimizer fails
to converge.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager

import numpy as np

from . import datasets
from .distributions import (
    CoreParam,
    ModelKind,
    ShapeParams,
    competitor_cdf,
    competitor_log_pdf,
    competitor_quantile,
    core,
    hazard,
    mbuw_cdf,
    mbuw_log_pdf,
    mbuw_pdf,
    mbuw_quantile,
    moment_summary,
    reversed_hazard,
    survival,
)
from .estimation import fit, fit_core
from .exceptions import DataError, DomainError, HazardOverflowError, QuadratureError
from .gof import gof_report
from .reproduction import render_tables, reproduce, rows_to_csv

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED = 0, 1, 2
CURVE_EPS = 1e-6
FUNCTIONS = ("pdf", "logpdf", "cdf", "sf", "hr", "rhr", "quantile")


class _InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage mistakes are input errors, not argparse's default status 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _json_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def to_json(value, indent: int = 0) -> str:
    """JSON with insertion-ordered keys and floats at 17 significant digits."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _json_float(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f'{inner}{to_json(str(k))}: {to_json(v, indent + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        seq = list(value)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(to_json(v) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + to_json(v, indent + 1) for v in seq) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _num(x: float) -> str:
    return "nan" if math.isnan(x) else format(float(x), ".17g")


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


# ---------------------------------------------------------------------------
# parameter handling
# ---------------------------------------------------------------------------


def _theta(args) -> tuple[ModelKind, tuple[float, ...] | None, float | None]:
    """Return ``(kind, theta, core_a)``; ``core_a`` is set for MBUW/MBUR."""
    kind = ModelKind.parse(args.dist)
    core_a = getattr(args, "core_a", None)
    if kind is ModelKind.MBUW:
        if core_a is not None:
            if args.alpha is not None or args.beta is not None:
                raise _InputError("give either --core-a or --alpha/--beta, not both")
            return kind, None, CoreParam(core_a).a
        if args.alpha is None or args.beta is None:
            raise _InputError("mbuw needs --alpha and --beta, or --core-a")
        return kind, (args.alpha, args.beta), core(ShapeParams(args.alpha, args.beta)).a
    if core_a is not None:
        raise _InputError("--core-a only applies to mbuw")
    if kind is ModelKind.MBUR:
        if args.alpha is None:
            raise _InputError("mbur needs --alpha")
        return kind, (args.alpha,), core(ShapeParams(args.alpha, 2.0)).a
    if kind in (ModelKind.BETA, ModelKind.KUMARASWAMY):
        if args.alpha is None or args.beta is None:
            raise _InputError(f"{kind.value} needs --alpha and --beta")
        return kind, (args.alpha, args.beta), None
    if args.theta is None:
        raise _InputError(f"{kind.value} needs --theta")
    return kind, (args.theta,), None


def _evaluate(kind, theta, core_a, fn: str, x):
    if core_a is not None:
        table = {
            "pdf": mbuw_pdf,
            "logpdf": mbuw_log_pdf,
            "cdf": mbuw_cdf,
            "sf": survival,
            "hr": hazard,
            "rhr": reversed_hazard,
            "quantile": mbuw_quantile,
        }
        return table[fn](core_a, x)
    if fn == "pdf":
        return np.exp(competitor_log_pdf(kind, theta, x))
    if fn == "logpdf":
        return competitor_log_pdf(kind, theta, x)
    if fn == "quantile":
        return competitor_quantile(kind, theta, x)
    F = competitor_cdf(kind, theta, x)
    if fn == "cdf":
        return F
    f = np.exp(competitor_log_pdf(kind, theta, x))
    if fn == "sf":
        return 1.0 - F
    if fn == "hr":
        return f / (1.0 - F)
    return f / F


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _fit_payload(label, result, report):
    names = result.param_names
    payload = {
        "data": label,
        "model": result.kind.value,
        "parametrization": "core" if names == ("a",) else "natural",
        "n": report.n,
        "k": report.k,
        "converged": result.converged,
        "iterations": result.iterations,
        "estimates": dict(zip(names, result.estimates)),
    }
    if result.kind is ModelKind.MBUW and names != ("a",):
        payload["core_a"] = result.estimates[0] ** result.estimates[1]
    elif result.kind is ModelKind.MBUR:
        payload["core_a"] = result.estimates[0] ** 2
    payload["se_available"] = result.se_available
    payload["se"] = dict(zip(names, result.se)) if result.se else None
    payload["se_per_obs"] = dict(zip(names, result.se_per_obs)) if result.se_per_obs else None
    payload["ci95"] = {n: list(ci) for n, ci in zip(names, result.ci95)} if result.ci95 else None
    payload["hessian_condition"] = result.hessian_condition
    payload.update(
        loglik=result.loglik,
        nll=result.nll,
        ll_magnitude=report.ll_magnitude,
        aic=report.aic,
        aicc=report.aicc,
        bic=report.bic,
        hqic_standard=report.hqic_standard,
        hqic_paper=report.hqic_paper,
        ks_stat=report.ks_stat,
        ks_stat_upper=report.ks_stat_upper,
        ks_pvalue=report.ks_pvalue,
        reject_at_05=report.reject_at_05,
        warnings=list(report.warnings),
    )
    return payload


def _fit_text(p) -> str:
    lines = [
        f"model              {p['model']} ({p['parametrization']})",
        f"data               {p['data']} (n={p['n']})",
        f"converged          {'yes' if p['converged'] else 'NO'} after {p['iterations']} iterations",
        "",
        f"{'parameter':<10}{'estimate':>14}{'se':>14}{'se/sqrt(n)':>14}{'95% CI':>30}",
    ]
    for name, est in p["estimates"].items():
        if p["se"] is None:
            se = se_obs = ci = "unavailable"
        else:
            se = f"{p['se'][name]:.6g}"
            se_obs = f"{p['se_per_obs'][name]:.6g}"
            lo, hi = p["ci95"][name]
            ci = f"({lo:.6g}, {hi:.6g})"
        lines.append(f"{name:<10}{est:>14.6g}{se:>14}{se_obs:>14}{ci:>30}")
    if "core_a" in p:
        lines.append(f"{'a':<10}{p['core_a']:>14.6g}   (alpha ** beta)")
    lines.append("")
    rows = [
        ("log-likelihood", p["loglik"]),
        ("|log-likelihood|", p["ll_magnitude"]),
        ("AIC", p["aic"]),
        ("AICc", p["aicc"]),
        ("BIC", p["bic"]),
        ("HQIC", p["hqic_standard"]),
        ("HQIC (table form)", p["hqic_paper"]),
        ("K-S D", p["ks_stat"]),
        ("K-S D+", p["ks_stat_upper"]),
        ("K-S p-value", p["ks_pvalue"]),
        ("Hessian condition", p["hessian_condition"]),
    ]
    lines.extend(f"{label:<19}{value:.6g}" for label, value in rows)
    verdict = "reject" if p["reject_at_05"] else "fail to reject"
    lines.append(f"{'H0 at 5%':<19}{verdict}")
    lines.extend(f"warning: {w}" for w in p["warnings"])
    return "\n".join(lines) + "\n"


def cmd_fit(args) -> int:
    label, data = datasets.resolve(args.data)
    kind = ModelKind.parse(args.dist)
    if args.core:
        if kind is not ModelKind.MBUW:
            raise _InputError("--core only applies to mbuw")
        result = fit_core(data)
    else:
        result = fit(kind, data)
    report = gof_report(result, data)
    payload = _fit_payload(label, result, report)
    with _output(args.out) as fh:
        fh.write(to_json(payload) + "\n" if args.json else _fit_text(payload))
    if not result.converged:
        print(f"error: optimizer did not converge for {kind.value}", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_reproduce(args) -> int:
    try:
        rows = reproduce(args.scope)
    except KeyError as exc:
        raise _InputError(exc.args[0]) from None
    if args.json:
        payload = [
            {
                "dataset": r.dataset,
                "model": r.model.value,
                "estimates": dict(zip(r.fit.param_names, r.fit.estimates)),
                "ll_magnitude": r.report.ll_magnitude,
                "aic": r.report.aic,
                "aicc": r.report.aicc,
                "bic": r.report.bic,
                "hqic_paper": r.report.hqic_paper,
                "ks_stat": r.report.ks_stat,
                "ks_stat_upper": r.report.ks_stat_upper,
                "ks_pvalue": r.report.ks_pvalue,
                "reject_at_05": r.report.reject_at_05,
                "deltas": r.deltas,
                "notes": list(r.notes),
            }
            for r in rows
        ]
        text = to_json(payload) + "\n"
    elif args.csv == "-":
        text = rows_to_csv(rows)
    else:
        text = render_tables(rows)
    with _output(args.out) as fh:
        fh.write(text)
    if args.csv not in (None, "-"):
        with _output(args.csv) as fh:
            fh.write(rows_to_csv(rows))
    if not all(r.fit.converged for r in rows):
        print("error: at least one fit did not converge (see the converged column)", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise _InputError(f"cannot parse {text!r} as a comma-separated list of numbers") from None
    if not values:
        raise _InputError("empty list")
    return values


def _curve_column(a: float, fn: str, grid: np.ndarray) -> np.ndarray:
    if fn != "hr":
        return np.asarray(_evaluate(None, None, a, fn, grid), dtype=float)
    out = np.empty_like(grid)
    for i, y in enumerate(grid):
        try:
            out[i] = hazard(a, y)
        except HazardOverflowError:
            out[i] = math.inf
    return out


def cmd_curves(args) -> int:
    kind = ModelKind.parse(args.dist)
    if kind not in (ModelKind.MBUW, ModelKind.MBUR):
        raise _InputError("curves supports mbuw and mbur")
    if args.grid_size < 2:
        raise _InputError("--grid-size must be at least 2")
    if args.fn == "quantile":
        raise _InputError("curves evaluates pdf, logpdf, cdf, sf, hr or rhr")
    if args.core_a is not None:
        labels = [f"a={_num(a)}" for a in _float_list(args.core_a)]
        cores = [CoreParam(a).a for a in _float_list(args.core_a)]
    else:
        alphas = _float_list(args.alphas)
        beta = 2.0 if kind is ModelKind.MBUR else args.beta
        if beta is None:
            raise _InputError("mbuw curves need --beta (or --core-a)")
        labels = [f"alpha={_num(x)}" for x in alphas]
        cores = [core(ShapeParams(x, beta)).a for x in alphas]
    grid = np.linspace(CURVE_EPS, 1.0 - CURVE_EPS, args.grid_size)
    columns = [_curve_column(a, args.fn, grid) for a in cores]
    with _output(args.out) as fh:
        fh.write(",".join(["y", *labels]) + "\n")
        for i, y in enumerate(grid):
            fh.write(",".join([_num(y), *(_num(c[i]) for c in columns)]) + "\n")
    return EXIT_OK


def cmd_moments(args) -> int:
    if args.steps < 1:
        raise _InputError("--steps must be at least 1")
    if args.alpha_to < args.alpha_from:
        raise _InputError("--alpha-to must not be below --alpha-from")
    beta = args.beta
    alphas = np.linspace(args.alpha_from, args.alpha_to, args.steps) if args.steps > 1 else [args.alpha_from]
    rows = []
    for alpha in alphas:
        a = core(ShapeParams(float(alpha), beta)).a
        m = moment_summary(a)
        rows.append((float(alpha), a, m.mean, m.variance, m.skewness, m.kurtosis, m.cv))
    with _output(args.out) as fh:
        if args.json:
            keys = ("alpha", "a", "mean", "variance", "skewness", "kurtosis", "cv")
            fh.write(to_json([dict(zip(keys, r)) for r in rows]) + "\n")
        else:
            fh.write("alpha,a,mean,variance,skewness,kurtosis,cv\n")
            for r in rows:
                fh.write(",".join(_num(v) for v in r) + "\n")
    return EXIT_OK


def cmd_sample(args) -> int:
    kind, theta, core_a = _theta(args)
    if args.n < 1:
        raise _InputError("--n must be at least 1")
    u = np.random.Generator(np.random.PCG64(args.seed)).random(args.n)
    values = _evaluate(kind, theta, core_a, "quantile", u)
    with _output(args.out) as fh:
        if args.json:
            fh.write(to_json({"model": kind.value, "seed": args.seed, "values": list(map(float, values))}) + "\n")
        else:
            fh.writelines(f"{_num(v)}\n" for v in np.atleast_1d(values))
    return EXIT_OK


def cmd_eval(args) -> int:
    kind, theta, core_a = _theta(args)
    value = float(_evaluate(kind, theta, core_a, args.fn, args.at))
    with _output(args.out) as fh:
        if args.json:
            fh.write(to_json({"model": kind.value, "fn": args.fn, "at": args.at, "value": value}) + "\n")
        else:
            fh.write(_num(value) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_params(p):
    p.add_argument("--dist", required=True, help="model kind, e.g. mbuw, mbur, beta")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--theta", type=float, help="parameter of topp-leone and unit-lindley")
    p.add_argument("--core-a", type=float, help="mbuw only: a = alpha ** beta directly")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text/CSV")
    common.add_argument("--out", help="write output to this file instead of standard output")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")

    parser = _Parser(prog="mbuw", description="Median-based unit Weibull toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", parents=[common], help="fit a model to data")
    p.add_argument("--data", required=True, help="builtin:<id> or a file path")
    p.add_argument("--dist", required=True)
    p.add_argument("--core", action="store_true", help="fit mbuw in a = alpha ** beta")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("reproduce", parents=[common], help="re-fit the bundled comparison tables")
    p.add_argument("scope", nargs="?", default="all", help="dataset 1-6, dataset id, or all")
    p.add_argument("--csv", help="also write the CSV here ('-' prints only the CSV)")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("curves", parents=[common], help="CSV of a function over a y-grid")
    p.add_argument("--dist", default="mbuw")
    p.add_argument("--fn", choices=FUNCTIONS, default="pdf")
    p.add_argument("--alphas", default="1")
    p.add_argument("--beta", type=float)
    p.add_argument("--core-a", help="comma-separated core values instead of --alphas")
    p.add_argument("--grid-size", type=int, default=101)
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("moments", parents=[common], help="moment summaries over an alpha range")
    p.add_argument("--alpha-from", type=float, default=0.1)
    p.add_argument("--alpha-to", type=float, default=6.0)
    p.add_argument("--steps", type=int, default=60)
    p.add_argument("--beta", type=float, default=0.1)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("sample", parents=[common], help="inverse-transform random draws")
    _add_params(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("eval", parents=[common], help="evaluate one function at one point")
    _add_params(p)
    p.add_argument("--fn", choices=FUNCTIONS, required=True)
    p.add_argument("--at", type=float, required=True)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (_InputError, DataError, DomainError, HazardOverflowError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
