"""Command-line front end: exact oracles, series, Monte Carlo, asymptotics.

Commands mirror the library: ``exact`` (enumeration-backed probabilities),
``series`` (functional-equation coefficients with oracle cross-checks),
``mc`` (seeded collision estimates), ``asym`` (asymptotic constants with
paper targets enforced as exit-code contracts) and ``plane-decay`` (the
exact subexponential-decay table). Every run prints its fully resolved
configuration next to the results; JSON output follows the schemas in
``treeiso.schemas``.

Exit codes: 0 ok, 2 tolerance breach, 3 resource ceiling, 4 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

from . import schemas
from .asymptotics import (
    AsymConfig,
    SolverError,
    aut_clt_constants,
    labeled_constants,
    leaf_mean_constant,
    logweight_clt_constants,
    solve_degree_series,
    solve_polya_series,
    unary_binary_constants,
)
from .fields import RATIONAL
from .samplers import MCEstimate, RngSpec, UnreachableSizeError, mc_iso_probability
from .trees import (
    CeilingError,
    DegreeModel,
    DegreeViolationError,
    aut_power_sum,
    class_weight_power_sum,
    enumerate_polya,
    exact_p_gw,
    exact_p_labeled,
    plane_decay_table,
    polya_class_count,
)

EXIT_OK = 0
EXIT_TOLERANCE = 2
EXIT_CEILING = 3
EXIT_INVALID = 4

ENV_PRECISION = "TREEISO_PRECISION_BITS"

# paper-reported values and the tolerances enforced by `asym`
PAPER_TARGETS = {
    "labeled_A": (2.397678, 1e-4),
    "labeled_c_l": (0.354379, 1e-5),
    "ub_C": (1.279101, 1e-4),
    "ub_delta": (0.412681, 1e-5),
    "leaf_mu": (0.340252, 1e-4),
    "leaf_baseline": (math.exp(-1), 1e-6),
    "logweight_ub_mu": (0.176278, 1e-4),
    "logweight_ub_sigma2": (0.025865, 1e-3),
    "logweight_binary121_mu": (0.444518, 1e-4),
    "logweight_binary121_sigma2": (0.072413, 1e-3),
    "aut_mu": (0.137342, 1e-3),
    "aut_sigma2": (0.196770, 1e-3),
}


class CliError(ValueError):
    """Invalid command-line input (exit code 4)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise CliError(message)


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"not a rational literal: {text!r}") from exc


def _model_from_args(args) -> tuple[str, DegreeModel | None]:
    name = args.model
    if name == "labeled":
        return "labeled", None
    if name == "plane":
        return "plane", DegreeModel.plane()
    if name == "ub":
        return "ub", DegreeModel.unary_binary()
    if name == "binary121":
        return "binary121", DegreeModel.binary_121()
    if name == "binary02":
        return "binary02", DegreeModel.binary_02()
    if name == "custom":
        if not args.D or not args.w:
            raise CliError("custom models need --D and --w")
        degrees = [int(d) for d in args.D.split(",")]
        weights = [_parse_fraction(w) for w in args.w.split(",")]
        if len(degrees) != len(weights):
            raise CliError("--D and --w must have the same length")
        wlist: list[Fraction] = [Fraction(0)] * (max(degrees) + 1)
        for d, w in zip(degrees, weights):
            wlist[d] = w
        return "custom", DegreeModel.from_weights(wlist)
    raise CliError(f"unknown model {name!r}")


def _digits(args) -> int:
    return args.digits


def _decimal(value: Fraction, digits: int) -> str:
    import mpmath as mp

    with mp.workprec(int(digits * 3.5) + 32):
        return mp.nstr(mp.mpf(value.numerator) / value.denominator, digits)


def _resolved_config(args, command: str, tag: str | None, model: DegreeModel | None) -> dict:
    cfg = {
        "command": command,
        "model": tag,
        "degrees": sorted(model.degrees) if model is not None and model.degrees is not None else None,
        "weights": [str(w) for _d, w in model.weights] if model is not None and model.degrees is not None else None,
        "n": getattr(args, "n", None),
        "n_max": getattr(args, "n_max", None),
        "order": getattr(args, "order", None),
        "t": str(getattr(args, "t", None)) if getattr(args, "t", None) is not None else None,
        "precision_bits": getattr(args, "precision", None),
        "seed": getattr(args, "seed", None),
        "stream": getattr(args, "stream", None),
        "samples": getattr(args, "samples", None),
        "workers": getattr(args, "workers", None),
        "format": args.format,
        "digits": getattr(args, "digits", None),
        "strict": getattr(args, "strict", None),
        "ceiling": getattr(args, "ceiling", None),
        "which": getattr(args, "which", None),
        "fd_step": str(getattr(args, "fd_step", None)) if getattr(args, "fd_step", None) is not None else None,
        "stability": getattr(args, "stability", None),
    }
    return cfg


def _emit(args, config: dict, results, csv_rows: tuple[list[str], list[list]] | None) -> None:
    if args.format == "json":
        text = json.dumps({"config": config, "results": results}, indent=2, sort_keys=True)
    else:
        buf = io.StringIO()
        for key in sorted(config):
            if config[key] is not None:
                buf.write(f"# {key}={config[key]}\n")
        writer = csv.writer(buf)
        header, rows = csv_rows
        writer.writerow(header)
        writer.writerows(rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _parse_n_range(args) -> list[int]:
    if args.n is None:
        raise CliError("--n is required")
    text = str(args.n)
    if "-" in text and not text.startswith("-"):
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_exact(args) -> int:
    tag, model = _model_from_args(args)
    ns = _parse_n_range(args)
    digits = _digits(args)
    results = []
    rows = []
    for n in ns:
        if tag == "labeled":
            p = exact_p_labeled(n, ceiling=args.ceiling)
        else:
            p = exact_p_gw(n, model, ceiling=args.ceiling)
        classes = polya_class_count(n, model.degrees if model is not None else None, ceiling=args.ceiling)
        entry = {
            "n": n,
            "model": tag,
            "probability": str(p),
            "probability_decimal": _decimal(p, digits),
            "digits": digits,
            "classes": classes,
        }
        results.append(entry)
        rows.append([n, tag, str(p), entry["probability_decimal"], digits, classes])
    if args.dump_classes:
        _dump_classes(args.dump_classes, ns, model)
    config = _resolved_config(args, "exact", tag, model)
    _emit(args, config, results, (["n", "model", "probability", "probability_decimal", "digits", "classes"], rows))
    return EXIT_OK


def _dump_classes(path: str, ns: list[int], model: DegreeModel | None) -> None:
    model = model or DegreeModel.plane()
    as_csv = path.endswith(".csv")
    with open(path, "w") as fh:
        writer = csv.writer(fh) if as_csv else None
        if writer:
            writer.writerow(["code_hex", "n", "aut", "pr", "weight_num", "weight_den"])
        for n in ns:
            for rec in enumerate_polya(n, model):
                if writer:
                    writer.writerow([rec.code.hex(), rec.n, rec.aut, rec.pr, rec.weight.numerator, rec.weight.denominator])
                else:
                    fh.write(
                        json.dumps(
                            {
                                "code_hex": rec.code.hex(),
                                "n": rec.n,
                                "aut": str(rec.aut),
                                "pr": str(rec.pr),
                                "weight_num": str(rec.weight.numerator),
                                "weight_den": str(rec.weight.denominator),
                            }
                        )
                        + "\n"
                    )


def cmd_series(args) -> int:
    t = _parse_fraction(args.t)
    order = args.order
    family = args.family
    if family == "polya":
        series = solve_polya_series(t, order, RATIONAL)
        model = None
    else:
        fake = argparse.Namespace(model=family, D=args.D, w=args.w)
        tag, model = _model_from_args(fake)
        if model is None or model.unbounded:
            raise CliError("series families need a finite degree model (or 'polya')")
        series = solve_degree_series(model, t, order, RATIONAL)
    coeffs = [str(series[k]) for k in range(order + 1)]

    oracle_to = None
    oracle_match = None
    if args.check and t.denominator == 1 and t >= 0:
        oracle_to = min(order, args.check_to)
        oracle_match = True
        ti = int(t)
        for n in range(1, oracle_to + 1):
            if family == "polya":
                expected = aut_power_sum(n, ti)
            else:
                expected = class_weight_power_sum(n, model, ti)
            if series[n] != expected:
                oracle_match = False
                break

    results = {
        "family": family,
        "t": str(t),
        "order": order,
        "coefficients": coeffs,
        "oracle_checked_to": oracle_to,
        "oracle_match": oracle_match,
    }
    config = _resolved_config(args, "series", family, model)
    rows = [[k, coeffs[k]] for k in range(order + 1)]
    _emit(args, config, results, (["k", "coefficient"], rows))
    if oracle_match is False:
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_mc(args) -> int:
    tag, model = _model_from_args(args)
    ns = _parse_n_range(args)
    results = []
    rows = []
    strict_fail = False
    for n in ns:
        est = mc_iso_probability(
            n,
            tag if model is None else model,
            args.samples,
            RngSpec(args.seed, args.stream),
            ci_method=args.ci,
            workers=args.workers,
        )
        entry = est.to_json_dict()
        entry["model"] = tag
        exact = None
        if args.compare_exact:
            try:
                exact = exact_p_labeled(n) if tag == "labeled" else exact_p_gw(n, model)
            except CeilingError:
                exact = None
        if exact is not None:
            entry["exact"] = str(exact)
            entry["exact_in_ci"] = bool(est.ci_low <= float(exact) <= est.ci_high)
            if args.strict and not entry["exact_in_ci"]:
                strict_fail = True
        else:
            entry["exact"] = None
            entry["exact_in_ci"] = None
        results.append(entry)
        rows.append([entry[k] for k in ("n", "model", "estimate", "ci_low", "ci_high", "samples", "hits", "seed", "stream", "method")])
    config = _resolved_config(args, "mc", tag, model)
    _emit(args, config, results, (["n", "model", "estimate", "ci_low", "ci_high", "samples", "hits", "seed", "stream", "method"], rows))
    return EXIT_TOLERANCE if strict_fail else EXIT_OK


def _asym_entry(name: str, value: float, diagnostics: dict) -> dict:
    target = PAPER_TARGETS.get(name)
    entry = {"name": name, "value": value, "diagnostics": diagnostics}
    if target is not None:
        ref, tol = target
        entry["paper_target"] = ref
        entry["abs_deviation"] = abs(value - ref)
        entry["tolerance"] = tol
        entry["within_tolerance"] = abs(value - ref) <= tol
    else:
        entry["paper_target"] = None
        entry["abs_deviation"] = None
        entry["tolerance"] = None
        entry["within_tolerance"] = None
    return entry


def cmd_asym(args) -> int:
    cfg = AsymConfig(
        order=args.order,
        prec_bits=args.precision,
        fd_step=_parse_fraction(args.fd_step),
    )
    which = args.which
    entries: list[dict] = []
    if which in ("labeled", "all"):
        lc = labeled_constants(cfg, stability=args.stability)
        entries.append(_asym_entry("labeled_A", lc.A, lc.diagnostics))
        entries.append(_asym_entry("labeled_c_l", lc.c_l, {}))
    if which in ("ub", "all"):
        ub = unary_binary_constants(cfg, stability=args.stability)
        entries.append(_asym_entry("ub_C", ub.C, ub.diagnostics))
        entries.append(_asym_entry("ub_delta", ub.delta, {}))
    if which in ("leaf", "all"):
        leaf = leaf_mean_constant(cfg, stability=args.stability)
        entries.append(_asym_entry("leaf_mu", leaf.mu, leaf.diagnostics))
        entries.append(_asym_entry("leaf_baseline", leaf.baseline_unconditioned, {}))
    if which in ("logweight", "all"):
        models = []
        if which == "all":
            models = [("ub", DegreeModel.unary_binary()), ("binary121", DegreeModel.binary_121())]
        else:
            tag, model = _model_from_args(args)
            if model is None or model.unbounded:
                raise CliError("logweight constants need a finite degree model")
            models = [(tag, model)]
        for tag, model in models:
            clt = logweight_clt_constants(model, cfg, stability=args.stability)
            entries.append(_asym_entry(f"logweight_{tag}_mu", clt.mu, clt.diagnostics))
            entries.append(_asym_entry(f"logweight_{tag}_sigma2", clt.sigma2, {}))
    if which in ("aut", "all"):
        aut = aut_clt_constants(cfg, stability=args.stability)
        entries.append(_asym_entry("aut_mu", aut.mu, aut.diagnostics))
        entries.append(_asym_entry("aut_sigma2", aut.sigma2, {}))
    if not entries:
        raise CliError(f"nothing to compute for --which {which!r}")

    tag = getattr(args, "model", None)
    config = _resolved_config(args, "asym", tag, None)
    rows = [
        [e["name"], e["value"], e["paper_target"], e["abs_deviation"], e["tolerance"], e["within_tolerance"]]
        for e in entries
    ]
    _emit(args, config, entries, (["name", "value", "paper_target", "abs_deviation", "tolerance", "within_tolerance"], rows))
    breached = any(e["within_tolerance"] is False for e in entries)
    return EXIT_TOLERANCE if breached else EXIT_OK


def cmd_plane_decay(args) -> int:
    digits = _digits(args)
    table = plane_decay_table(args.n_max, ceiling=args.ceiling)
    results = []
    rows = []
    for row in table:
        from .trees import catalan_number

        entry = {
            "n": row.n,
            "q_exact": str(row.q_exact),
            "q_decimal": _decimal(row.q_exact, digits),
            "rate": row.rate,
            "plane_trees": str(catalan_number(row.n - 1)),
        }
        results.append(entry)
        rows.append([row.n, entry["q_exact"], entry["q_decimal"], row.rate, entry["plane_trees"]])
    config = _resolved_config(args, "plane-decay", "plane", DegreeModel.plane())
    _emit(args, config, results, (["n", "q_exact", "q_decimal", "rate", "plane_trees"], rows))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    default_prec = int(os.environ.get(ENV_PRECISION, "192"))
    p = _Parser(prog="treeiso", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, model=True):
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--digits", type=int, default=12, help="decimal digits in renderings")
        if model:
            sp.add_argument("--model", default="labeled", choices=["labeled", "plane", "ub", "binary121", "binary02", "custom"])
            sp.add_argument("--D", default=None, help="custom degree list, e.g. 0,1,2")
            sp.add_argument("--w", default=None, help="custom rational weights, e.g. 1,1,1/2")

    sp = sub.add_parser("exact", help="exact collision probabilities from enumeration")
    add_common(sp)
    sp.add_argument("--n", required=True, help="size or inclusive range lo-hi")
    sp.add_argument("--ceiling", type=int, default=None, help="override the enumeration ceiling")
    sp.add_argument("--dump-classes", default=None, help="write per-class records (.jsonl or .csv)")
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("series", help="functional-equation coefficients")
    sp.add_argument("--family", default="polya", help="polya | ub | binary121 | binary02 | custom")
    sp.add_argument("--t", default="2", help="rational parameter t, e.g. 2 or 1/2")
    sp.add_argument("--order", type=int, default=16)
    sp.add_argument("--D", default=None)
    sp.add_argument("--w", default=None)
    sp.add_argument("--check", action=argparse.BooleanOptionalAction, default=True, help="verify against enumeration")
    sp.add_argument("--check-to", type=int, default=10)
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--out", default=None)
    sp.add_argument("--digits", type=int, default=12)
    sp.set_defaults(func=cmd_series)

    sp = sub.add_parser("mc", help="Monte Carlo collision estimates")
    add_common(sp)
    sp.add_argument("--n", required=True, help="size or inclusive range lo-hi")
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--ci", choices=["wilson", "normal"], default="wilson")
    sp.add_argument("--compare-exact", action=argparse.BooleanOptionalAction, default=True)
    sp.add_argument("--strict", action="store_true", help="exit 2 when the exact value misses the CI")
    sp.set_defaults(func=cmd_mc)

    sp = sub.add_parser("asym", help="asymptotic constants vs paper targets")
    sp.add_argument("--which", default="all", choices=["labeled", "ub", "leaf", "logweight", "aut", "all"])
    sp.add_argument("--model", default="ub", choices=["ub", "binary121", "custom"])
    sp.add_argument("--D", default=None)
    sp.add_argument("--w", default=None)
    sp.add_argument("--order", type=int, default=64)
    sp.add_argument("--precision", type=int, default=default_prec)
    sp.add_argument("--fd-step", default="1/1000")
    sp.add_argument("--stability", action=argparse.BooleanOptionalAction, default=False, help="order-doubling diagnostics")
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--out", default=None)
    sp.add_argument("--digits", type=int, default=12)
    sp.set_defaults(func=cmd_asym)

    sp = sub.add_parser("plane-decay", help="exact plane-tree collision decay table")
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--ceiling", type=int, default=None)
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--out", default=None)
    sp.add_argument("--digits", type=int, default=12)
    sp.set_defaults(func=cmd_plane_decay)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (DegreeViolationError, UnreachableSizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CeilingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CEILING
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
