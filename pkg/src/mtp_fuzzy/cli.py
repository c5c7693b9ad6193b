"""``mtp-fuzzy`` command line.

Exit codes: 0 success, 2 usage or parse error, 3 no match / empty result,
4 training divergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import baselines
from .datasets import FIXTURES, Dataset, load_dataset, load_fixture
from .errors import (
    DegenerateDistanceError,
    DegenerateWeightsError,
    EmptyResultError,
    FuzzyError,
    TrainingDivergedError,
)
from .experiments import PartitionSpec, run_experiment, write_report_bundle
from .inference import CrispObservation, DeltaMap, IndexMap, StructuredObservation, fmp_infer, fmt_infer
from .mamdani import mamdani_mtp_infer
from .pisigma import GATINGS, TrainConfig
from .rulebase import METHODS, read_json, rulebase_from_json, single_rule_from_json
from .sets import EMPTY, TriangularSet, centroid_defuzzify, default_grid, sample
from .takagi_sugeno import ts_mtp_infer

EXIT_OK, EXIT_USAGE, EXIT_NO_MATCH, EXIT_DIVERGED = 0, 2, 3, 4

LEVELS = {"precipitation": 6, "security": 3}
QUICK_ITERATIONS = 2000

# acceptance bands for the two reproduction runs
BANDS = {
    "precipitation": {"mtp_max_error": 12.0, "mtp_beats_sugeno": True, "min_speed_ratio": 1.5},
    "security": {"mtp_max_error": 6.0, "sugeno_max_error": 6.0, "min_speed_ratio": 1.0},
}


class UsageError(Exception):
    pass


def _emit(doc):
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _bool(text):
    t = text.strip().lower()
    if t in ("true", "1", "yes", "not"):
        return True
    if t in ("false", "0", "no", ""):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def parse_observation(text):
    """``-1.2`` for a crisp value, ``shift,exponent,negated`` for a hedged set."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return CrispObservation(float(parts[0]))
        if len(parts) == 3:
            return StructuredObservation(float(parts[0]), float(parts[1]), _bool(parts[2]))
    except ValueError as exc:
        raise UsageError(f"bad observation {text!r}: {exc}") from None
    raise UsageError(f"observation must be a number or shift,exponent,negated; got {text!r}")


def cmd_infer(args) -> int:
    doc = read_json(args.rule)
    rule, universe = single_rule_from_json(doc)
    obs = parse_observation(args.observe)
    dmap = DeltaMap(args.map, args.k)
    imap = IndexMap(args.m)
    infer = fmp_infer if args.mode == "fmp" else fmt_infer
    source = rule.antecedent if args.mode == "fmp" else rule.consequent
    result = infer(rule, obs, dmap, imap)
    if isinstance(obs, CrispObservation):
        delta = obs.value - source.center
    else:
        delta = obs.shift
    if result is EMPTY:
        _emit({"status": "no_match", "mode": args.mode, "delta": delta,
               "reason": "observation and rule set do not overlap"})
        return EXIT_NO_MATCH

    base = result.base
    centroid = None
    if universe is not None:
        centroid = centroid_defuzzify(sample(result, universe[0], universe[1]))
    elif result.support is not None:
        centroid = centroid_defuzzify(sample(result, *default_grid([result])[:2]))
    support = result.support
    _emit({
        "status": "ok",
        "mode": args.mode,
        "delta": delta,
        "shift": result.shift,
        "exponent": result.exponent,
        "negated": result.negated,
        "result": {
            "base": {"left": base.left, "center": base.center, "right": base.right},
            "peak": result.peak,
            "support": list(support) if support is not None else None,
        },
        "centroid": centroid,
    })
    return EXIT_OK


def _read_inputs(path, arity):
    text = Path(path).read_text(encoding="utf-8")
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise UsageError(f"{path}: empty input file")
    header = [h.strip() for h in rows[0]]
    has_label = header[0] == "label"
    names = header[1:] if has_label else header
    if len(names) != arity:
        raise UsageError(f"{path}: {len(names)} input columns, rule base expects {arity}")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise UsageError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        label = row[0].strip() if has_label else str(lineno - 1)
        try:
            xs = [float(v) for v in (row[1:] if has_label else row)]
        except ValueError as exc:
            raise UsageError(f"{path}: line {lineno}: {exc}") from None
        out.append((label, xs))
    if not out:
        raise UsageError(f"{path}: no input rows")
    return names, out


def _evaluate(method, system, xs):
    if method == "mamdani_mtp":
        return mamdani_mtp_infer(system, xs).crisp
    if method == "mamdani_classic":
        return baselines.mamdani_classic_infer(system, xs).crisp
    if method == "ts_mtp":
        return ts_mtp_infer(system, xs)
    if method == "sugeno":
        return baselines.sugeno_infer(system, xs)
    # crisp inputs stand in for input sets centered on them
    return baselines.wang_distance_infer(system.rules, [TriangularSet(x, 1.0, 1.0) for x in xs])


def cmd_eval(args) -> int:
    method, system = rulebase_from_json(read_json(args.rulebase), args.method)
    names, rows = _read_inputs(args.inputs, system.arity)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    missed = 0
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["label", *names, "output", "status"])
        for label, xs in rows:
            try:
                y, status = repr(float(_evaluate(method, system, xs))), "ok"
            except (EmptyResultError, DegenerateWeightsError, DegenerateDistanceError):
                y, status = "", "no_match"
                missed += 1
            w.writerow([label, *[repr(x) for x in xs], y, status])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_NO_MATCH if missed else EXIT_OK


def _dataset(name, data_dir=None) -> Dataset:
    if data_dir is not None:
        filename, arity = FIXTURES[name]
        path = Path(data_dir) / filename
        if not path.is_file():
            raise UsageError(f"missing dataset file {path}")
        return load_dataset(path, arity)
    if name in FIXTURES:
        return load_fixture(name)
    path = Path(name)
    if not path.is_file():
        raise UsageError(f"unknown dataset {name!r}: not a fixture name or a file")
    return load_dataset(path)


def _config(args, iterations=None) -> TrainConfig:
    return TrainConfig(
        learning_rate=args.eta,
        epsilon=args.epsilon,
        support_factor=args.kappa,
        iterations=args.iterations if iterations is None else iterations,
        seed=args.seed,
    )


def cmd_train(args) -> int:
    data = _dataset(args.dataset)
    levels = args.levels if args.levels is not None else LEVELS.get(data.name)
    if levels is None:
        raise UsageError("--levels is required for a dataset file")
    spec = PartitionSpec(levels)
    methods = GATINGS if args.gating == "both" else (args.gating,)
    reports = run_experiment(data, spec, methods, _config(args), timing_repeats=args.repeats)
    write_report_bundle(reports, args.output_dir)
    _emit({"status": "ok", "reports": [r.summary for r in reports]})
    return EXIT_OK


def check_bands(name, reports) -> dict:
    s = {r.method: r.summary for r in reports}
    mtp, sug = s["mtp_movement"], s["sugeno_product"]
    band = BANDS[name]
    checks = {
        "mtp_error": mtp["final_error_percent"] <= band["mtp_max_error"],
        "speed_ratio": mtp["speed_ratio"] > band["min_speed_ratio"],
        "traces": mtp["trace_ok"] and sug["trace_ok"],
    }
    if "sugeno_max_error" in band:
        checks["sugeno_error"] = sug["final_error_percent"] <= band["sugeno_max_error"]
    if band.get("mtp_beats_sugeno"):
        checks["mtp_beats_sugeno"] = sug["final_error_percent"] > mtp["final_error_percent"]
    return {
        "mtp_error_percent": mtp["final_error_percent"],
        "sugeno_error_percent": sug["final_error_percent"],
        "speed_ratio": mtp["speed_ratio"],
        "checks": checks,
        "passed": all(checks.values()),
    }


def cmd_reproduce(args) -> int:
    iterations = min(args.iterations, QUICK_ITERATIONS) if args.quick else args.iterations
    cfg = _config(args, iterations)
    datasets = {name: _dataset(name, args.data_dir) for name in LEVELS}
    summary = {"iterations": iterations, "seed": args.seed, "quick": args.quick, "datasets": {}}
    out = Path(args.output_dir)
    for name, data in datasets.items():
        reports = run_experiment(data, PartitionSpec(LEVELS[name]), GATINGS, cfg,
                                 timing_repeats=args.repeats, threads=args.threads)
        write_report_bundle(reports, out)
        summary["datasets"][name] = check_bands(name, reports)
    summary["passed"] = all(d["passed"] for d in summary["datasets"].values())
    out.mkdir(parents=True, exist_ok=True)
    (out / "acceptance_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _emit(summary)
    return EXIT_OK


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _add_train_flags(p, iterations=32670):
    p.add_argument("--eta", type=float, default=0.05, help="learning rate")
    p.add_argument("--epsilon", type=float, default=0.1, help="rule activation threshold")
    p.add_argument("--kappa", type=float, default=3.0, help="support factor in standard deviations")
    p.add_argument("--iterations", type=int, default=iterations, help="full passes over the data")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=_positive_int, default=3, help="timing repeats (median is kept)")
    p.add_argument("--output-dir", default="reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mtp-fuzzy", description="Movement-based fuzzy inference and training.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="single-rule FMP / FMT")
    p.add_argument("--rule", required=True, help="rule JSON file")
    p.add_argument("--observe", required=True, help="crisp value or shift,exponent,negated")
    p.add_argument("--k", type=float, default=1.0, help="movement map parameter")
    p.add_argument("--m", type=float, default=1.0, help="transformation index multiplier")
    p.add_argument("--map", choices=("linear", "power"), default="linear")
    p.add_argument("--mode", choices=("fmp", "fmt"), default="fmp")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("eval", help="run a rule base over a CSV of inputs")
    p.add_argument("--rulebase", required=True)
    p.add_argument("--inputs", required=True, help="CSV with header [label,]x1,...,xs")
    p.add_argument("--method", choices=METHODS, help="overrides the rule base's method field")
    p.add_argument("--output", help="output CSV (default: standard output)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("train", help="train the pi-sigma network")
    p.add_argument("--dataset", default="precipitation", help="fixture name or CSV path")
    p.add_argument("--levels", type=int, help="fuzzy sets per input")
    p.add_argument("--gating", choices=(*GATINGS, "both"), default="both")
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("reproduce", help="run both experiments with both gatings")
    p.add_argument("--quick", action="store_true", help=f"cap iterations at {QUICK_ITERATIONS}")
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--data-dir", help="directory holding precipitation.csv and security.csv")
    _add_train_flags(p)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except TrainingDivergedError as exc:
        print(f"mtp-fuzzy: training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except EmptyResultError as exc:
        _emit({"status": "no_match", "reason": str(exc)})
        return EXIT_NO_MATCH
    except (UsageError, FuzzyError, ValueError, OSError, KeyError) as exc:
        print(f"mtp-fuzzy: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
