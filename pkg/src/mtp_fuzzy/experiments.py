"""Training runs comparing movement-gated and Sugeno-gated networks.

Inputs are min-max scaled to [0, 1] per column and targets divided by their
largest magnitude before training.  The rule grid is built in scaled units,
and results are mapped back for the per-record tables.  Percentage errors do
not depend on the target scale.
"""

from __future__ import annotations

import json
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from itertools import product
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .datasets import Dataset
from .errors import FuzzyInputError, TrainingDivergedError
from .pisigma import GATINGS, FnnParams, TrainConfig, TrainTrace, fnn_train, predict

BASELINE = "sugeno_product"
WOBBLE = 0.10
RISING_RUN = 3


@dataclass(frozen=True)
class PartitionSpec:
    levels_per_input: int
    ranges: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self):
        if self.levels_per_input < 2:
            raise FuzzyInputError(f"need at least 2 levels per input, got {self.levels_per_input}")

    def resolve(self, data: Dataset) -> tuple[tuple[float, float], ...]:
        if self.ranges is not None:
            if len(self.ranges) != data.arity:
                raise FuzzyInputError(f"{len(self.ranges)} ranges for {data.arity} inputs")
            return tuple(self.ranges)
        X = data.inputs
        return tuple((float(lo), float(hi)) for lo, hi in zip(X.min(axis=0), X.max(axis=0)))


def build_rule_grid(
    spec: PartitionSpec, data: Dataset, seed: Optional[int] = None, jitter: float = 0.0
) -> tuple[FnnParams, int]:
    """Full grid of ``levels ** arity`` rules over the per-input ranges.

    Centers sit on evenly spaced partition points, widths equal the squared
    spacing, intercepts the mean target and slopes zero.  With ``jitter`` > 0
    the centers move by up to ``jitter * spacing`` (seeded).
    """
    levels = spec.levels_per_input
    ranges = spec.resolve(data)
    points = [np.linspace(lo, hi, levels) for lo, hi in ranges]
    spacing = np.array([(hi - lo) / (levels - 1) for lo, hi in ranges])
    # a constant column still needs a positive width
    spacing = np.where(spacing > 0, spacing, 1.0)

    combos = list(product(range(levels), repeat=data.arity))
    centers = np.array([[points[i][k] for i, k in enumerate(combo)] for combo in combos])
    if jitter > 0:
        rng = np.random.default_rng(seed)
        centers = centers + rng.uniform(-jitter, jitter, centers.shape) * spacing
    widths = np.tile(spacing**2, (len(combos), 1))
    coefficients = np.zeros((len(combos), data.arity + 1))
    coefficients[:, 0] = data.targets.mean()
    return FnnParams(centers, widths, coefficients), len(combos)


def estimate_signs(data: Dataset) -> tuple[int, ...]:
    """Per-input +1/-1 from the sign of the input-target correlation (0 read as +1)."""
    X, Y = data.inputs, data.targets
    signs = []
    for i in range(data.arity):
        cov = np.mean((X[:, i] - X[:, i].mean()) * (Y - Y.mean()))
        signs.append(-1 if cov < 0 else 1)
    return tuple(signs)


@dataclass(frozen=True)
class Scaler:
    lo: np.ndarray
    span: np.ndarray
    y_scale: float

    @classmethod
    def fit(cls, data: Dataset) -> "Scaler":
        X, Y = data.inputs, data.targets
        lo = X.min(axis=0)
        span = X.max(axis=0) - lo
        span = np.where(span > 0, span, 1.0)
        y_scale = float(np.abs(Y).max()) or 1.0
        return cls(lo, span, y_scale)

    def inputs(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.lo) / self.span

    def transform(self, data: Dataset) -> Dataset:
        return data.with_values(self.inputs(data.inputs), data.targets / self.y_scale)


class RecordResult(NamedTuple):
    label: str
    target: float
    result: float
    error: float


@dataclass
class RunReport:
    method: str
    trace: TrainTrace
    per_record: list[RecordResult]
    summary: dict = field(default_factory=dict)
    params: Optional[FnnParams] = None


def trace_checks(trace: TrainTrace, wobble: float = WOBBLE, run: int = RISING_RUN) -> dict:
    """Descent checks over the checkpoint errors.

    ``within_wobble`` holds when no checkpoint exceeds its predecessor by more
    than ``wobble`` (relative).  ``trace_ok`` fails only when the error rises
    strictly across ``run`` consecutive checkpoints.
    """
    e = [p.learning_error_percent for p in trace.points]
    within = all(b <= a * (1 + wobble) for a, b in zip(e, e[1:]))
    rising = 1
    longest = 1
    for a, b in zip(e, e[1:]):
        rising = rising + 1 if b > a else 1
        longest = max(longest, rising)
    return {"within_wobble": within, "longest_rising_run": longest, "trace_ok": longest < run}


def max_threads() -> int:
    raw = os.environ.get("MTP_FUZZY_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise FuzzyInputError(f"MTP_FUZZY_THREADS must be an integer, got {raw!r}") from None


def _train_timed(params, cfg, data, repeats):
    runs = []
    for _ in range(max(1, repeats)):
        runs.append(fnn_train(params, cfg, data))
    # training is deterministic; only the clock differs between repeats
    times = [t.final.wall_time_seconds for _, t in runs]
    median = statistics.median_low(times)
    return runs[times.index(median)]


def _run_method(method, dataset, scaled, scaler, params, cfg, repeats) -> RunReport:
    mcfg = replace(cfg, gating=method)
    try:
        trained, trace = _train_timed(params, mcfg, scaled, repeats)
    except TrainingDivergedError as exc:
        raise TrainingDivergedError(f"{method}: {exc}", exc.iteration) from exc
    results = predict(trained, mcfg, scaled.inputs) * scaler.y_scale
    per_record = [
        RecordResult(label, float(t), float(r), float(t - r))
        for label, t, r in zip(dataset.labels, dataset.targets, results)
    ]
    report = RunReport(method, trace, per_record, params=trained)
    report.summary = {
        "dataset": dataset.name,
        "method": method,
        "seed": cfg.seed,
        "rules": params.n_rules,
        "iterations": cfg.iterations,
        "final_error_percent": trace.final.learning_error_percent,
        "total_seconds": trace.final.wall_time_seconds,
        "skipped_samples": trace.skipped_samples,
        "config": asdict(mcfg),
        **trace_checks(trace),
    }
    return report


def run_experiment(
    dataset: Dataset,
    spec: PartitionSpec,
    methods: Sequence[str] = GATINGS,
    cfg: TrainConfig = TrainConfig(),
    timing_repeats: int = 3,
    threads: Optional[int] = None,
    jitter: float = 0.0,
) -> list[RunReport]:
    """Train every method from the same initial grid and compare.

    Each report's summary gets ``speed_ratio`` = baseline seconds / MTP
    seconds (1.0 when not defined).  ``threads`` > 1 trains methods
    concurrently, which makes the timings compete for cores.
    """
    for m in methods:
        if m not in GATINGS:
            raise FuzzyInputError(f"unknown method {m!r}; choose from {GATINGS}")
    scaler = Scaler.fit(dataset)
    scaled = scaler.transform(dataset)
    params, _ = build_rule_grid(spec, scaled, seed=cfg.seed, jitter=jitter)

    workers = min(len(methods), threads or 1, max_threads())
    args = [(m, dataset, scaled, scaler, params, cfg, timing_repeats) for m in methods]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            reports = list(pool.map(lambda a: _run_method(*a), args))
    else:
        reports = [_run_method(*a) for a in args]

    by_method = {r.method: r for r in reports}
    ratio = 1.0
    if BASELINE in by_method and "mtp_movement" in by_method:
        mtp_s = by_method["mtp_movement"].summary["total_seconds"]
        base_s = by_method[BASELINE].summary["total_seconds"]
        if mtp_s > 0:
            ratio = base_s / mtp_s
    for r in reports:
        r.summary["speed_ratio"] = ratio
    return reports


def report_stem(report: RunReport) -> str:
    s = report.summary
    return f"{s['dataset']}_{s['method']}_{s['seed']}"


def write_report_bundle(reports: Sequence[RunReport], out_dir) -> list[Path]:
    """Per-record CSV, trace CSV, summary JSON and trained parameters per report."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for r in reports:
        stem = report_stem(r)
        rec = out / f"{stem}_per_record.csv"
        with open(rec, "w", newline="") as fh:
            fh.write("label,target,result,error\n")
            for row in r.per_record:
                fh.write(f"{row.label},{row.target!r},{row.result!r},{row.error!r}\n")
        trace = out / f"{stem}_trace.csv"
        r.trace.write_csv(trace)
        summary = out / f"{stem}_summary.json"
        summary.write_text(json.dumps(r.summary, indent=2, sort_keys=True) + "\n")
        written += [rec, trace, summary]
        if r.params is not None:
            params = out / f"{stem}_params.json"
            params.write_text(r.params.to_json() + "\n")
            written.append(params)
    return written
