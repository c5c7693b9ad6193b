"""Pi-sigma fuzzy neural network realizing T-S inference.

Rule j has Gaussian antecedents (center ``a[j, i]``, width ``b[j, i]``) and a
linear consequent ``y_j = c[j, 0] + sum_i c[j, i + 1] * x_i``.  The network
output is the weighted average of the ``y_j``.  Two gatings produce the
weights:

``mtp_movement``
    d_ji = min(1, |x_i - a_ji| / (kappa * sqrt(b_ji / 2))), d_j = 1 - min_i d_ji,
    and only rules with d_j >= epsilon take part.  No exponentials.
``sugeno_product``
    w_j = prod_i exp(-(x_i - a_ji)**2 / b_ji) over all rules.

:func:`fnn_forward` and :func:`fnn_gradients` are straight numpy reference
implementations; :func:`fnn_train` runs the compiled kernels in
:mod:`mtp_fuzzy._kernels`, which perform the same arithmetic per sample.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import FuzzyInputError, NoActiveRuleError, TrainingDivergedError
from .sets import GaussianSet, gauss_membership

GATINGS = ("mtp_movement", "sugeno_product")

# learning-time schedule of the published experiments
CHECKPOINTS = (100, 500, 1000, 1500, 2000, 4000, 8000, 10000, 15000, 18000, 20000, 25000, 30000, 32670)


@dataclass
class FnnParams:
    centers: np.ndarray
    widths: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        self.centers = np.array(self.centers, dtype=float)
        self.widths = np.array(self.widths, dtype=float)
        self.coefficients = np.array(self.coefficients, dtype=float)
        n, s = self.centers.shape
        if self.widths.shape != (n, s):
            raise FuzzyInputError(f"widths shape {self.widths.shape} != centers shape {(n, s)}")
        if self.coefficients.shape != (n, s + 1):
            raise FuzzyInputError(f"coefficients shape {self.coefficients.shape} != {(n, s + 1)}")
        if np.any(self.widths <= 0):
            raise FuzzyInputError("all widths must be > 0")

    @property
    def n_rules(self):
        return self.centers.shape[0]

    @property
    def arity(self):
        return self.centers.shape[1]

    def copy(self) -> "FnnParams":
        return FnnParams(self.centers.copy(), self.widths.copy(), self.coefficients.copy())

    def to_dict(self) -> dict:
        def mat(m):
            return {"rows": m.shape[0], "cols": m.shape[1], "data": m.ravel().tolist()}

        return {"centers": mat(self.centers), "widths": mat(self.widths), "coefficients": mat(self.coefficients)}

    @classmethod
    def from_dict(cls, doc: dict) -> "FnnParams":
        def mat(d):
            return np.asarray(d["data"], dtype=float).reshape(d["rows"], d["cols"])

        return cls(mat(doc["centers"]), mat(doc["widths"]), mat(doc["coefficients"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "FnnParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    epsilon: float = 0.1
    support_factor: float = 3.0
    iterations: int = 32670
    seed: int = 0
    gating: str = "mtp_movement"
    min_width: float = 1e-6

    def __post_init__(self):
        if not self.learning_rate >= 0:
            raise FuzzyInputError(f"learning rate must be >= 0, got {self.learning_rate}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise FuzzyInputError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if not self.support_factor > 0:
            raise FuzzyInputError(f"support factor must be > 0, got {self.support_factor}")
        if self.iterations < 0:
            raise FuzzyInputError(f"iterations must be >= 0, got {self.iterations}")
        if self.gating not in GATINGS:
            raise FuzzyInputError(f"gating must be one of {GATINGS}, got {self.gating!r}")
        if not self.min_width > 0:
            raise FuzzyInputError("min_width must be > 0")


class TracePoint(NamedTuple):
    iteration: int
    wall_time_seconds: float
    learning_error_percent: float


@dataclass
class TrainTrace:
    points: list[TracePoint] = field(default_factory=list)
    skipped_samples: int = 0

    def append(self, iteration, seconds, error):
        if self.points and iteration <= self.points[-1].iteration:
            raise ValueError("trace iterations must increase")
        self.points.append(TracePoint(int(iteration), float(seconds), float(error)))

    @property
    def final(self) -> TracePoint:
        return self.points[-1]

    def error_at(self, iteration) -> float:
        for p in self.points:
            if p.iteration == iteration:
                return p.learning_error_percent
        raise KeyError(iteration)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "seconds", "error_percent"])
            for p in self.points:
                w.writerow([p.iteration, f"{p.wall_time_seconds:.6f}", f"{p.learning_error_percent:.6f}"])


class ForwardResult(NamedTuple):
    y0: float
    degrees: np.ndarray
    active: np.ndarray


class Gradients(NamedTuple):
    centers: np.ndarray
    widths: np.ndarray
    coefficients: np.ndarray


def _check_x(params: FnnParams, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (params.arity,):
        raise FuzzyInputError(f"expected {params.arity} inputs, got shape {x.shape}")
    return x


def movement_distances(params: FnnParams, cfg: TrainConfig, x) -> np.ndarray:
    """Clamped normalized distances d_ji, shape (n, s)."""
    rho = cfg.support_factor * np.sqrt(params.widths / 2.0)
    return np.minimum(np.abs(x - params.centers) / rho, 1.0)


def _gates(params: FnnParams, cfg: TrainConfig, x):
    if cfg.gating == "mtp_movement":
        d = 1.0 - movement_distances(params, cfg, x).min(axis=1)
        # a zero degree carries no weight even when epsilon is 0
        active = np.flatnonzero((d >= cfg.epsilon) & (d > 0))
    else:
        mu = np.array(
            [
                [gauss_membership(GaussianSet(params.centers[j, i], params.widths[j, i]), x[i]) for i in range(params.arity)]
                for j in range(params.n_rules)
            ]
        )
        d = mu.prod(axis=1)
        active = np.flatnonzero(d > 0)
    return d, active


def fnn_forward(params: FnnParams, cfg: TrainConfig, x: Sequence[float]) -> ForwardResult:
    x = _check_x(params, x)
    d, active = _gates(params, cfg, x)
    total = d[active].sum()
    if active.size == 0 or total == 0:
        raise NoActiveRuleError("no rule is active for this input")
    y = params.coefficients[:, 0] + params.coefficients[:, 1:] @ x
    y0 = float(d[active] @ y[active] / total)
    return ForwardResult(y0, d, active)


def product_forward(params: FnnParams, x: Sequence[float]) -> float:
    """Plain pi-sigma output, the product of the hidden linear units.

    Kept for reference only; training optimizes the degree-weighted average.
    """
    x = _check_x(params, x)
    y = params.coefficients[:, 0] + params.coefficients[:, 1:] @ x
    return float(np.prod(y))


def fnn_loss(y0: float, yd: float) -> float:
    return 0.5 * (yd - y0) ** 2


def fnn_gradients(params: FnnParams, cfg: TrainConfig, x: Sequence[float], yd: float) -> Gradients:
    """Analytic dE/dparams of the squared error for one sample.

    Inactive rules get zero gradient.  At the kinks of the movement gating
    (ties in the min, the clamp at 1, x_i == a_ji) the derivative of the
    branch selected by the forward pass is used.
    """
    x = _check_x(params, x)
    n, s = params.centers.shape
    y0, d, active = fnn_forward(params, cfg, x)
    total = d[active].sum()
    y = params.coefficients[:, 0] + params.coefficients[:, 1:] @ x
    g_out = -(yd - y0)

    ga = np.zeros((n, s))
    gb = np.zeros((n, s))
    gc = np.zeros((n, s + 1))
    xt = np.concatenate(([1.0], x))
    for j in active:
        gc[j] = g_out * d[j] / total * xt
        g_deg = g_out * (y[j] - y0) / total
        if cfg.gating == "mtp_movement":
            rho = cfg.support_factor * np.sqrt(params.widths[j] / 2.0)
            t = np.abs(x - params.centers[j]) / rho
            i = int(np.argmin(t))
            if t[i] >= 1.0:
                continue
            # d_j = 1 - t_i
            ga[j, i] = g_deg * np.sign(x[i] - params.centers[j, i]) / rho[i]
            gb[j, i] = g_deg * t[i] / (2.0 * params.widths[j, i])
        else:
            diff = x - params.centers[j]
            ga[j] = g_deg * d[j] * 2.0 * diff / params.widths[j]
            gb[j] = g_deg * d[j] * diff**2 / params.widths[j] ** 2
    return Gradients(ga, gb, gc)


def predict(params: FnnParams, cfg: TrainConfig, X) -> np.ndarray:
    """Network outputs for every row of X (NaN where no rule is active)."""
    X = np.ascontiguousarray(X, dtype=float)
    if cfg.gating == "mtp_movement":
        return _kernels.mtp_predict(params.centers, params.widths, params.coefficients, X, cfg.support_factor, cfg.epsilon)
    return _kernels.sugeno_predict(params.centers, params.widths, params.coefficients, X)


def learning_error(targets, results) -> float:
    """Mean absolute percentage error; NaN results count as 100 %."""
    t = np.asarray(targets, dtype=float)
    r = np.asarray(results, dtype=float)
    rel = np.where(np.isnan(r), 1.0, np.abs(t - r) / np.abs(t))
    return float(100.0 * rel.mean())


def checkpoint_schedule(iterations: int) -> list[int]:
    points = [t for t in CHECKPOINTS if t <= iterations]
    if iterations > 0 and (not points or points[-1] != iterations):
        points.append(iterations)
    return points


def _run_epochs(p: FnnParams, cfg: TrainConfig, X, Y, epochs):
    if cfg.gating == "mtp_movement":
        return _kernels.mtp_epochs(
            p.centers, p.widths, p.coefficients, X, Y, epochs,
            cfg.learning_rate, cfg.support_factor, cfg.epsilon, cfg.min_width,
        )
    return _kernels.sugeno_epochs(
        p.centers, p.widths, p.coefficients, X, Y, epochs, cfg.learning_rate, cfg.min_width
    )


def fnn_train(params: FnnParams, cfg: TrainConfig, data) -> tuple[FnnParams, TrainTrace]:
    """Per-sample gradient descent, ``cfg.iterations`` full passes in data order.

    ``data`` is a :class:`~mtp_fuzzy.datasets.Dataset` or an ``(X, Y)`` pair.
    The trace holds the learning error before training and at every
    scheduled checkpoint; its times cover the update loop only.  A
    non-finite loss, or a pass in which no sample activates any rule, raises
    :class:`TrainingDivergedError`.
    """
    if isinstance(data, tuple):
        X, Y = data
    else:
        X, Y = data.inputs, data.targets
    X = np.ascontiguousarray(X, dtype=float)
    Y = np.ascontiguousarray(Y, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[0] != Y.shape[0]:
        raise FuzzyInputError("training data must be a nonempty (N, s) / (N,) pair")
    if X.shape[1] != params.arity:
        raise FuzzyInputError(f"data has {X.shape[1]} inputs, network expects {params.arity}")

    p = params.copy()
    # compile outside the timed region
    _run_epochs(p.copy(), cfg, X, Y, 0)
    trace = TrainTrace()
    trace.append(0, 0.0, learning_error(Y, predict(p, cfg, X)))
    done = 0
    elapsed = 0.0
    for stop in checkpoint_schedule(cfg.iterations):
        t0 = time.perf_counter()
        status, epoch, skipped = _run_epochs(p, cfg, X, Y, stop - done)
        elapsed += time.perf_counter() - t0
        trace.skipped_samples += skipped
        if status == _kernels.DIVERGED:
            raise TrainingDivergedError(f"loss became non-finite in pass {done + epoch + 1}", done + epoch + 1)
        if status == _kernels.STALLED:
            raise TrainingDivergedError(
                f"no rule active for any sample in pass {done + epoch + 1}", done + epoch + 1
            )
        done = stop
        err = learning_error(Y, predict(p, cfg, X))
        if not math.isfinite(err):
            raise TrainingDivergedError(f"non-finite learning error after pass {done}", done)
        trace.append(done, elapsed, err)
    return p, trace
