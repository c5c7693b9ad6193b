"""Reference reasoning methods compared against movement-based inference.

* classic Mamdani max-min inference with centroid defuzzification
* Sugeno matching-degree inference for T-S rule bases
* Wang's distance-type reasoning (inverse-distance weighting)
* Hellendoorn's functional generalized modus ponens on Gamma-ramp sets
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import DegenerateDistanceError, EmptyResultError, FuzzyInputError
from .mamdani import MamdaniSystem
from .sets import SampledSet, TriangularSet, centroid_defuzzify, default_grid, sample, union_max
from .takagi_sugeno import TSRule, TSSystem, fold_and, weighted_output


class ClassicResult(NamedTuple):
    fuzzy: SampledSet
    crisp: float


class _Clipped:
    def __init__(self, base: TriangularSet, level: float):
        self.base = base
        self.level = level
        self.support = base.support

    def membership(self, u):
        return np.minimum(self.base.membership(u), self.level)


def mamdani_classic_infer(system: MamdaniSystem, inputs: Sequence[float]) -> ClassicResult:
    """Min firing strength, consequent clipped at that level, max union, centroid."""
    inputs = [float(x) for x in inputs]
    if len(inputs) != system.arity:
        raise FuzzyInputError(f"expected {system.arity} inputs, got {len(inputs)}")
    clipped = []
    for rule in system.rules:
        level = min(p.membership(x) for p, x in zip(rule.antecedents, inputs))
        clipped.append(_Clipped(rule.consequent, level))
    lo, hi, n = default_grid(clipped, system.grid_points)
    fuzzy = union_max([sample(c, lo, hi, n) for c in clipped])
    if not np.any(fuzzy.values > 0):
        raise EmptyResultError("no rule fires for these inputs")
    return ClassicResult(fuzzy, centroid_defuzzify(fuzzy))


def sugeno_membership(a: TriangularSet, x: float) -> float:
    left, c, right = a.left, a.center, a.right
    if x <= left or x >= right:
        return 0.0
    if x >= c:
        return (right - x) / (right - c)
    return (x - left) / (c - left)


def sugeno_infer(system: TSSystem, inputs: Sequence[float], and_op: Optional[str] = None) -> float:
    """Weighted average of rule outputs by matching degree; non-matching rules drop out."""
    and_op = and_op or system.and_op
    inputs = [float(x) for x in inputs]
    if len(inputs) != system.arity:
        raise FuzzyInputError(f"expected {system.arity} inputs, got {len(inputs)}")
    weighted = []
    for j, rule in enumerate(system.rules):
        u = fold_and([sugeno_membership(a, x) for a, x in zip(rule.antecedents, inputs)], and_op)
        if u > 0:
            weighted.append((j, u))
    if not weighted:
        raise EmptyResultError("no rule matches the inputs")
    return weighted_output(system.rules, weighted, inputs)


def wang_distance_infer(rules: Sequence[TSRule], input_sets: Sequence[TriangularSet]) -> float:
    """Distance-type reasoning: y0 = sum_j y_j prod_{k!=j} d_k / sum_j prod_{k!=j} d_k.

    The distance between two sets is the absolute difference of their centers,
    and each y_j is evaluated at the input-set centers.
    """
    if len(rules) < 2:
        raise FuzzyInputError("distance-type reasoning needs at least two rules")
    for rule in rules:
        if rule.arity != len(input_sets):
            raise FuzzyInputError(f"expected {rule.arity} input sets, got {len(input_sets)}")
    centers = [s.center for s in input_sets]
    dist = np.array(
        [sum(abs(a.center - s.center) for a, s in zip(rule.antecedents, input_sets)) for rule in rules]
    )
    if np.count_nonzero(dist == 0) > 1:
        raise DegenerateDistanceError("two or more rules at distance zero")
    m = len(rules)
    weights = np.array([np.prod(np.delete(dist, j)) for j in range(m)])
    outputs = np.array([rule.output(centers) for rule in rules])
    return float(weights @ outputs / weights.sum())


@dataclass(frozen=True)
class GammaSet:
    """Ramp set: 0 up to ``lo``, rising linearly to 1 at ``hi``, 1 beyond."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise FuzzyInputError("Gamma set bounds must be finite")
        if not self.lo < self.hi:
            raise FuzzyInputError(f"need lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def length(self):
        return self.hi - self.lo

    @property
    def center(self):
        return 0.5 * (self.lo + self.hi)

    def membership(self, u):
        mu = np.clip((np.asarray(u, dtype=float) - self.lo) / self.length, 0.0, 1.0)
        return float(mu) if np.ndim(u) == 0 else mu


@dataclass(frozen=True)
class UniverseBounds:
    min_u: float
    max_u: float

    def __post_init__(self):
        if not self.min_u < self.max_u:
            raise FuzzyInputError(f"need min_u < max_u, got [{self.min_u}, {self.max_u}]")


class UnknownSet:
    """"Unknown" conclusion: membership 1 over the whole universe."""

    support = None

    def membership(self, u):
        return 1.0 if np.ndim(u) == 0 else np.ones_like(np.asarray(u, dtype=float))

    def __repr__(self):
        return "UNKNOWN"


UNKNOWN = UnknownSet()


def overlap_measure(a: GammaSet, a_prime: GammaSet) -> float:
    """Positive when ``a_prime`` lies left of ``a``, 0 when the centers coincide."""
    return ((a.lo + a.hi) - (a_prime.lo + a_prime.hi)) / (a.length + a_prime.length)


def psi_center(w: float, l_bp: float, b: GammaSet, bounds: UniverseBounds) -> float:
    """Center of the concluded set as a function of the overlap ``w``."""
    if not l_bp > 0:
        raise FuzzyInputError(f"concluded length must be > 0, got {l_bp}")
    floor = bounds.min_u - 0.5 * l_bp
    if w <= -1:
        return b.hi
    if w == 1:
        return floor
    c, d = b.lo, b.hi
    return 0.5 * ((floor - c) * w * w + (floor - d) * w + (c + d))


def hellendoorn_gmp(
    a: GammaSet, b: GammaSet, a_prime: GammaSet, bounds: UniverseBounds
) -> Union[GammaSet, UnknownSet]:
    """Concluded ramp B' = Gamma(g, h).

    ``UNKNOWN`` is returned when w >= 1 or when the whole shell lies at or
    below min(U), so that the ramp is 1 everywhere on the universe.
    """
    l_bp = a_prime.length / a.length * b.length
    w = overlap_measure(a, a_prime)
    if w >= 1:
        return UNKNOWN
    m = psi_center(w, l_bp, b, bounds)
    g, h = m - 0.5 * l_bp, m + 0.5 * l_bp
    if h <= bounds.min_u:
        return UNKNOWN
    return GammaSet(g, h)
