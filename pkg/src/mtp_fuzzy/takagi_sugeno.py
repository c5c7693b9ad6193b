"""Takagi-Sugeno rule bases weighted by movement degrees instead of memberships."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

from .errors import DegenerateWeightsError, FuzzyInputError, NoActiveRuleError
from .sets import TriangularSet

AND_OPS = ("min", "product")


@dataclass(frozen=True)
class TSRule:
    """Antecedents A_j1..A_js and linear consequent c_j0 + sum c_ji x_i."""

    antecedents: tuple[TriangularSet, ...]
    coefficients: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "antecedents", tuple(self.antecedents))
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if len(self.coefficients) != len(self.antecedents) + 1:
            raise FuzzyInputError(
                f"{len(self.antecedents)} antecedents need {len(self.antecedents) + 1} "
                f"coefficients, got {len(self.coefficients)}"
            )

    @property
    def arity(self):
        return len(self.antecedents)

    def output(self, inputs: Sequence[float]) -> float:
        c = self.coefficients
        return c[0] + sum(ci * xi for ci, xi in zip(c[1:], inputs))


@dataclass(frozen=True)
class TSSystem:
    rules: tuple[TSRule, ...]
    epsilon: float = 0.0
    and_op: str = "min"

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.rules:
            raise FuzzyInputError("a system needs at least one rule")
        if len({r.arity for r in self.rules}) != 1:
            raise FuzzyInputError("all rules must have the same number of antecedents")
        if not 0.0 <= self.epsilon <= 1.0:
            raise FuzzyInputError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.and_op not in AND_OPS:
            raise FuzzyInputError(f"and_op must be one of {AND_OPS}, got {self.and_op!r}")

    @property
    def arity(self):
        return self.rules[0].arity


def fold_and(values: Sequence[float], and_op: str) -> float:
    if and_op == "min":
        return min(values)
    if and_op == "product":
        return reduce(lambda a, b: a * b, values, 1.0)
    raise FuzzyInputError(f"and_op must be one of {AND_OPS}, got {and_op!r}")


def crisp_movement(a: TriangularSet, x: float) -> float:
    """Normalized distance of ``x`` from the center, saturating at 1 off the support."""
    if not math.isfinite(x):
        raise FuzzyInputError(f"non-finite input {x}")
    left, c, right = a.left, a.center, a.right
    if x <= left or x >= right:
        return 1.0
    if x >= c:
        return (x - c) / (right - c)
    return (c - x) / (c - left)


def _check_inputs(rule: TSRule, inputs):
    if len(inputs) != rule.arity:
        raise FuzzyInputError(f"expected {rule.arity} inputs, got {len(inputs)}")


def movement_degree(rule: TSRule, inputs: Sequence[float], and_op: str = "min") -> float:
    _check_inputs(rule, inputs)
    return 1.0 - fold_and([crisp_movement(a, x) for a, x in zip(rule.antecedents, inputs)], and_op)


def active_rules(system: TSSystem, inputs: Sequence[float]) -> list[tuple[int, float]]:
    """(index, degree) of every rule whose movement degree reaches epsilon."""
    out = []
    for j, rule in enumerate(system.rules):
        d = movement_degree(rule, inputs, system.and_op)
        if d >= system.epsilon:
            out.append((j, d))
    return out


def weighted_output(system_rules, weighted: Sequence[tuple[int, float]], inputs) -> float:
    total = sum(w for _, w in weighted)
    if total == 0:
        raise DegenerateWeightsError("rule weights sum to zero")
    return sum(w * system_rules[j].output(inputs) for j, w in weighted) / total


def ts_mtp_infer(system: TSSystem, inputs: Sequence[float]) -> float:
    inputs = [float(x) for x in inputs]
    _check_inputs(system.rules[0], inputs)
    act = active_rules(system, inputs)
    if not act:
        raise NoActiveRuleError(f"no rule reaches movement degree {system.epsilon}")
    return weighted_output(system.rules, act, inputs)
