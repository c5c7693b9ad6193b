"""Multi-input Mamdani rule bases inferred by movement of the consequents."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import EmptyResultError, FuzzyInputError
from .inference import DeltaMap, map_delta
from .sets import (
    DEFAULT_GRID_POINTS,
    MtpSet,
    SampledSet,
    TriangularSet,
    centroid_defuzzify,
    sample_default,
    union_max,
)

DEFUZZ_MODES = ("centroid", "center_average")


@dataclass(frozen=True)
class MamdaniRule:
    antecedents: tuple[TriangularSet, ...]
    consequent: TriangularSet

    def __post_init__(self):
        object.__setattr__(self, "antecedents", tuple(self.antecedents))
        if not self.antecedents:
            raise FuzzyInputError("a rule needs at least one antecedent")


@dataclass(frozen=True)
class MamdaniSystem:
    rules: tuple[MamdaniRule, ...]
    signs: tuple[int, ...]
    delta_map: DeltaMap = field(default_factory=DeltaMap)
    defuzz_mode: str = "centroid"
    grid_points: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "signs", tuple(int(p) for p in self.signs))
        if not self.rules:
            raise FuzzyInputError("a system needs at least one rule")
        if any(p not in (1, -1) for p in self.signs):
            raise FuzzyInputError(f"signs must be +1 or -1, got {self.signs}")
        for j, rule in enumerate(self.rules):
            if len(rule.antecedents) != self.arity:
                raise FuzzyInputError(
                    f"rule {j} has {len(rule.antecedents)} antecedents, system arity is {self.arity}"
                )
        if self.defuzz_mode not in DEFUZZ_MODES:
            raise FuzzyInputError(f"defuzz_mode must be one of {DEFUZZ_MODES}")

    @property
    def arity(self):
        return len(self.signs)


class MamdaniResult(NamedTuple):
    fuzzy: SampledSet
    crisp: float
    active: tuple[int, ...]


def antecedent_movement(p: TriangularSet, x: float) -> float:
    """Signed movement normalized by the width on the side the input falls."""
    if x <= p.center:
        return (x - p.center) / p.left_width
    return (x - p.center) / p.right_width


def aggregate_movement(rule: MamdaniRule, inputs: Sequence[float], signs: Sequence[int], counter=None) -> float:
    if not len(inputs) == len(signs) == len(rule.antecedents):
        raise FuzzyInputError(
            f"{len(inputs)} inputs, {len(signs)} signs, {len(rule.antecedents)} antecedents"
        )
    total = 0.0
    for p, x, phi in zip(rule.antecedents, inputs, signs):
        total += phi * antecedent_movement(p, x)
    if counter is not None:
        counter["movement"] += len(inputs)
    return total / len(inputs)


def mamdani_mtp_infer(
    system: MamdaniSystem, inputs: Sequence[float], counter: Optional[Counter] = None
) -> MamdaniResult:
    """Move every matching rule's consequent, take the union, defuzzify.

    Rules whose aggregated movement exceeds 1 in magnitude do not match and
    are left out.  ``counter`` (a ``collections.Counter``) receives operation
    counts when given.
    """
    inputs = [float(x) for x in inputs]
    if len(inputs) != system.arity:
        raise FuzzyInputError(f"expected {system.arity} inputs, got {len(inputs)}")
    if not np.all(np.isfinite(inputs)):
        raise FuzzyInputError(f"non-finite inputs {inputs}")

    movements = []
    active = []
    moved = []
    for j, rule in enumerate(system.rules):
        dx = aggregate_movement(rule, inputs, system.signs, counter)
        movements.append(dx)
        if abs(dx) > 1:
            continue
        active.append(j)
        moved.append(MtpSet(rule.consequent, shift=map_delta(system.delta_map, dx)))
    if counter is not None:
        counter["rule"] += len(system.rules)
        counter["shift"] += len(moved)
    if not active:
        raise EmptyResultError(
            f"no rule matches: |movements| = {[round(abs(m), 6) for m in movements]}",
            movements=[abs(m) for m in movements],
        )

    sampled = sample_default(moved, system.grid_points)
    if counter is not None:
        counter["sample"] += len(sampled) * system.grid_points
    fuzzy = union_max(sampled)
    if system.defuzz_mode == "center_average":
        crisp = float(np.mean([m.peak for m in moved]))
    else:
        crisp = centroid_defuzzify(fuzzy)
    return MamdaniResult(fuzzy, crisp, tuple(active))
