"""Single-rule fuzzy modus ponens / tollens by movement and transformation.

The observation is compared with the rule set on its own universe (antecedent
for FMP, consequent for FMT).  The movement amount and transformation index
found there are mapped onto the other side of the rule, which is then shifted
and powered accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .errors import DomainError, FuzzyInputError
from .sets import EMPTY, EmptySet, MtpSet, TriangularSet


@dataclass(frozen=True)
class SingleRule:
    """``if x is antecedent then y is consequent``."""

    antecedent: TriangularSet
    consequent: TriangularSet


@dataclass(frozen=True)
class CrispObservation:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise FuzzyInputError(f"crisp observation must be finite, got {self.value}")


@dataclass(frozen=True)
class StructuredObservation:
    """The rule set moved by ``shift`` and powered by ``exponent``.

    ``negated`` reads as "not <hedged set>", so ``exponent`` 2 with ``negated``
    is "not very A".  Negation does not combine with a shift.
    """

    shift: float = 0.0
    exponent: float = 1.0
    negated: bool = False

    def __post_init__(self):
        if not math.isfinite(self.shift):
            raise FuzzyInputError(f"shift must be finite, got {self.shift}")
        if not math.isfinite(self.exponent) or self.exponent <= 0:
            raise FuzzyInputError(f"exponent must be > 0, got {self.exponent}")
        if self.negated and self.shift != 0:
            raise FuzzyInputError("a negated observation cannot also be shifted")


Observation = Union[CrispObservation, StructuredObservation]


@dataclass(frozen=True)
class DeltaMap:
    """Maps an antecedent movement onto the consequent.

    ``linear``: k * dx.  ``power``: dx ** k, with dx ** 0 taken as 1.
    ``limit`` optionally bounds a linear k to [0, limit].
    """

    kind: str = "linear"
    k: float = 1.0
    limit: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("linear", "power"):
            raise FuzzyInputError(f"unknown delta map kind {self.kind!r}")
        if not math.isfinite(self.k) or self.k < 0:
            raise FuzzyInputError(f"k must be >= 0, got {self.k}")
        if self.kind == "linear" and self.limit is not None and self.k > self.limit:
            raise FuzzyInputError(f"linear k={self.k} exceeds its limit {self.limit}")

    def __call__(self, dx: float) -> float:
        return map_delta(self, dx)


@dataclass(frozen=True)
class IndexMap:
    """Transformation index of the result = m * index of the observation."""

    m: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.m) or self.m < 0:
            raise FuzzyInputError(f"m must be >= 0, got {self.m}")


def movement_amount(rule_set: TriangularSet, x0: float) -> float:
    """Signed distance from the set's center to a crisp value."""
    if not math.isfinite(x0):
        raise FuzzyInputError(f"non-finite input {x0}")
    return x0 - rule_set.center


def map_delta(dmap: DeltaMap, dx: float) -> float:
    if not math.isfinite(dx):
        raise FuzzyInputError(f"non-finite movement {dx}")
    if dx == 0:
        return 0.0
    if dmap.kind == "linear":
        return dmap.k * dx
    if dmap.k == 0:
        return 1.0
    if dx < 0 and not float(dmap.k).is_integer():
        raise DomainError(f"({dx}) ** {dmap.k} is not real")
    return dx**dmap.k


def _supports_meet(s: TriangularSet, dx: float) -> bool:
    # closed supports of s and s shifted by dx
    return s.left + dx <= s.right and s.right + dx >= s.left


def _transfer(
    source: TriangularSet,
    target: TriangularSet,
    obs: Observation,
    dmap: DeltaMap,
    imap: IndexMap,
) -> Union[MtpSet, EmptySet]:
    if isinstance(obs, CrispObservation):
        dx, alpha, negated = movement_amount(source, obs.value), 1.0, False
    elif isinstance(obs, StructuredObservation):
        dx, alpha, negated = obs.shift, obs.exponent, obs.negated
    else:
        raise FuzzyInputError(f"unsupported observation {obs!r}")

    if negated:
        # "not" overlaps everything; the result is "not <target>"
        return MtpSet(target, negated=True)
    if not _supports_meet(source, dx):
        return EMPTY
    return MtpSet(target, shift=map_delta(dmap, dx), exponent=imap.m * alpha)


def fmp_infer(
    rule: SingleRule,
    obs: Observation,
    dmap: DeltaMap = DeltaMap(),
    imap: IndexMap = IndexMap(),
) -> Union[MtpSet, EmptySet]:
    """Infer B' from an observation on the antecedent universe.

    Returns ``EMPTY`` when the observation and the antecedent do not overlap.
    """
    return _transfer(rule.antecedent, rule.consequent, obs, dmap, imap)


def fmt_infer(
    rule: SingleRule,
    obs: Observation,
    dmap: DeltaMap = DeltaMap(),
    imap: IndexMap = IndexMap(),
) -> Union[MtpSet, EmptySet]:
    """Infer A' from an observation on the consequent universe."""
    return _transfer(rule.consequent, rule.antecedent, obs, dmap, imap)


def observation_set(source: TriangularSet, obs: Observation) -> MtpSet:
    """The observation realized as a fuzzy set on the source universe."""
    if isinstance(obs, CrispObservation):
        return MtpSet(source, shift=movement_amount(source, obs.value))
    if obs.negated:
        if obs.exponent != 1:
            raise FuzzyInputError("'not' of a powered set has no MtpSet form")
        return MtpSet(source, negated=True)
    return MtpSet(source, shift=obs.shift, exponent=obs.exponent)
