"""Parametric fuzzy sets, hedges, sampling, union and centroid defuzzification.

Every set type exposes ``membership(u)`` which accepts a scalar (returns a
float) or an array (returns an array of the same shape).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import EmptyResultError, FuzzyInputError, UnsupportedCompositionError

DEFAULT_GRID_POINTS = 1001


def _check_finite(u, what="input"):
    arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise FuzzyInputError(f"non-finite {what}: {u!r}")
    return arr


def _as_output(arr, like):
    if np.ndim(like) == 0:
        return float(arr)
    return arr


@dataclass(frozen=True)
class TriangularSet:
    """Normal triangular set stored as center plus left/right widths."""

    center: float
    left_width: float
    right_width: float

    def __post_init__(self):
        for name in ("center", "left_width", "right_width"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise FuzzyInputError(f"{name} must be finite, got {value}")
        if self.left_width <= 0 or self.right_width <= 0:
            raise FuzzyInputError(
                f"widths must be > 0, got ({self.left_width}, {self.right_width})"
            )

    @classmethod
    def from_endpoints(cls, left, center, right):
        return cls(float(center), float(center - left), float(right - center))

    @property
    def left(self):
        return self.center - self.left_width

    @property
    def right(self):
        return self.center + self.right_width

    @property
    def support(self):
        return (self.left, self.right)

    def membership(self, u):
        return tri_membership(self, u)


@dataclass(frozen=True)
class GaussianSet:
    """``exp(-(u - center)**2 / width)``; ``width`` is the squared scale."""

    center: float
    width: float

    def __post_init__(self):
        if not (math.isfinite(self.center) and math.isfinite(self.width)):
            raise FuzzyInputError("Gaussian parameters must be finite")
        if self.width <= 0:
            raise FuzzyInputError(f"width must be > 0, got {self.width}")

    def membership(self, u):
        return gauss_membership(self, u)


@dataclass(frozen=True)
class MtpSet:
    """A triangular base set after movement and transformation.

    Membership is ``base(u - shift) ** exponent``, or ``1 - base(u - shift)``
    when ``negated``.  An exponent of 0 gives the constant-one ("unknown") set.
    """

    base: TriangularSet
    shift: float = 0.0
    exponent: float = 1.0
    negated: bool = False

    def __post_init__(self):
        if not math.isfinite(self.shift):
            raise FuzzyInputError(f"shift must be finite, got {self.shift}")
        if not math.isfinite(self.exponent) or self.exponent < 0:
            raise FuzzyInputError(f"exponent must be >= 0, got {self.exponent}")
        if self.negated and self.exponent != 1:
            raise UnsupportedCompositionError("a negated set must have exponent 1")

    @classmethod
    def lift(cls, base: TriangularSet) -> "MtpSet":
        return cls(base)

    @property
    def peak(self):
        return self.base.center + self.shift

    @property
    def support(self):
        """Closed support, or None when the set is nonzero everywhere."""
        if self.negated or self.exponent == 0:
            return None
        return (self.base.left + self.shift, self.base.right + self.shift)

    def membership(self, u):
        arr = _check_finite(u)
        mu = _tri_values(self.base, arr - self.shift)
        if self.negated:
            mu = 1.0 - mu
        elif self.exponent != 1:
            mu = np.power(mu, self.exponent)
        return _as_output(mu, u)


@dataclass(frozen=True)
class EmptySet:
    """The empty fuzzy set: membership 0 everywhere (no-match outcome)."""

    support = None

    def membership(self, u):
        arr = _check_finite(u)
        return _as_output(np.zeros_like(arr), u)

    def __bool__(self):
        return False


EMPTY = EmptySet()


def _tri_values(s: TriangularSet, u):
    mu = np.minimum(1.0 + (u - s.center) / s.left_width, 1.0 + (s.center - u) / s.right_width)
    return np.clip(mu, 0.0, 1.0)


def tri_membership(s: TriangularSet, u):
    arr = _check_finite(u)
    return _as_output(_tri_values(s, arr), u)


def gauss_membership(s: GaussianSet, u):
    arr = _check_finite(u)
    return _as_output(np.exp(-((arr - s.center) ** 2) / s.width), u)


def _as_mtp(s):
    return MtpSet(s) if isinstance(s, TriangularSet) else s


def power_hedge(s, m: float) -> MtpSet:
    """Multiply the exponent by ``m``: m > 1 strengthens ("very"), m < 1 weakens."""
    s = _as_mtp(s)
    if not math.isfinite(m) or m <= 0:
        raise FuzzyInputError(f"hedge power must be > 0, got {m}")
    if s.negated:
        raise UnsupportedCompositionError("power hedge of a negated set")
    return replace(s, exponent=s.exponent * m)


def shift_hedge(s, delta: float) -> MtpSet:
    s = _as_mtp(s)
    if not math.isfinite(delta):
        raise FuzzyInputError(f"shift must be finite, got {delta}")
    if s.negated:
        raise UnsupportedCompositionError("shift hedge of a negated set")
    return replace(s, shift=s.shift + delta)


def complement(s) -> MtpSet:
    s = _as_mtp(s)
    if s.exponent != 1:
        raise UnsupportedCompositionError(
            f"'not' is only defined for unpowered sets, exponent is {s.exponent}"
        )
    return replace(s, negated=not s.negated)


@dataclass(frozen=True, eq=False)
class SampledSet:
    grid_start: float
    grid_step: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise FuzzyInputError("a sampled set needs at least 2 grid points")
        if not self.grid_step > 0:
            raise FuzzyInputError(f"grid step must be > 0, got {self.grid_step}")
        if np.any(values < 0) or np.any(values > 1) or not np.all(np.isfinite(values)):
            raise FuzzyInputError("sampled memberships must lie in [0, 1]")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def grid(self):
        return self.grid_start + self.grid_step * np.arange(self.values.size)

    def same_grid(self, other: "SampledSet") -> bool:
        return (
            self.values.size == other.values.size
            and math.isclose(self.grid_start, other.grid_start, rel_tol=0, abs_tol=1e-12)
            and math.isclose(self.grid_step, other.grid_step, rel_tol=1e-12)
        )


def sample(s, lo: float, hi: float, n: int = DEFAULT_GRID_POINTS) -> SampledSet:
    if n < 2:
        raise FuzzyInputError(f"need at least 2 grid points, got {n}")
    if not lo < hi:
        raise FuzzyInputError(f"empty sampling interval [{lo}, {hi}]")
    grid = np.linspace(lo, hi, n)
    return SampledSet(float(lo), (hi - lo) / (n - 1), np.asarray(s.membership(grid)))


def default_grid(sets: Sequence, n: int = DEFAULT_GRID_POINTS):
    """(lo, hi, n) spanning the union of supports, padded by one grid step."""
    supports = [s.support for s in sets if s.support is not None]
    if not supports or len(supports) < len(sets):
        raise FuzzyInputError("an unbounded or empty set needs an explicit sampling interval")
    lo = min(a for a, _ in supports)
    hi = max(b for _, b in supports)
    step = (hi - lo) / (n - 3)
    return lo - step, hi + step, n


def sample_default(sets: Sequence, n: int = DEFAULT_GRID_POINTS) -> list[SampledSet]:
    lo, hi, n = default_grid(sets, n)
    return [sample(s, lo, hi, n) for s in sets]


def union_max(sets: Sequence[SampledSet]) -> SampledSet:
    if not sets:
        raise FuzzyInputError("union of no sets")
    first = sets[0]
    for other in sets[1:]:
        if not first.same_grid(other):
            raise FuzzyInputError("union operands are sampled on different grids")
    values = np.max(np.stack([s.values for s in sets]), axis=0)
    return SampledSet(first.grid_start, first.grid_step, values)


def centroid_defuzzify(s: SampledSet) -> float:
    mu = s.values
    if not np.any(mu > 0):
        raise EmptyResultError("cannot defuzzify an all-zero set")
    z = s.grid
    return float(np.trapezoid(z * mu, z) / np.trapezoid(mu, z))
