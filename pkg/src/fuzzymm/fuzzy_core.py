"""Triangular fuzzy numbers: arithmetic, alpha-levels, partial orders, minimal upper bounds.

All values are immutable and every operation is a pure function, so they can be
shared freely between concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence


class NotSortedError(ValueError):
    """Endpoints of a triplet or interval are out of order."""


class AlphaOutOfRangeError(ValueError):
    """Membership level outside [0, 1]."""


class RequiresNonnegativeOperandError(ValueError):
    """Fuzzy multiplication needs a right operand with nonnegative support."""


class EmptySetError(ValueError):
    """Aggregate operation applied to an empty collection."""


@dataclass(frozen=True)
class Interval:
    """Closed bounded real interval."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not self.lower <= self.upper:
            raise NotSortedError(f"interval endpoints out of order: [{self.lower}, {self.upper}]")


@dataclass(frozen=True)
class TriangularFuzzyNumber:
    """Triplet (lo, mid, hi) with lo <= mid <= hi.

    Degenerate triplets (v, v, v) are allowed and stand for crisp reals, which
    is what lets binary variables and crisp constants live in the same algebra.
    """

    lo: float
    mid: float
    hi: float

    def __post_init__(self) -> None:
        if not (self.lo <= self.mid <= self.hi):
            raise NotSortedError(
                f"triplet must satisfy lo <= mid <= hi, got ({self.lo}, {self.mid}, {self.hi})"
            )

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.mid == self.hi

    @property
    def is_nonnegative(self) -> bool:
        return self.lo >= 0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.lo, self.mid, self.hi)

    def __add__(self, other: "TriangularFuzzyNumber") -> "TriangularFuzzyNumber":
        return add(self, other)

    def __neg__(self) -> "TriangularFuzzyNumber":
        return scale(-1.0, self)

    def __rmul__(self, lam: float) -> "TriangularFuzzyNumber":
        return scale(lam, self)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"tfn({self.lo}, {self.mid}, {self.hi})"


TFN = TriangularFuzzyNumber

ZERO = TriangularFuzzyNumber(0.0, 0.0, 0.0)
ONE = TriangularFuzzyNumber(1.0, 1.0, 1.0)


def tfn(lo: float, mid: float | None = None, hi: float | None = None) -> TriangularFuzzyNumber:
    """Build a triplet; a single argument builds the degenerate (crisp) number."""
    if mid is None and hi is None:
        return TriangularFuzzyNumber(lo, lo, lo)
    if mid is None or hi is None:
        raise TypeError("tfn takes either one scalar or all three endpoints")
    return TriangularFuzzyNumber(lo, mid, hi)


class OrderRelation(Enum):
    """Outcome of comparing two triplets; compare() returns the strongest that holds."""

    STRICTLY_LESS = "strictly_less"
    DOMINATES = "dominates"
    LESS_OR_APPROX = "less_or_approx"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"

    def implies(self, other: "OrderRelation") -> bool:
        """Whether this relation entails `other` (strictly-less => dominates => less-or-approx)."""
        if self is other:
            return True
        implied = _IMPLICATIONS[self]
        return other in implied


_IMPLICATIONS = {
    OrderRelation.STRICTLY_LESS: {OrderRelation.DOMINATES, OrderRelation.LESS_OR_APPROX},
    OrderRelation.DOMINATES: {OrderRelation.LESS_OR_APPROX},
    OrderRelation.LESS_OR_APPROX: set(),
    OrderRelation.EQUAL: {OrderRelation.LESS_OR_APPROX},
    OrderRelation.INCOMPARABLE: set(),
}


def alpha_level(a: TriangularFuzzyNumber, alpha: float) -> Interval:
    """Interval of points with membership at least alpha."""
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRangeError(f"alpha must lie in [0, 1], got {alpha}")
    lower = a.lo + (a.mid - a.lo) * alpha
    upper = a.hi - (a.hi - a.mid) * alpha
    if lower > upper:
        # The exact endpoints coincide near the apex; only round-off inverts them.
        lower = upper = 0.5 * (lower + upper)
    return Interval(lower, upper)


def add(a: TriangularFuzzyNumber, b: TriangularFuzzyNumber) -> TriangularFuzzyNumber:
    return TriangularFuzzyNumber(a.lo + b.lo, a.mid + b.mid, a.hi + b.hi)


def scale(lam: float, a: TriangularFuzzyNumber) -> TriangularFuzzyNumber:
    if lam >= 0:
        return TriangularFuzzyNumber(lam * a.lo, lam * a.mid, lam * a.hi)
    return TriangularFuzzyNumber(lam * a.hi, lam * a.mid, lam * a.lo)


def mul(a: TriangularFuzzyNumber, b: TriangularFuzzyNumber) -> TriangularFuzzyNumber:
    """Product of a triplet with a nonnegative triplet, split on the sign of `a`."""
    if b.lo < 0:
        raise RequiresNonnegativeOperandError(
            f"right operand must have nonnegative support, got lo={b.lo}"
        )
    if a.lo >= 0:
        return TriangularFuzzyNumber(a.lo * b.lo, a.mid * b.mid, a.hi * b.hi)
    if a.hi < 0:
        return TriangularFuzzyNumber(a.lo * b.hi, a.mid * b.mid, a.hi * b.lo)
    return TriangularFuzzyNumber(a.lo * b.hi, a.mid * b.mid, a.hi * b.hi)


def _cmp(x: float, y: float, tol: float) -> int:
    d = x - y
    if abs(d) <= tol:
        return 0
    return -1 if d < 0 else 1


def compare(a: TriangularFuzzyNumber, b: TriangularFuzzyNumber, tol: float = 0.0) -> OrderRelation:
    """Strongest order relation between two triplets.

    Components differing by at most `tol` count as equal. Because each pair of
    components is either below, equal, or above, the strongest relation is one
    of EQUAL, STRICTLY_LESS, DOMINATES, or INCOMPARABLE; LESS_OR_APPROX is
    reachable through OrderRelation.implies.
    """
    cs = (_cmp(a.lo, b.lo, tol), _cmp(a.mid, b.mid, tol), _cmp(a.hi, b.hi, tol))
    if all(c == 0 for c in cs):
        return OrderRelation.EQUAL
    if all(c < 0 for c in cs):
        return OrderRelation.STRICTLY_LESS
    if all(c <= 0 for c in cs):
        return OrderRelation.DOMINATES
    return OrderRelation.INCOMPARABLE


def less_or_approx(a: TriangularFuzzyNumber, b: TriangularFuzzyNumber, tol: float = 0.0) -> bool:
    """Whether a is componentwise below-or-equal b (within tol)."""
    return compare(a, b, tol).implies(OrderRelation.LESS_OR_APPROX)


def theta_mub(values: Iterable[TriangularFuzzyNumber]) -> TriangularFuzzyNumber:
    """Minimal upper bound of a finite set: the componentwise maximum triplet."""
    values = list(values)
    if not values:
        raise EmptySetError("minimal upper bound of an empty set is undefined")
    return TriangularFuzzyNumber(
        max(v.lo for v in values),
        max(v.mid for v in values),
        max(v.hi for v in values),
    )


def is_upper_bound(
    u: TriangularFuzzyNumber, values: Sequence[TriangularFuzzyNumber], tol: float = 0.0
) -> bool:
    if not values:
        raise EmptySetError("upper-bound test against an empty set is undefined")
    return all(less_or_approx(v, u, tol) for v in values)


def to_json(a: TriangularFuzzyNumber) -> float | list[float]:
    """JSON form: [lo, mid, hi], or a bare scalar for degenerate numbers."""
    if a.is_degenerate:
        return float(a.lo)
    return [float(a.lo), float(a.mid), float(a.hi)]


def from_json(obj) -> TriangularFuzzyNumber:
    """Read [lo, mid, hi] or a bare scalar (read as a degenerate triplet)."""
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return TriangularFuzzyNumber(float(obj), float(obj), float(obj))
    if isinstance(obj, (list, tuple)) and len(obj) == 3:
        lo, mid, hi = (float(v) for v in obj)
        return TriangularFuzzyNumber(lo, mid, hi)
    raise ValueError(f"expected scalar or [lo, mid, hi], got {obj!r}")
