"""Totally ordered value groups.

Values live in Q^r with the lexicographic order, for a rank r fixed by the
surrounding context.  The element at infinity is a module-level singleton
``INFINITY`` that absorbs addition and dominates every finite value.

Convex subgroups of Q^r (lex) are exactly the tail blocks
Delta = {0}^k x Q^(r-k); they are described by the number ``kept_coords`` = k
of leading coordinates that survive the quotient map.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class ValueInfinity:
    """The value of zero; larger than every finite value, absorbs addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __add__(self, other):
        if isinstance(other, (Value, ValueInfinity)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Value):
            return self
        if isinstance(other, ValueInfinity):
            raise ArithmeticError("INFINITY - INFINITY is undefined")
        return NotImplemented

    def scale(self, _factor):
        return self

    def __lt__(self, other):
        if isinstance(other, (Value, ValueInfinity)):
            return False
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, ValueInfinity):
            return True
        if isinstance(other, Value):
            return False
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, Value):
            return True
        if isinstance(other, ValueInfinity):
            return False
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, (Value, ValueInfinity)):
            return True
        return NotImplemented

    def __hash__(self):
        return hash("gaugeval.INFINITY")


INFINITY = ValueInfinity()


def _coerce_fraction(entry):
    if isinstance(entry, Fraction):
        return entry
    if isinstance(entry, int):
        return Fraction(entry)
    if isinstance(entry, str):
        return Fraction(entry)
    raise TypeError(f"cannot interpret {entry!r} as a rational coordinate")


class Value:
    """A point of Q^r, compared lexicographically."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        self.coords = tuple(_coerce_fraction(c) for c in coords)

    @classmethod
    def of(cls, *entries) -> "Value":
        return cls(entries)

    @classmethod
    def zero(cls, rank: int) -> "Value":
        return cls((0,) * rank)

    @property
    def rank(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def _check_rank(self, other: "Value"):
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other):
        if isinstance(other, ValueInfinity):
            return other
        if isinstance(other, Value):
            self._check_rank(other)
            return Value(a + b for a, b in zip(self.coords, other.coords))
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Value):
            self._check_rank(other)
            return Value(a - b for a, b in zip(self.coords, other.coords))
        return NotImplemented

    def __neg__(self):
        return Value(-a for a in self.coords)

    def scale(self, factor) -> "Value":
        factor = _coerce_fraction(factor)
        return Value(a * factor for a in self.coords)

    def __eq__(self, other):
        if isinstance(other, Value):
            return self.coords == other.coords
        if isinstance(other, ValueInfinity):
            return False
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, ValueInfinity):
            return True
        if isinstance(other, Value):
            self._check_rank(other)
            return self.coords < other.coords
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, ValueInfinity):
            return True
        if isinstance(other, Value):
            self._check_rank(other)
            return self.coords <= other.coords
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, ValueInfinity):
            return False
        if isinstance(other, Value):
            self._check_rank(other)
            return self.coords > other.coords
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, ValueInfinity):
            return False
        if isinstance(other, Value):
            self._check_rank(other)
            return self.coords >= other.coords
        return NotImplemented

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def lex_compare(a, b) -> int:
    """Three-way lexicographic comparison; INFINITY compares above everything."""
    if a == b:
        return 0
    return -1 if a < b else 1


def vmin(*values):
    """Minimum of finitely many values (INFINITY allowed)."""
    best = INFINITY
    for v in values:
        if v < best:
            best = v
    return best


@dataclass(frozen=True)
class ConvexSubgroup:
    """The tail block Delta = {0}^kept_coords x Q^(rank - kept_coords)."""

    rank: int
    kept_coords: int

    def __post_init__(self):
        if not 0 <= self.kept_coords <= self.rank:
            raise ValueError("kept_coords must lie between 0 and rank")

    def contains(self, value) -> bool:
        if isinstance(value, ValueInfinity):
            return False
        if value.rank != self.rank:
            raise ValueError("rank mismatch")
        return all(c == 0 for c in value.coords[: self.kept_coords])

    def quotient_map(self, value):
        """Project onto the leading kept_coords coordinates (rank drops)."""
        if isinstance(value, ValueInfinity):
            return INFINITY
        if value.rank != self.rank:
            raise ValueError("rank mismatch")
        return Value(value.coords[: self.kept_coords])

    def zero_tail(self, value):
        """Quotient map in embedded form: tail coordinates zeroed, rank kept.

        Convenient when coarse and fine values must coexist in one computation;
        lex order on the embedded image agrees with the quotient order.
        """
        if isinstance(value, ValueInfinity):
            return INFINITY
        if value.rank != self.rank:
            raise ValueError("rank mismatch")
        k = self.kept_coords
        return Value(value.coords[:k] + (Fraction(0),) * (self.rank - k))

    def tail_part(self, value):
        """value - zero_tail(value); lies in the subgroup."""
        if isinstance(value, ValueInfinity):
            return INFINITY
        return value - self.zero_tail(value)

    def is_trivial(self) -> bool:
        return self.kept_coords == self.rank

    def is_everything(self) -> bool:
        return self.kept_coords == 0


def quotient_map(subgroup: ConvexSubgroup, value):
    return subgroup.quotient_map(value)
