"""Closed-interval arithmetic on floats, with outward rounding.

Every computed bound is pushed one ulp outward with ``math.nextafter``, so a
result interval always encloses the exact real-arithmetic image set of its
operands, whatever rounding the intermediate float operations did.  Negation
is the one exception: flipping the sign of a float is exact in IEEE 754 and
is left unwidened.  The empty interval is a first-class value and propagates
through arithmetic absorbingly.

Division is deliberately absent; nothing in this package divides intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["Interval", "Box2", "EMPTY", "det2"]

_INF = math.inf


def _dn(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval [lo, hi]; empty when lo > hi."""

    lo: float
    hi: float

    @staticmethod
    def point(v: float) -> "Interval":
        return Interval(v, v)

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    @property
    def width(self) -> float:
        return 0.0 if self.is_empty else self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, v: float) -> bool:
        return self.lo <= v <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        if other.is_empty:
            return True
        return not self.is_empty and self.lo <= other.lo and other.hi <= self.hi

    def hull(self, other: "Interval") -> "Interval":
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "Interval") -> "Interval":
        if self.is_empty or other.is_empty:
            return EMPTY
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else EMPTY

    def __add__(self, other: "Interval") -> "Interval":
        if self.is_empty or other.is_empty:
            return EMPTY
        return Interval(_dn(self.lo + other.lo), _up(self.hi + other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        if self.is_empty or other.is_empty:
            return EMPTY
        return Interval(_dn(self.lo - other.hi), _up(self.hi - other.lo))

    def __neg__(self) -> "Interval":
        if self.is_empty:
            return EMPTY
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        if self.is_empty or other.is_empty:
            return EMPTY
        p1 = self.lo * other.lo
        p2 = self.lo * other.hi
        p3 = self.hi * other.lo
        p4 = self.hi * other.hi
        return Interval(_dn(min(p1, p2, p3, p4)), _up(max(p1, p2, p3, p4)))

    def __repr__(self) -> str:
        if self.is_empty:
            return "Interval(empty)"
        return f"Interval({self.lo!r}, {self.hi!r})"


EMPTY = Interval(_INF, -_INF)


@dataclass(frozen=True, slots=True)
class Box2:
    """Axis-aligned 2D box: a Cartesian product of two intervals.

    Empty iff either component is empty.  Units are contextual: seconds for
    time-pair boxes, meters (or m/s) for displacement and velocity boxes.
    """

    x: Interval
    y: Interval

    @property
    def is_empty(self) -> bool:
        return self.x.is_empty or self.y.is_empty

    @property
    def contains_zero(self) -> bool:
        return not self.is_empty and 0.0 in self.x and 0.0 in self.y

    def hull(self, other: "Box2") -> "Box2":
        return Box2(self.x.hull(other.x), self.y.hull(other.y))

    def intersect(self, other: "Box2") -> "Box2":
        return Box2(self.x.intersect(other.x), self.y.intersect(other.y))

    def __add__(self, other: "Box2") -> "Box2":
        return Box2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Box2") -> "Box2":
        return Box2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Box2":
        return Box2(-self.x, -self.y)

    def __repr__(self) -> str:
        return f"Box2({self.x!r}, {self.y!r})"



def det2(a11: Interval, a12: Interval, a21: Interval, a22: Interval) -> Interval:
    """Enclosure of the determinant of a 2x2 interval matrix."""
    return a11 * a22 - a12 * a21
