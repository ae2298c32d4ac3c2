"""Closed-interval arithmetic used for range enclosure and branch-and-bound."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IntervalDivisionByZero


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @staticmethod
    def point(x: float) -> "Interval":
        return Interval(x, x)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        products = (self.lo * other.lo, self.lo * other.hi,
                    self.hi * other.lo, self.hi * other.hi)
        return Interval(min(products), max(products))

    def __truediv__(self, other: "Interval") -> "Interval":
        if other.contains_zero():
            raise IntervalDivisionByZero(f"denominator interval [{other.lo}, {other.hi}] contains 0")
        reciprocals = (1.0 / other.lo, 1.0 / other.hi)
        return self * Interval(min(reciprocals), max(reciprocals))

    def pow(self, exponent: int) -> "Interval":
        """x**k over the interval; even powers need the straddle-zero case."""
        if exponent < 0:
            raise ValueError("negative exponents are not supported")
        if exponent == 0:
            return Interval(1.0, 1.0)
        a, b = self.lo ** exponent, self.hi ** exponent
        if exponent % 2 == 1:
            return Interval(a, b)
        if self.contains_zero():
            return Interval(0.0, max(a, b))
        return Interval(min(a, b), max(a, b))

    def scale(self, c: float) -> "Interval":
        if c >= 0:
            return Interval(c * self.lo, c * self.hi)
        return Interval(c * self.hi, c * self.lo)
