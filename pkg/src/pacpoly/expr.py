"""Expression trees over parameters: constants, +, -, *, /, unary minus.

Three evaluation modes share one tree: IEEE double (the sampling hot path),
interval enclosure over a box, and exact rationals (used by the conversion
to exact rational-function form).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DivisionByZero
from .intervals import Interval


class Expr:
    """Base class; subclasses are immutable node dataclasses."""

    def eval(self, point) -> float:
        raise NotImplementedError

    def eval_interval(self, box: list[Interval]) -> Interval:
        raise NotImplementedError

    def eval_exact(self, point: list[Fraction]) -> Fraction:
        raise NotImplementedError

    def _prec(self) -> int:
        return 100

    def __add__(self, other):
        return Add(self, _coerce(other))

    def __sub__(self, other):
        return Sub(self, _coerce(other))

    def __mul__(self, other):
        return Mul(self, _coerce(other))

    def __truediv__(self, other):
        return Div(self, _coerce(other))

    def __neg__(self):
        return Neg(self)


def _coerce(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return Const(Fraction(x))


def _fraction_to_text(value: Fraction) -> str:
    """Exact decimal when the denominator is 2^a 5^b, else a/b."""
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num)
    twos = fives = 0
    d = den
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{num}/{den}"
    digits = max(twos, fives)
    scaled = num * 10 ** digits // den
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled)).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}" if digits else f"{sign}{text}"


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def eval(self, point):
        return float(self.value)

    def eval_interval(self, box):
        return Interval.point(float(self.value))

    def eval_exact(self, point):
        return self.value

    def __str__(self):
        return _fraction_to_text(self.value)


@dataclass(frozen=True)
class Param(Expr):
    index: int
    name: str

    def eval(self, point):
        return float(point[self.index])

    def eval_interval(self, box):
        return box[self.index]

    def eval_exact(self, point):
        return point[self.index]

    def __str__(self):
        return self.name


def _wrap(child: Expr, parent_prec: int) -> str:
    text = str(child)
    return f"({text})" if child._prec() < parent_prec else text


@dataclass(frozen=True)
class Add(Expr):
    lhs: Expr
    rhs: Expr

    def eval(self, point):
        return self.lhs.eval(point) + self.rhs.eval(point)

    def eval_interval(self, box):
        return self.lhs.eval_interval(box) + self.rhs.eval_interval(box)

    def eval_exact(self, point):
        return self.lhs.eval_exact(point) + self.rhs.eval_exact(point)

    def _prec(self):
        return 1

    def __str__(self):
        return f"{_wrap(self.lhs, 1)} + {_wrap(self.rhs, 2)}"


@dataclass(frozen=True)
class Sub(Expr):
    lhs: Expr
    rhs: Expr

    def eval(self, point):
        return self.lhs.eval(point) - self.rhs.eval(point)

    def eval_interval(self, box):
        return self.lhs.eval_interval(box) - self.rhs.eval_interval(box)

    def eval_exact(self, point):
        return self.lhs.eval_exact(point) - self.rhs.eval_exact(point)

    def _prec(self):
        return 1

    def __str__(self):
        return f"{_wrap(self.lhs, 1)} - {_wrap(self.rhs, 2)}"


@dataclass(frozen=True)
class Mul(Expr):
    lhs: Expr
    rhs: Expr

    def eval(self, point):
        return self.lhs.eval(point) * self.rhs.eval(point)

    def eval_interval(self, box):
        return self.lhs.eval_interval(box) * self.rhs.eval_interval(box)

    def eval_exact(self, point):
        return self.lhs.eval_exact(point) * self.rhs.eval_exact(point)

    def _prec(self):
        return 2

    def __str__(self):
        return f"{_wrap(self.lhs, 2)} * {_wrap(self.rhs, 3)}"


@dataclass(frozen=True)
class Div(Expr):
    lhs: Expr
    rhs: Expr

    def eval(self, point):
        den = self.rhs.eval(point)
        if den == 0.0:
            raise DivisionByZero(f"denominator {self.rhs} is zero at {list(point)}")
        return self.lhs.eval(point) / den

    def eval_interval(self, box):
        return self.lhs.eval_interval(box) / self.rhs.eval_interval(box)

    def eval_exact(self, point):
        den = self.rhs.eval_exact(point)
        if den == 0:
            raise DivisionByZero(f"denominator {self.rhs} is zero at {point}")
        return self.lhs.eval_exact(point) / den

    def _prec(self):
        return 2

    def __str__(self):
        return f"{_wrap(self.lhs, 2)} / {_wrap(self.rhs, 3)}"


@dataclass(frozen=True)
class Neg(Expr):
    sub: Expr

    def eval(self, point):
        return -self.sub.eval(point)

    def eval_interval(self, box):
        return -self.sub.eval_interval(box)

    def eval_exact(self, point):
        return -self.sub.eval_exact(point)

    def _prec(self):
        return 2

    def __str__(self):
        return f"-{_wrap(self.sub, 3)}"


def expr_eval(e: Expr, point) -> float:
    """IEEE double evaluation at a point (coordinates in parameter order)."""
    return e.eval(point)


def expr_eval_interval(e: Expr, box) -> Interval:
    """Range enclosure over a box given as a list of (lo, hi) or Intervals."""
    cells = [b if isinstance(b, Interval) else Interval(float(b[0]), float(b[1])) for b in box]
    return e.eval_interval(cells)


def box_intervals(space) -> list[Interval]:
    return [Interval(lo, hi) for _, lo, hi in space.params]
