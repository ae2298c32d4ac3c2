"""Exact multivariate polynomial and rational-function arithmetic.

Coefficients are arbitrary-precision rationals; monomials are ordered by
total degree, then lexicographically on the exponent tuple.  That order is
fixed once so serialized polynomials are byte-stable.  Rational functions
are normalized to integer coefficients with joint content removed and a
positive coefficient on the denominator's first (lowest-order) term; full
multivariate GCD cancellation is deliberately not performed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import DivisionByZero, ZeroDenominator
from .expr import Add, Const, Div, Expr, Mul, Neg, Param, Sub, _fraction_to_text


def _term_key(alpha: tuple[int, ...]):
    return (sum(alpha), alpha)


class MPoly:
    """Multivariate polynomial: map exponent tuple -> nonzero Fraction."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[tuple[int, ...], Fraction] | None = None):
        self.n = n
        self.terms: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for alpha, coeff in terms.items():
                coeff = Fraction(coeff)
                if coeff != 0:
                    if len(alpha) != n:
                        raise ValueError(f"exponent {alpha} has wrong length for n={n}")
                    self.terms[tuple(alpha)] = coeff

    @staticmethod
    def zero(n: int) -> "MPoly":
        return MPoly(n)

    @staticmethod
    def constant(n: int, value) -> "MPoly":
        return MPoly(n, {(0,) * n: Fraction(value)})

    @staticmethod
    def variable(n: int, index: int) -> "MPoly":
        alpha = [0] * n
        alpha[index] = 1
        return MPoly(n, {tuple(alpha): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(a) == 0 for a in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.n, Fraction(0))

    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def __eq__(self, other):
        return isinstance(other, MPoly) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def _check(self, other: "MPoly"):
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "MPoly") -> "MPoly":
        self._check(other)
        out = dict(self.terms)
        for alpha, coeff in other.terms.items():
            out[alpha] = out.get(alpha, Fraction(0)) + coeff
        return MPoly(self.n, out)

    def __sub__(self, other: "MPoly") -> "MPoly":
        self._check(other)
        out = dict(self.terms)
        for alpha, coeff in other.terms.items():
            out[alpha] = out.get(alpha, Fraction(0)) - coeff
        return MPoly(self.n, out)

    def __neg__(self) -> "MPoly":
        return MPoly(self.n, {a: -c for a, c in self.terms.items()})

    def __mul__(self, other: "MPoly") -> "MPoly":
        self._check(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for a1, c1 in self.terms.items():
            for a2, c2 in other.terms.items():
                alpha = tuple(x + y for x, y in zip(a1, a2))
                out[alpha] = out.get(alpha, Fraction(0)) + c1 * c2
        return MPoly(self.n, out)

    def scale(self, factor) -> "MPoly":
        factor = Fraction(factor)
        return MPoly(self.n, {a: c * factor for a, c in self.terms.items()})

    def pow(self, exponent: int) -> "MPoly":
        if exponent < 0:
            raise ValueError("negative polynomial power")
        result = MPoly.constant(self.n, 1)
        base = self
        k = exponent
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def diff(self, index: int) -> "MPoly":
        out: dict[tuple[int, ...], Fraction] = {}
        for alpha, coeff in self.terms.items():
            if alpha[index] == 0:
                continue
            beta = list(alpha)
            beta[index] -= 1
            out[tuple(beta)] = out.get(tuple(beta), Fraction(0)) + coeff * alpha[index]
        return MPoly(self.n, out)

    def eval_exact(self, point) -> Fraction:
        total = Fraction(0)
        for alpha, coeff in self.terms.items():
            term = coeff
            for x, a in zip(point, alpha):
                if a:
                    term *= Fraction(x) ** a
            total += term
        return total

    def eval_float(self, point) -> float:
        total = 0.0
        for alpha, coeff in self.terms.items():
            term = float(coeff)
            for x, a in zip(point, alpha):
                if a:
                    term *= float(x) ** a
            total += term
        return total

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self.terms.items(), key=lambda item: _term_key(item[0]))

    def leading_coefficient(self) -> Fraction:
        """Coefficient of the first term in canonical order (0 when zero)."""
        items = self.sorted_terms()
        return items[0][1] if items else Fraction(0)

    def to_text(self, names) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (alpha, coeff) in enumerate(self.sorted_terms()):
            factors = [f"{names[j]}^{a}" if a > 1 else names[j]
                       for j, a in enumerate(alpha) if a > 0]
            magnitude = _fraction_to_rational_text(abs(coeff))
            body = "*".join([magnitude] + factors) if factors else magnitude
            if i == 0:
                parts.append(f"-{body}" if coeff < 0 else body)
            else:
                parts.append(f"- {body}" if coeff < 0 else f"+ {body}")
        return " ".join(parts)


def _fraction_to_rational_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _integer_content(polys: list[MPoly]) -> tuple[int, int]:
    """(lcm of coeff denominators, gcd of scaled integer coeffs) over all polys."""
    lcm = 1
    for p in polys:
        for c in p.terms.values():
            lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    g = 0
    for p in polys:
        for c in p.terms.values():
            g = gcd(g, abs(c.numerator * (lcm // c.denominator)))
    return lcm, max(g, 1)


class RatFun:
    """Quotient of two exact polynomials, kept in normalized form."""

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly):
        if den.is_zero():
            raise ZeroDenominator("rational function with zero denominator")
        if num.n != den.n:
            raise ValueError("dimension mismatch between numerator and denominator")
        lcm, content = _integer_content([num, den])
        factor = Fraction(lcm, content)
        num = num.scale(factor)
        den = den.scale(factor)
        if den.leading_coefficient() < 0:
            num = -num
            den = -den
        self.num = num
        self.den = den

    @staticmethod
    def constant(n: int, value) -> "RatFun":
        return RatFun(MPoly.constant(n, value), MPoly.constant(n, 1))

    @staticmethod
    def from_poly(poly: MPoly) -> "RatFun":
        return RatFun(poly, MPoly.constant(poly.n, 1))

    @property
    def n(self) -> int:
        return self.num.n

    def __eq__(self, other):
        return isinstance(other, RatFun) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other: "RatFun") -> "RatFun":
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RatFun") -> "RatFun":
        return RatFun(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RatFun":
        return RatFun(-self.num, self.den)

    def __mul__(self, other: "RatFun") -> "RatFun":
        return RatFun(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFun") -> "RatFun":
        if other.num.is_zero():
            raise DivisionByZero("division by the zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def diff(self, index: int) -> "RatFun":
        return RatFun(self.num.diff(index) * self.den - self.num * self.den.diff(index),
                      self.den * self.den)

    def eval_exact(self, point) -> Fraction:
        den = self.den.eval_exact(point)
        if den == 0:
            raise DivisionByZero(f"denominator vanishes at {point}")
        return self.num.eval_exact(point) / den

    def eval_float(self, point) -> float:
        den = self.den.eval_float(point)
        if den == 0.0:
            raise DivisionByZero(f"denominator vanishes at {list(point)}")
        return self.num.eval_float(point) / den

    def is_constant_one(self) -> bool:
        return self.num == self.den

    def to_text(self, names) -> str:
        num_text = self.num.to_text(names)
        if self.den.is_constant() and self.den.constant_value() == 1:
            return num_text
        if len(self.num.terms) > 1:
            num_text = f"({num_text})"
        return f"{num_text} / ({self.den.to_text(names)})"


def ratfun_of_expr(e: Expr, n: int) -> RatFun:
    """Exact rational-function form of an expression tree."""
    if isinstance(e, Const):
        return RatFun.constant(n, e.value)
    if isinstance(e, Param):
        return RatFun.from_poly(MPoly.variable(n, e.index))
    if isinstance(e, Add):
        return ratfun_of_expr(e.lhs, n) + ratfun_of_expr(e.rhs, n)
    if isinstance(e, Sub):
        return ratfun_of_expr(e.lhs, n) - ratfun_of_expr(e.rhs, n)
    if isinstance(e, Mul):
        return ratfun_of_expr(e.lhs, n) * ratfun_of_expr(e.rhs, n)
    if isinstance(e, Div):
        den = ratfun_of_expr(e.rhs, n)
        if den.num.is_zero():
            raise ZeroDenominator(f"denominator {e.rhs} is identically zero")
        return ratfun_of_expr(e.lhs, n) / den
    if isinstance(e, Neg):
        return -ratfun_of_expr(e.sub, n)
    raise TypeError(f"unsupported expression node {type(e).__name__}")
