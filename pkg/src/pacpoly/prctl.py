"""AST for the probabilistic reward logic accepted by the formula parser.

Disjunction and eventually are desugared at parse time (De Morgan and
``true U``); ``true`` stays a primitive node because its satisfaction set
(all states) needs no atomic proposition to express.
"""

from __future__ import annotations

from dataclasses import dataclass

COMPARISONS = ("<", "<=", ">=", ">")


class StateFormula:
    pass


class PathFormula:
    pass


@dataclass(frozen=True)
class TrueF(StateFormula):
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Ap(StateFormula):
    name: str

    def __str__(self):
        return f'"{self.name}"'


@dataclass(frozen=True)
class Not(StateFormula):
    sub: StateFormula

    def __str__(self):
        return f"!{_atom(self.sub)}"


@dataclass(frozen=True)
class And(StateFormula):
    lhs: StateFormula
    rhs: StateFormula

    def __str__(self):
        return f"{_atom(self.lhs)} & {_atom(self.rhs)}"


def _atom(sf: StateFormula) -> str:
    if isinstance(sf, (Ap, TrueF, Not)):
        return str(sf)
    return f"({sf})"


@dataclass(frozen=True)
class Next(PathFormula):
    sub: StateFormula

    def __str__(self):
        return f"X {_atom(self.sub)}"


@dataclass(frozen=True)
class Until(PathFormula):
    lhs: StateFormula
    rhs: StateFormula

    def __str__(self):
        if isinstance(self.lhs, TrueF):
            return f"F {_atom(self.rhs)}"
        return f"{_atom(self.lhs)} U {_atom(self.rhs)}"


@dataclass(frozen=True)
class BoundedUntil(PathFormula):
    lhs: StateFormula
    rhs: StateFormula
    k: int

    def __str__(self):
        return f"{_atom(self.lhs)} U<={self.k} {_atom(self.rhs)}"


@dataclass(frozen=True)
class ProbQuery(StateFormula):
    path: PathFormula

    def __str__(self):
        return f"P=? [ {self.path} ]"


@dataclass(frozen=True)
class ProbBound(StateFormula):
    op: str
    bound: float
    path: PathFormula

    def __str__(self):
        return f"P{self.op}{_num(self.bound)} [ {self.path} ]"


@dataclass(frozen=True)
class RewardQuery(StateFormula):
    target: StateFormula
    reward: str | None = None

    def __str__(self):
        name = f"{{\"{self.reward}\"}}" if self.reward else ""
        return f"E{name}=? [ F {_atom(self.target)} ]"


@dataclass(frozen=True)
class RewardBound(StateFormula):
    op: str
    bound: float
    target: StateFormula
    reward: str | None = None

    def __str__(self):
        name = f"{{\"{self.reward}\"}}" if self.reward else ""
        return f"E{name}{self.op}{_num(self.bound)} [ F {_atom(self.target)} ]"


def _num(x: float) -> str:
    return repr(int(x)) if float(x).is_integer() else repr(float(x))
