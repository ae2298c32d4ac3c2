"""Parametric Markov chains and reward models, and their instantiation.

Absorbing states carry an explicit self-loop so the row-sum rule is uniform.
All model values are immutable after construction and safe to share across
threads; ``instantiate`` may be called concurrently on one model.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DivisionByZero, IntervalDivisionByZero, NegativeProbability, OutOfBox, RowSumViolation
from .expr import Const, Expr, box_intervals
from .space import ParamSpace

ROW_SUM_TOL = 1e-9

ALWAYS_POSITIVE = "AlwaysPositive"
ALWAYS_ZERO = "AlwaysZero"
INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class EdgeVerdict:
    src: int
    dst: int
    verdict: str


@dataclass(frozen=True)
class Assumption1Report:
    verdicts: tuple[EdgeVerdict, ...]

    def all_definite(self) -> bool:
        return all(v.verdict != INDETERMINATE for v in self.verdicts)

    def indeterminate(self) -> tuple[EdgeVerdict, ...]:
        return tuple(v for v in self.verdicts if v.verdict == INDETERMINATE)


class PDtmc:
    """Parametric chain: states, one initial state, Expr-weighted edges, labels."""

    def __init__(self, states, init, trans, labels, space: ParamSpace, _warn_indeterminate=True):
        self.states = tuple(states)
        self.init = int(init)
        self.trans: dict[tuple[int, int], Expr] = dict(trans)
        self.labels: dict[str, frozenset[int]] = {k: frozenset(v) for k, v in labels.items()}
        self.space = space
        self._validate(_warn_indeterminate)

    @property
    def n_states(self) -> int:
        return len(self.states)

    def __eq__(self, other):
        return (isinstance(other, PDtmc)
                and self.states == other.states
                and self.init == other.init
                and self.trans == other.trans
                and self.labels == other.labels
                and self.space == other.space)

    def support(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.trans.keys())

    def successors(self, s: int) -> list[int]:
        return sorted(t for (u, t) in self.trans if u == s)

    def _validate(self, warn_indeterminate: bool):
        n = self.n_states
        if not 0 <= self.init < n:
            raise ValueError(f"initial state index {self.init} out of range")
        for (u, v) in self.trans:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references unknown state")
        outgoing = {u for (u, _) in self.trans}
        for s in range(n):
            if s not in outgoing:
                raise ValueError(f"state {self.states[s]} has no outgoing transition")
        for name, members in self.labels.items():
            for s in members:
                if not 0 <= s < n:
                    raise ValueError(f"label {name!r} references unknown state index {s}")
        center = self.space.center()
        for s in range(n):
            row = sum(e.eval(center) for (u, _), e in self.trans.items() if u == s)
            if abs(row - 1.0) > ROW_SUM_TOL:
                raise RowSumViolation(
                    f"row of {self.states[s]} sums to {row} at the box center")
        report = validate_assumption1(self)
        if warn_indeterminate and not report.all_definite():
            bad = ", ".join(f"{self.states[v.src]}->{self.states[v.dst]}"
                            for v in report.indeterminate())
            warnings.warn(f"edge sign indeterminate over the box (support may vary): {bad}",
                          stacklevel=3)


class PDtmrm:
    """A parametric chain plus named nonnegative reward structures."""

    def __init__(self, chain: PDtmc, rewards=None):
        self.chain = chain
        self.rewards: dict[str, tuple[dict[int, float], dict[tuple[int, int], float]]] = {}
        for name, (state_rw, edge_rw) in (rewards or {}).items():
            state_rw = {int(s): float(r) for s, r in state_rw.items()}
            edge_rw = {(int(u), int(v)): float(r) for (u, v), r in edge_rw.items()}
            for s, r in state_rw.items():
                if r < 0:
                    raise ValueError(f"negative state reward {r} in {name!r}")
            for (u, v), r in edge_rw.items():
                if r < 0:
                    raise ValueError(f"negative edge reward {r} in {name!r}")
                if (u, v) not in chain.trans:
                    raise ValueError(
                        f"reward {name!r} on missing edge {chain.states[u]}->{chain.states[v]}")
            self.rewards[name] = (state_rw, edge_rw)

    def __eq__(self, other):
        return (isinstance(other, PDtmrm)
                and self.chain == other.chain
                and self.rewards == other.rewards)

    # Delegation keeps call sites uniform over PDtmc | PDtmrm.
    @property
    def states(self):
        return self.chain.states

    @property
    def init(self):
        return self.chain.init

    @property
    def space(self):
        return self.chain.space

    @property
    def trans(self):
        return self.chain.trans

    @property
    def labels(self):
        return self.chain.labels

    @property
    def n_states(self):
        return self.chain.n_states

    def support(self):
        return self.chain.support()


@dataclass(frozen=True, eq=False)
class Dtmc:
    """A concrete chain induced by evaluating a parametric one at a point."""

    states: tuple[str, ...]
    init: int
    matrix: np.ndarray
    labels: dict[str, frozenset[int]]
    point: tuple[float, ...]
    support: frozenset[tuple[int, int]]
    rewards: dict[str, tuple[np.ndarray, np.ndarray]]

    @property
    def n_states(self) -> int:
        return len(self.states)

    def label_set(self, name: str) -> frozenset[int]:
        return self.labels.get(name, frozenset())


def _as_chain(model) -> tuple[PDtmc, dict]:
    if isinstance(model, PDtmrm):
        return model.chain, model.rewards
    return model, {}


def instantiate(model, point) -> Dtmc:
    """Evaluate every transition expression at an in-box point.

    Pure: the same (model, point) always yields the same chain.
    """
    chain, reward_defs = _as_chain(model)
    point = chain.space.require_inside(point)
    n = chain.n_states
    matrix = np.zeros((n, n))
    for (u, v), e in chain.trans.items():
        p = e.eval(point)
        if p < -ROW_SUM_TOL:
            raise NegativeProbability(
                f"edge {chain.states[u]}->{chain.states[v]} evaluates to {p} at {point.tolist()}")
        matrix[u, v] = min(max(p, 0.0), 1.0)
    row_sums = matrix.sum(axis=1)
    bad = np.nonzero(np.abs(row_sums - 1.0) > ROW_SUM_TOL)[0]
    if bad.size:
        s = int(bad[0])
        raise RowSumViolation(
            f"row of {chain.states[s]} sums to {row_sums[s]} at {point.tolist()}")
    rewards = {}
    for name, (state_rw, edge_rw) in reward_defs.items():
        sr = np.zeros(n)
        er = np.zeros((n, n))
        for s, r in state_rw.items():
            sr[s] = r
        for (u, v), r in edge_rw.items():
            er[u, v] = r
        rewards[name] = (sr, er)
    return Dtmc(states=chain.states, init=chain.init, matrix=matrix,
                labels=chain.labels, point=tuple(float(x) for x in point),
                support=chain.support(), rewards=rewards)


def validate_assumption1(model) -> Assumption1Report:
    """Interval-evaluate each edge over the box and classify its sign.

    Sound but incomplete: an edge whose enclosure straddles zero is reported
    Indeterminate rather than rejected.
    """
    chain, _ = _as_chain(model)
    box = box_intervals(chain.space)
    verdicts = []
    for (u, v) in sorted(chain.trans):
        e = chain.trans[(u, v)]
        if isinstance(e, Const) and e.value == 0:
            verdicts.append(EdgeVerdict(u, v, ALWAYS_ZERO))
            continue
        try:
            enclosure = e.eval_interval(box)
        except IntervalDivisionByZero:
            verdicts.append(EdgeVerdict(u, v, INDETERMINATE))
            continue
        if enclosure.lo > 0.0:
            verdicts.append(EdgeVerdict(u, v, ALWAYS_POSITIVE))
        else:
            verdicts.append(EdgeVerdict(u, v, INDETERMINATE))
    return Assumption1Report(tuple(verdicts))
