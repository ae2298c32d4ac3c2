"""Model checking of concrete chains: satisfaction sets, reachability
probabilities, and expected rewards.

Quantitative values come from dense linear solves (LU with partial
pivoting); prob-0/prob-1 states are removed graph-theoretically first so
the systems are nonsingular by construction.  Everything here is pure, so
many instantiated chains can be checked concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import prctl
from .errors import MissingReward, SingularSystem
from .model import Dtmc, instantiate

VALUE_TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    """Either a satisfaction set (Boolean formulas) or the init-state value."""

    sat_set: frozenset[int] | None = None
    value: float | None = None

    @property
    def is_value(self) -> bool:
        return self.value is not None


def _edges(model: Dtmc) -> np.ndarray:
    return model.matrix > 0.0


def _backward_closure(edges: np.ndarray, seed: set[int], through: set[int]) -> set[int]:
    """States reaching `seed` via a path whose interior stays in `through`."""
    closure = set(seed)
    frontier = list(seed)
    preds = [set(np.nonzero(edges[:, v])[0]) for v in range(edges.shape[0])]
    while frontier:
        v = frontier.pop()
        for u in preds[v]:
            if u in closure or u not in through:
                continue
            closure.add(u)
            frontier.append(u)
    return closure


def _qualitative_until(edges: np.ndarray, A: set[int], B: set[int]) -> tuple[set[int], set[int]]:
    """(prob0, prob1) partition for the until problem on the given graph."""
    n = edges.shape[0]
    all_states = set(range(n))
    reach = _backward_closure(edges, set(B), set(A) - set(B))
    prob0 = all_states - reach
    stuck = _backward_closure(edges, prob0, set(A) - set(B))
    prob1 = all_states - stuck
    return prob0, prob1


def prob_until(model: Dtmc, A: set[int], B: set[int]) -> np.ndarray:
    """Per-state probability of reaching B along states of A."""
    n = model.n_states
    edges = _edges(model)
    prob0, prob1 = _qualitative_until(edges, set(A), set(B))
    x = np.zeros(n)
    x[sorted(prob1)] = 1.0
    unknown = sorted(set(range(n)) - prob0 - prob1)
    if unknown:
        idx = np.array(unknown)
        ones = np.array(sorted(prob1))
        P_uu = model.matrix[np.ix_(idx, idx)]
        b = model.matrix[np.ix_(idx, ones)].sum(axis=1) if ones.size else np.zeros(len(unknown))
        try:
            sol = np.linalg.solve(np.eye(len(unknown)) - P_uu, b)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(f"until system singular: {exc}") from exc
        x[idx] = sol
    return np.clip(x, 0.0, 1.0)


def prob_bounded_until(model: Dtmc, A: set[int], B: set[int], k: int) -> np.ndarray:
    """Probability of reaching B within k steps along A."""
    if k < 0:
        raise ValueError("step bound must be nonnegative")
    n = model.n_states
    in_b = np.zeros(n)
    in_b[sorted(B)] = 1.0
    mid = np.zeros(n, dtype=bool)
    mid[sorted(set(A) - set(B))] = True
    x = in_b.copy()
    for _ in range(k):
        x = in_b + mid * (model.matrix @ x)
    return np.clip(x, 0.0, 1.0)


def prob_next(model: Dtmc, B: set[int]) -> np.ndarray:
    indicator = np.zeros(model.n_states)
    indicator[sorted(B)] = 1.0
    return np.clip(model.matrix @ indicator, 0.0, 1.0)


def _reward_structure(model: Dtmc, name: str | None):
    if name is not None:
        if name not in model.rewards:
            raise MissingReward(f"model defines no reward structure {name!r}")
        return model.rewards[name]
    if len(model.rewards) == 1:
        return next(iter(model.rewards.values()))
    if not model.rewards:
        raise MissingReward("model defines no reward structure")
    raise MissingReward(
        f"reward name required; model defines {sorted(model.rewards)}")


def expected_reward_to(model: Dtmc, T: set[int], reward: str | None = None) -> np.ndarray:
    """Expected cumulative reward until first hitting T; +inf where T is
    reached with probability below one."""
    state_rw, edge_rw = _reward_structure(model, reward)
    n = model.n_states
    edges = _edges(model)
    _, prob1 = _qualitative_until(edges, set(range(n)), set(T))
    x = np.full(n, np.inf)
    x[sorted(T)] = 0.0
    interior = sorted(prob1 - set(T))
    if interior:
        idx = np.array(interior)
        c = state_rw[idx] + (model.matrix * edge_rw).sum(axis=1)[idx]
        P_ii = model.matrix[np.ix_(idx, idx)]
        try:
            sol = np.linalg.solve(np.eye(len(interior)) - P_ii, c)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(f"reward system singular: {exc}") from exc
        x[idx] = np.maximum(sol, 0.0)
    return x


def sat_states(model: Dtmc, sf: prctl.StateFormula) -> frozenset[int]:
    """Bottom-up satisfaction set of a Boolean state formula."""
    all_states = frozenset(range(model.n_states))
    if isinstance(sf, prctl.TrueF):
        return all_states
    if isinstance(sf, prctl.Ap):
        return model.label_set(sf.name)
    if isinstance(sf, prctl.Not):
        return all_states - sat_states(model, sf.sub)
    if isinstance(sf, prctl.And):
        return sat_states(model, sf.lhs) & sat_states(model, sf.rhs)
    if isinstance(sf, prctl.ProbBound):
        vec = _path_values(model, sf.path)
        return frozenset(np.nonzero(_compare(vec, sf.op, sf.bound))[0].tolist())
    if isinstance(sf, prctl.RewardBound):
        vec = expected_reward_to(model, set(sat_states(model, sf.target)), sf.reward)
        return frozenset(np.nonzero(_compare(vec, sf.op, sf.bound))[0].tolist())
    if isinstance(sf, (prctl.ProbQuery, prctl.RewardQuery)):
        raise ValueError("'=?' queries are only meaningful at the top level")
    raise TypeError(f"unsupported formula node {type(sf).__name__}")


def _compare(vec: np.ndarray, op: str, bound: float) -> np.ndarray:
    if op == "<":
        return vec < bound
    if op == "<=":
        return vec <= bound
    if op == ">=":
        return vec >= bound
    if op == ">":
        return vec > bound
    raise ValueError(f"unknown comparison {op!r}")


def _path_values(model: Dtmc, path: prctl.PathFormula) -> np.ndarray:
    if isinstance(path, prctl.Next):
        return prob_next(model, set(sat_states(model, path.sub)))
    if isinstance(path, prctl.BoundedUntil):
        return prob_bounded_until(model, set(sat_states(model, path.lhs)),
                                  set(sat_states(model, path.rhs)), path.k)
    if isinstance(path, prctl.Until):
        return prob_until(model, set(sat_states(model, path.lhs)),
                          set(sat_states(model, path.rhs)))
    raise TypeError(f"unsupported path node {type(path).__name__}")


def check(model: Dtmc, formula: prctl.StateFormula) -> CheckResult:
    """Evaluate a formula on a concrete chain; '=?' yields the init value."""
    if isinstance(formula, prctl.ProbQuery):
        return CheckResult(value=float(_path_values(model, formula.path)[model.init]))
    if isinstance(formula, prctl.RewardQuery):
        vec = expected_reward_to(model, set(sat_states(model, formula.target)), formula.reward)
        return CheckResult(value=float(vec[model.init]))
    return CheckResult(sat_set=sat_states(model, formula))


def formula_oracle(pmodel, formula: prctl.StateFormula):
    """Point -> value function backing the sampling loop: instantiate, check.

    Only '=?' queries denote a value function.
    """
    if not isinstance(formula, (prctl.ProbQuery, prctl.RewardQuery)):
        raise ValueError("a value oracle needs a 'P=?' or 'E=?' formula")

    def oracle(point) -> float:
        return check(instantiate(pmodel, point), formula).value

    return oracle
