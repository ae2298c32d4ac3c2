"""Exact rational reachability and reward functions via state elimination.

This is the in-repo ground truth for small parametric chains: eliminating a
state with self-loop weight L rescales every bypass u -> v -> w by
1/(1 - L).  Reward accumulators are carried probability-weighted so merging
parallel paths stays additive; the reward rule is validated against the
numeric checker at sample points rather than trusted structurally.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import NotAlmostSure, SymbolicZeroDenominator, TooLarge
from .model import PDtmc, PDtmrm
from .poly import MPoly, RatFun, ratfun_of_expr
from .rng import Xoshiro256StarStar

STATE_CAP = 64


def _support_closure(support, start: int) -> set[int]:
    seen = {start}
    frontier = [start]
    succ: dict[int, list[int]] = {}
    for (u, v) in support:
        succ.setdefault(u, []).append(v)
    while frontier:
        u = frontier.pop()
        for v in succ.get(u, ()):
            if v not in seen:
                seen.add(v)
                frontier.append(v)
    return seen


def _backward(support, seed: set[int]) -> set[int]:
    seen = set(seed)
    frontier = list(seed)
    pred: dict[int, list[int]] = {}
    for (u, v) in support:
        pred.setdefault(v, []).append(u)
    while frontier:
        v = frontier.pop()
        for u in pred.get(v, ()):
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    return seen


class ElimChain:
    """Working graph with exact rational edge weights (and reward terms)."""

    def __init__(self, model: PDtmc, target: set[int], reward=None):
        if model.n_states > STATE_CAP:
            raise TooLarge(f"{model.n_states} states exceeds the cap of {STATE_CAP}")
        n = model.space.dim
        self.n_params = n
        self.init = model.init
        support = model.support()
        # Qualitative pruning on edge support: drop states that are
        # unreachable from init or cannot reach the target at all.
        reachable = _support_closure(support, model.init)
        can_reach = _backward(support, set(target))
        self.target = set(target) & reachable
        keep = reachable & (can_reach | self.target)
        self.weights: dict[tuple[int, int], RatFun] = {}
        self.rewards: dict[tuple[int, int], RatFun] | None = None if reward is None else {}
        for (u, v), expr in model.trans.items():
            if u in keep and v in keep and u not in self.target:
                w = ratfun_of_expr(expr, n)
                self.weights[(u, v)] = w
                if reward is not None:
                    state_rw, edge_rw = reward
                    r = Fraction(state_rw.get(u, 0.0)).limit_denominator(10 ** 12) \
                        + Fraction(edge_rw.get((u, v), 0.0)).limit_denominator(10 ** 12)
                    self.rewards[(u, v)] = w * RatFun.constant(n, r)
        self.alive = sorted((keep - self.target) - {self.init})

    def _neighbors(self, s: int) -> tuple[list[int], list[int]]:
        preds = sorted({u for (u, v) in self.weights if v == s and u != s})
        succs = sorted({v for (u, v) in self.weights if u == s and v != s})
        return preds, succs

    def _pick_state(self) -> int:
        # Minimal-degree heuristic; ties resolved by state index.
        best, best_cost = None, None
        for s in self.alive:
            preds, succs = self._neighbors(s)
            cost = len(preds) * len(succs)
            if best_cost is None or cost < best_cost or (cost == best_cost and s < best):
                best, best_cost = s, cost
        return best

    def eliminate(self, s: int):
        one = RatFun.constant(self.n_params, 1)
        zero = RatFun.constant(self.n_params, 0)
        loop = self.weights.get((s, s), zero)
        denom = one - loop
        if denom.num.is_zero():
            raise SymbolicZeroDenominator(
                f"state {s} has an identically-one self loop")
        preds, succs = self._neighbors(s)
        loop_reward = self.rewards.get((s, s), zero) if self.rewards is not None else None
        for u in preds:
            w_uv = self.weights[(u, s)]
            for v in succs:
                w_vx = self.weights[(s, v)]
                bypass = w_uv * w_vx / denom
                self.weights[(u, v)] = self.weights.get((u, v), zero) + bypass
                if self.rewards is not None:
                    r_uv = self.rewards[(u, s)]
                    r_vx = self.rewards[(s, v)]
                    acc = (w_vx / denom) * r_uv \
                        + (w_uv * w_vx / (denom * denom)) * loop_reward \
                        + (w_uv / denom) * r_vx
                    self.rewards[(u, v)] = self.rewards.get((u, v), zero) + acc
        for key in [k for k in self.weights if s in k]:
            del self.weights[key]
            if self.rewards is not None:
                del self.rewards[key]
        self.alive.remove(s)

    def run(self, order=None) -> None:
        if order is not None:
            for s in order:
                self.eliminate(s)
        else:
            while self.alive:
                self.eliminate(self._pick_state())


def eliminate_reachability(model: PDtmc | PDtmrm, target: set[int], order=None) -> RatFun:
    """Exact probability of reaching `target` from init, as a function of the
    parameters.  Agrees with the numeric checker at every in-box point."""
    chain = model.chain if isinstance(model, PDtmrm) else model
    n = chain.space.dim
    if chain.init in target:
        return RatFun.constant(n, 1)
    ec = ElimChain(chain, set(target))
    if not ec.target:
        return RatFun.constant(n, 0)
    ec.run(order)
    one = RatFun.constant(n, 1)
    zero = RatFun.constant(n, 0)
    into_target = zero
    for t in ec.target:
        into_target = into_target + ec.weights.get((ec.init, t), zero)
    if into_target.num.is_zero():
        return zero
    loop = ec.weights.get((ec.init, ec.init), zero)
    denom = one - loop
    if denom.num.is_zero():
        raise SymbolicZeroDenominator("initial state has an identically-one self loop")
    return into_target / denom


def eliminate_reward(model: PDtmrm, target: set[int], reward: str | None = None,
                     order=None) -> RatFun:
    """Exact expected cumulative reward to `target`; requires almost-sure
    reachability over the whole box."""
    if reward is None:
        if len(model.rewards) != 1:
            raise KeyError(f"reward name required; model defines {sorted(model.rewards)}")
        reward = next(iter(model.rewards))
    if reward not in model.rewards:
        raise KeyError(f"model defines no reward structure {reward!r}")
    reach = eliminate_reachability(model, target)
    if not _is_identically_one(reach, model.chain.space.dim):
        raise NotAlmostSure("target is not reached with probability one; "
                            "expected reward is infinite somewhere")
    n = model.chain.space.dim
    if model.chain.init in target:
        return RatFun.constant(n, 0)
    ec = ElimChain(model.chain, set(target), reward=model.rewards[reward])
    ec.run(order)
    zero = RatFun.constant(n, 0)
    one = RatFun.constant(n, 1)
    loop = ec.weights.get((ec.init, ec.init), zero)
    denom = one - loop
    if denom.num.is_zero():
        raise SymbolicZeroDenominator("initial state has an identically-one self loop")
    exit_weight = zero
    exit_reward = zero
    for t in ec.target:
        exit_weight = exit_weight + ec.weights.get((ec.init, t), zero)
        exit_reward = exit_reward + ec.rewards.get((ec.init, t), zero)
    loop_reward = ec.rewards.get((ec.init, ec.init), zero)
    # Total = expected reward from self loops + conditional reward of the exit.
    return loop_reward / denom + exit_reward / exit_weight


def _is_identically_one(f: RatFun, n: int, trials: int = 16, seed: int = 0x1DE77) -> bool:
    """Randomized polynomial-identity test for f == 1 (exact evaluation)."""
    if f.num == f.den:
        return True
    gen = Xoshiro256StarStar(seed)
    checked = 0
    while checked < trials:
        point = [Fraction(gen.next_u64() % 10_000_019, 10_000_019) for _ in range(max(n, 1))]
        den = f.den.eval_exact(point)
        if den == 0:
            continue
        if f.num.eval_exact(point) != den:
            return False
        checked += 1
    return True


def ratfun_agrees(g: RatFun, oracle, space, n_points: int = 100, tol: float = 1e-9,
                  seed: int = 0xA9EE) -> bool:
    """Check |g(x) - oracle(x)| <= tol at seeded uniform in-box points."""
    if n_points < 1:
        raise ValueError("n_points must be at least 1")
    gen = Xoshiro256StarStar(seed)
    lo, hi = space.lows, space.highs
    for _ in range(n_points):
        u = np.array([gen.next_double() for _ in range(space.dim)])
        x = lo + u * (hi - lo)
        if abs(g.eval_float(x) - float(oracle(x))) > tol:
            return False
    return True
