"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Pivots are fully deterministic (lowest eligible index enters; ties in the
ratio test break toward the lowest basic variable index), so the returned
vertex is a function of the input alone.  Dense tableau storage: problems
here are a few thousand rows by a few dozen structural columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
ITERATION_LIMIT = "IterationLimit"


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: str
    objective: float | None
    x: np.ndarray | None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None,
             max_iters: int = 100_000) -> LpSolution:
    """Minimize c @ x subject to A_ub x <= b_ub, A_eq x = b_eq, and per-variable
    (lo, hi) bounds (None means unbounded; default (0, None))."""
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.atleast_1d(np.asarray(b_ub, dtype=float))
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.atleast_1d(np.asarray(b_eq, dtype=float))
    if bounds is None:
        bounds = [(0.0, None)] * n
    bounds = list(bounds)

    # Substitute shifted / split / negated variables so everything is >= 0.
    # column_map[j] = list of (standard column, sign); offset[j] shifts back.
    column_map: list[list[tuple[int, float]]] = []
    offsets = np.zeros(n)
    extra_rows: list[tuple[np.ndarray, float]] = []
    n_std = 0
    for j, (lo, hi) in enumerate(bounds):
        if lo is None and hi is None:
            column_map.append([(n_std, 1.0), (n_std + 1, -1.0)])
            n_std += 2
        elif lo is None:
            offsets[j] = hi
            column_map.append([(n_std, -1.0)])
            n_std += 1
        else:
            offsets[j] = lo
            column_map.append([(n_std, 1.0)])
            if hi is not None:
                row = np.zeros(n)
                row[j] = 1.0
                extra_rows.append((row, float(hi)))
            n_std += 1

    def to_std(matrix: np.ndarray) -> np.ndarray:
        out = np.zeros((matrix.shape[0], n_std))
        for j, cols in enumerate(column_map):
            for col, sign in cols:
                out[:, col] += sign * matrix[:, j]
        return out

    if extra_rows:
        A_ub = np.vstack([A_ub] + [r for r, _ in extra_rows])
        b_ub = np.concatenate([b_ub, [v for _, v in extra_rows]])
    b_ub = b_ub - A_ub @ offsets
    b_eq = b_eq - A_eq @ offsets
    A_ub_s = to_std(A_ub)
    A_eq_s = to_std(A_eq)
    c_s = to_std(c.reshape(1, -1))[0]
    const_term = float(c @ offsets)

    rows = []
    senses = []
    rhs = []
    for i in range(A_ub_s.shape[0]):
        if b_ub[i] >= 0:
            rows.append(A_ub_s[i])
            senses.append("<=")
            rhs.append(b_ub[i])
        else:
            rows.append(-A_ub_s[i])
            senses.append(">=")
            rhs.append(-b_ub[i])
    for i in range(A_eq_s.shape[0]):
        if b_eq[i] >= 0:
            rows.append(A_eq_s[i])
            senses.append("=")
            rhs.append(b_eq[i])
        else:
            rows.append(-A_eq_s[i])
            senses.append("=")
            rhs.append(-b_eq[i])

    m = len(rows)
    n_slack = sum(1 for s in senses if s in ("<=", ">="))
    n_art = sum(1 for s in senses if s in (">=", "="))
    total = n_std + n_slack + n_art
    T = np.zeros((m, total + 1))
    basis = [0] * m
    slack_at = n_std
    art_at = n_std + n_slack
    art_cols = []
    for i in range(m):
        T[i, :n_std] = rows[i]
        T[i, -1] = rhs[i]
        if senses[i] == "<=":
            T[i, slack_at] = 1.0
            basis[i] = slack_at
            slack_at += 1
        elif senses[i] == ">=":
            T[i, slack_at] = -1.0
            slack_at += 1
            T[i, art_at] = 1.0
            basis[i] = art_at
            art_cols.append(art_at)
            art_at += 1
        else:
            T[i, art_at] = 1.0
            basis[i] = art_at
            art_cols.append(art_at)
            art_at += 1

    iters_left = [max_iters]

    def pivot(row: int, col: int, obj: np.ndarray):
        piv = T[row, col]
        T[row] /= piv
        factors = T[:, col].copy()
        factors[row] = 0.0
        T[:, :] -= np.outer(factors, T[row])
        obj[:] -= obj[col] * T[row]
        basis[row] = col

    blocked_mask = np.zeros(total + 1, dtype=bool)
    basis_arr = np.asarray(basis)

    def run_phase(obj: np.ndarray) -> str:
        # Bland's rule, vectorized: lowest negative-cost column enters; the
        # min-ratio row leaves, ties going to the lowest basic variable.
        while True:
            if iters_left[0] <= 0:
                return ITERATION_LIMIT
            iters_left[0] -= 1
            eligible = np.flatnonzero((obj[:total] < -PIVOT_TOL) & ~blocked_mask[:total])
            if eligible.size == 0:
                return OPTIMAL
            entering = int(eligible[0])
            col = T[:, entering]
            positive = col > PIVOT_TOL
            if not positive.any():
                return UNBOUNDED
            ratios = np.where(positive, T[:, -1] / np.where(positive, col, 1.0), np.inf)
            best = ratios.min()
            tied = np.flatnonzero(ratios <= best + PIVOT_TOL)
            leave = int(tied[np.argmin(basis_arr[tied])])
            pivot(leave, entering, obj)
            basis_arr[leave] = entering

    # Phase 1: drive the artificial variables to zero.
    if art_cols:
        obj1 = np.zeros(total + 1)
        for i in range(m):
            if basis[i] in art_cols:
                obj1 -= T[i]
        status = run_phase(obj1, blocked=set())
        if status == ITERATION_LIMIT:
            return LpSolution(ITERATION_LIMIT, None, None)
        if -obj1[-1] > FEAS_TOL:
            return LpSolution(INFEASIBLE, None, None)
        art_set = set(art_cols)
        for i in range(m):
            if basis[i] in art_set:
                for j in range(n_std + n_slack):
                    if abs(T[i, j]) > PIVOT_TOL:
                        pivot(i, j, obj1)
                        break
        # Rows still basic in an artificial are redundant zero rows; leaving
        # them is harmless because the artificial columns are blocked below.
    else:
        art_set = set()

    obj2 = np.zeros(total + 1)
    obj2[:n_std] = c_s
    for i in range(m):
        if obj2[basis[i]] != 0.0:
            obj2 -= obj2[basis[i]] * T[i]
    status = run_phase(obj2, blocked=art_set)
    if status != OPTIMAL:
        return LpSolution(status, None, None)

    x_std = np.zeros(total)
    for i in range(m):
        x_std[basis[i]] = T[i, -1]
    x = offsets.copy()
    for j, cols in enumerate(column_map):
        for col, sign in cols:
            x[j] += sign * x_std[col]
    return LpSolution(OPTIMAL, float(c @ x), x)
