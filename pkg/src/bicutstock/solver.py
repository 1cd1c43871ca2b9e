"""Exact LP and MILP solving used by every master and pricing model.

Two entry points:

* :func:`solve_lp` -- bounded-variable two-phase primal simplex with a
  dense explicit basis inverse.  Returns primal values, row duals and
  reduced costs.  Duals follow the minimization convention: a binding
  ``>=`` row carries a nonnegative dual, a binding ``<=`` row a
  nonpositive one, so the reduced cost of any column is
  ``c_j - duals @ column_j``.
* :func:`solve_milp` -- best-bound branch and bound over :func:`solve_lp`,
  branching on the most fractional integer variable with ties broken
  toward the lowest index, so repeated runs explore the identical tree.

The implementation favours reproducibility over speed: Dantzig pricing
with a Bland fallback once degenerate pivots pile up, periodic basis
refactorization, no presolve, no warm starts.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-7   # primal feasibility
DUAL_TOL = 1e-7   # reduced-cost optimality
INT_TOL = 1e-6    # integrality check in branch and bound

_PIVOT_TOL = 1e-9
_REFACTOR_EVERY = 100


class NumericFailure(RuntimeError):
    """Simplex could not recover a stable basis after anti-cycling retries."""


class LinearProgram:
    """Minimize ``obj @ v + offset`` over ``lb <= v <= ub`` and linear rows.

    Rows are added with :meth:`add_row` and kept in insertion order; duals
    come back in the same order.  ``integer`` flags mark variables that
    :func:`solve_milp` must drive integral; :func:`solve_lp` ignores them.
    """

    def __init__(self, num_vars: int):
        if num_vars < 1:
            raise ValueError("model needs at least one variable")
        self.n = num_vars
        self.obj = np.zeros(num_vars)
        self.lb = np.zeros(num_vars)
        self.ub = np.full(num_vars, math.inf)
        self.integer = np.zeros(num_vars, dtype=bool)
        self.offset = 0.0
        # When True, every feasible integer solution has an integer
        # objective, so node bounds may be rounded up in branch and bound.
        self.integral_objective = False
        self._coeffs: list[np.ndarray] = []
        self._senses: list[str] = []
        self._rhs: list[float] = []
        self._matrix: np.ndarray | None = None

    def add_row(self, coeffs, sense: str, rhs: float) -> int:
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"unknown row sense {sense!r}")
        row = np.zeros(self.n)
        if isinstance(coeffs, dict):
            for j, c in coeffs.items():
                row[j] = c
        else:
            arr = np.asarray(coeffs, dtype=float)
            if arr.shape != (self.n,):
                raise ValueError("row coefficient vector has wrong length")
            row[:] = arr
        self._coeffs.append(row)
        self._senses.append(sense)
        self._rhs.append(float(rhs))
        self._matrix = None
        return len(self._coeffs) - 1

    @property
    def num_rows(self) -> int:
        return len(self._coeffs)

    @property
    def senses(self) -> list[str]:
        return list(self._senses)

    @property
    def rhs(self) -> np.ndarray:
        return np.asarray(self._rhs, dtype=float)

    def row_matrix(self) -> np.ndarray:
        if self._matrix is None:
            if self._coeffs:
                self._matrix = np.vstack(self._coeffs)
            else:
                self._matrix = np.zeros((0, self.n))
        return self._matrix

    def validate(self) -> None:
        for name, arr in (("objective", self.obj), ("rhs", self.rhs),
                          ("rows", self.row_matrix())):
            if arr.size and not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite coefficients in {name}")
        if np.any(self.lb > self.ub + FEAS_TOL):
            raise ValueError("crossed variable bounds")


@dataclass
class LpResult:
    status: str                    # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float | None
    duals: np.ndarray | None       # one per row, model order
    reduced_costs: np.ndarray | None


@dataclass
class SolveLimits:
    """Stopping rules for :func:`solve_milp`; ``None`` disables a limit."""

    time_limit: float | None = None
    gap: float = 0.0
    node_limit: int | None = None

    def __post_init__(self):
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time limit must be positive")
        if self.gap < 0:
            raise ValueError("gap target must be nonnegative")
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValueError("node limit must be positive")


@dataclass
class MilpResult:
    """Branch-and-bound outcome.

    ``status`` is "optimal", "feasible-limit" (stopped at a limit; ``x``
    may be None when no incumbent was found in time) or "infeasible".
    ``bound`` is always a valid lower bound on the optimum.
    """

    status: str
    x: np.ndarray | None
    objective: float | None
    bound: float
    gap: float
    nodes: int
    seconds: float


class _Simplex:
    """Working state for one LP solve; owns all arrays."""

    def __init__(self, lp: LinearProgram, lb: np.ndarray, ub: np.ndarray):
        r = lp.num_rows
        n = lp.n
        A0 = lp.row_matrix()
        self.b = lp.rhs.copy()
        # one slack per row, coefficient +1; the sense lives in its bounds
        slack_lo = np.zeros(r)
        slack_hi = np.zeros(r)
        for i, sense in enumerate(lp._senses):
            if sense == "<=":
                slack_lo[i], slack_hi[i] = 0.0, math.inf
            elif sense == ">=":
                slack_lo[i], slack_hi[i] = -math.inf, 0.0
            else:
                slack_lo[i], slack_hi[i] = 0.0, 0.0
        self.n_struct = n
        self.n_real = n + r
        self.A = np.hstack([A0, np.eye(r)]) if r else np.zeros((0, n))
        self.lo = np.concatenate([lb, slack_lo])
        self.hi = np.concatenate([ub, slack_hi])
        self.cost = np.concatenate([lp.obj, np.zeros(r)])
        self.r = r

    def solve(self) -> tuple[str, np.ndarray, np.ndarray]:
        """Return (status, values, duals); values cover structural+slack."""
        r = self.r
        if r == 0:
            return self._solve_unconstrained()
        # start every variable at a finite bound
        val = np.where(np.isfinite(self.lo), self.lo, self.hi)
        if not np.all(np.isfinite(val)):
            raise ValueError("every variable needs at least one finite bound")
        resid = self.b - self.A @ val
        sign = np.where(resid >= 0, 1.0, -1.0)
        self.A = np.hstack([self.A, np.diag(sign)])
        self.lo = np.concatenate([self.lo, np.zeros(r)])
        self.hi = np.concatenate([self.hi, np.full(r, math.inf)])
        self.val = np.concatenate([val, np.abs(resid)])
        self.basis = np.arange(self.n_real, self.n_real + r)
        self.in_basis = np.zeros(self.n_real + r, dtype=bool)
        self.in_basis[self.basis] = True
        self.at_upper = ~np.isfinite(self.lo)
        self.Binv = np.diag(sign)

        phase1_cost = np.zeros(self.n_real + r)
        phase1_cost[self.n_real:] = 1.0
        status = self._iterate(phase1_cost, allow_unbounded=False)
        assert status == "optimal"
        infeas = float(self.val[self.n_real:].sum())
        if infeas > FEAS_TOL * (1.0 + float(np.abs(self.b).max(initial=0.0))):
            return "infeasible", self.val[:self.n_real], np.zeros(r)
        self._expel_artificials()
        # artificials stay fixed at zero from here on
        self.hi[self.n_real:] = 0.0

        cost = np.concatenate([self.cost, np.zeros(r)])
        status = self._iterate(cost, allow_unbounded=True)
        if status == "unbounded":
            return "unbounded", self.val[:self.n_real], np.zeros(r)
        self._refactor()
        duals = cost[self.basis] @ self.Binv
        return "optimal", self.val[:self.n_real], duals

    def _solve_unconstrained(self):
        val = np.where(self.cost >= 0, self.lo, self.hi)
        if not np.all(np.isfinite(val)):
            return "unbounded", val, np.zeros(0)
        return "optimal", val, np.zeros(0)

    def _refactor(self):
        B = self.A[:, self.basis]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise NumericFailure("singular basis") from exc
        nb = ~self.in_basis
        self.val[self.basis] = self.Binv @ (self.b - self.A[:, nb] @ self.val[nb])

    def _expel_artificials(self):
        """Pivot zero-valued basic artificials out where a real column allows it."""
        for pos in range(self.r):
            if self.basis[pos] < self.n_real:
                continue
            row = self.Binv[pos] @ self.A[:, :self.n_real]
            cands = np.where((~self.in_basis[:self.n_real]) & (np.abs(row) > 1e-7))[0]
            if cands.size == 0:
                continue  # redundant row; artificial stays fixed at zero
            q = int(cands[0])
            d = self.Binv @ self.A[:, q]
            self._replace_basis(pos, q, d)

    def _replace_basis(self, pos: int, q: int, d: np.ndarray):
        leaver = self.basis[pos]
        self.in_basis[leaver] = False
        self.in_basis[q] = True
        self.basis[pos] = q
        piv = d[pos]
        self.Binv[pos] /= piv
        mask = np.arange(self.r) != pos
        self.Binv[mask] -= np.outer(d[mask], self.Binv[pos])

    def _iterate(self, cost: np.ndarray, allow_unbounded: bool) -> str:
        r = self.r
        ncols = self.A.shape[1]
        bland = False
        degenerate = 0
        since_refactor = 0
        max_iter = 20000 + 100 * (ncols + r)
        free = self.hi > self.lo  # fixed variables never enter

        for _ in range(max_iter):
            y = cost[self.basis] @ self.Binv
            rc = cost - y @ self.A
            rc[self.basis] = 0.0
            nonbasic = ~self.in_basis
            cand_lo = nonbasic & ~self.at_upper & free & (rc < -DUAL_TOL)
            cand_hi = nonbasic & self.at_upper & free & (rc > DUAL_TOL)
            cand = np.where(cand_lo | cand_hi)[0]
            if cand.size == 0:
                return "optimal"
            if bland:
                q = int(cand[0])
            else:
                q = int(cand[np.argmax(np.abs(rc[cand]))])
            dirn = 1.0 if not self.at_upper[q] else -1.0

            d = self.Binv @ self.A[:, q]
            delta = dirn * d
            xB = self.val[self.basis]
            ratios = np.full(r, math.inf)
            pos = delta > _PIVOT_TOL
            neg = delta < -_PIVOT_TOL
            lo_b = self.lo[self.basis]
            hi_b = self.hi[self.basis]
            with np.errstate(invalid="ignore"):
                ratios[pos] = np.maximum(xB[pos] - lo_b[pos], 0.0) / delta[pos]
                ratios[neg] = np.maximum(hi_b[neg] - xB[neg], 0.0) / (-delta[neg])
            flip_cap = self.hi[q] - self.lo[q]
            t_row = float(ratios.min()) if r else math.inf
            t = min(t_row, flip_cap)
            if not math.isfinite(t):
                if allow_unbounded:
                    return "unbounded"
                raise NumericFailure("phase-1 step unbounded")

            if t < 1e-10:
                degenerate += 1
                if degenerate > 2 * (r + ncols):
                    bland = True
            if flip_cap <= t_row + 1e-12 and math.isfinite(flip_cap):
                # entering variable swaps bounds; basis unchanged
                self.val[self.basis] = xB - delta * flip_cap
                self.at_upper[q] = not self.at_upper[q]
                self.val[q] = self.hi[q] if self.at_upper[q] else self.lo[q]
                continue

            tied = np.where(ratios <= t + 1e-9)[0]
            if bland:
                i = int(tied[np.argmin(self.basis[tied])])
            else:
                i = int(tied[np.argmax(np.abs(delta[tied]))])
            t = max(ratios[i], 0.0)
            leaver = self.basis[i]
            new_xB = xB - delta * t
            self.val[self.basis] = new_xB
            # snap the leaver to the bound it hit
            if delta[i] > 0:
                self.val[leaver] = self.lo[leaver]
                self.at_upper[leaver] = False
            else:
                self.val[leaver] = self.hi[leaver]
                self.at_upper[leaver] = True
            entering_val = (self.lo[q] if dirn > 0 else self.hi[q]) + dirn * t
            self._replace_basis(i, q, d)
            self.val[q] = entering_val

            since_refactor += 1
            if since_refactor >= _REFACTOR_EVERY:
                self._refactor()
                since_refactor = 0
        raise NumericFailure("iteration limit exceeded; cycling suspected")


def solve_lp(lp: LinearProgram, lb: np.ndarray | None = None,
             ub: np.ndarray | None = None) -> LpResult:
    """Solve the LP relaxation of ``lp``; optional bound overrides."""
    lp.validate()
    use_lb = lp.lb if lb is None else lb
    use_ub = lp.ub if ub is None else ub
    if np.any(use_lb > use_ub + FEAS_TOL):
        return LpResult("infeasible", None, None, None, None)
    sx = _Simplex(lp, np.asarray(use_lb, dtype=float), np.asarray(use_ub, dtype=float))
    status, values, duals = sx.solve()
    if status != "optimal":
        return LpResult(status, None, None, None, None)
    x = values[:lp.n].copy()
    obj = float(lp.obj @ x) + lp.offset
    rc = lp.obj - duals @ lp.row_matrix() if lp.num_rows else lp.obj.copy()
    return LpResult("optimal", x, obj, np.asarray(duals, dtype=float), rc)


def _most_fractional(x: np.ndarray, integer: np.ndarray) -> int | None:
    frac = x - np.floor(x)
    dist = np.minimum(frac, 1.0 - frac)
    dist[~integer] = 0.0
    j = int(np.argmax(dist))
    if dist[j] <= INT_TOL:
        return None
    # ties to the lowest index
    best = dist[j]
    ties = np.where(dist >= best - 1e-12)[0]
    return int(ties[0])


def _dive_for_incumbent(lp: LinearProgram, lb: np.ndarray, ub: np.ndarray,
                        deadline: float | None) -> tuple[np.ndarray, float] | None:
    """Depth-first rounding dive: repeatedly fix the most fractional
    integer variable to its nearest value and resolve.  Supplies early
    incumbents; never changes what the tree search would prove."""
    cur_lb, cur_ub = lb.copy(), ub.copy()
    for _ in range(2 * lp.n + 20):
        if deadline is not None and time.perf_counter() > deadline:
            return None
        try:
            res = solve_lp(lp, cur_lb, cur_ub)
        except NumericFailure:
            return None
        if res.status != "optimal":
            return None
        j = _most_fractional(res.x, lp.integer)
        if j is None:
            x = res.x.copy()
            x[lp.integer] = np.round(x[lp.integer])
            return x, float(lp.obj @ x) + lp.offset
        target = math.floor(res.x[j] + 0.5)
        cur_lb[j] = cur_ub[j] = float(target)
    return None


def solve_milp(lp: LinearProgram, limits: SolveLimits | None = None) -> MilpResult:
    """Best-bound branch and bound; deterministic given the model and limits."""
    limits = limits or SolveLimits()
    t0 = time.perf_counter()

    def node_bound(value: float) -> float:
        if lp.integral_objective:
            return math.ceil(value - lp.offset - 1e-6) + lp.offset
        return value

    incumbent: np.ndarray | None = None
    inc_obj = math.inf
    nodes = 0
    counter = 0
    heap: list[tuple[float, int, np.ndarray, np.ndarray]] = []
    heapq.heappush(heap, (-math.inf, counter, lp.lb.copy(), lp.ub.copy()))
    final_bound = -math.inf
    status = None
    deadline = None if limits.time_limit is None else t0 + limits.time_limit

    def threshold() -> float:
        if not math.isfinite(inc_obj):
            return math.inf
        return inc_obj - max(limits.gap * max(1.0, abs(inc_obj)), 1e-9)

    def try_dive(nlb, nub):
        nonlocal incumbent, inc_obj
        dived = _dive_for_incumbent(lp, nlb, nub, deadline)
        if dived is not None and dived[1] < inc_obj - 1e-9:
            incumbent, inc_obj = dived

    while heap:
        key = heap[0][0]
        if key >= threshold():
            final_bound = key
            status = "optimal"
            break
        if limits.time_limit is not None and time.perf_counter() - t0 > limits.time_limit:
            final_bound = key
            status = "feasible-limit"
            break
        if limits.node_limit is not None and nodes >= limits.node_limit:
            final_bound = key
            status = "feasible-limit"
            break
        _, _, nlb, nub = heapq.heappop(heap)
        nodes += 1
        res = solve_lp(lp, nlb, nub)
        if res.status == "infeasible":
            continue
        if res.status == "unbounded":
            raise NumericFailure("unbounded relaxation in branch and bound")
        bound = node_bound(res.objective)
        if bound >= threshold():
            continue
        branch = _most_fractional(res.x, lp.integer)
        if branch is None:
            x = res.x.copy()
            x[lp.integer] = np.round(x[lp.integer])
            obj = float(lp.obj @ x) + lp.offset
            if obj < inc_obj - 1e-9:
                incumbent, inc_obj = x, obj
            continue
        if incumbent is None or nodes % 512 == 0:
            try_dive(nlb, nub)
            if bound >= threshold():
                continue
        v = res.x[branch]
        down_ub = nub.copy()
        down_ub[branch] = math.floor(v)
        counter += 1
        heapq.heappush(heap, (bound, counter, nlb.copy(), down_ub))
        up_lb = nlb.copy()
        up_lb[branch] = math.floor(v) + 1.0
        counter += 1
        heapq.heappush(heap, (bound, counter, up_lb, nub.copy()))

    if status is None:  # heap exhausted
        if incumbent is None:
            return MilpResult("infeasible", None, None, math.inf, 0.0,
                              nodes, time.perf_counter() - t0)
        final_bound = inc_obj
        status = "optimal"

    if incumbent is None:
        return MilpResult(status if status != "optimal" else "infeasible",
                          None, None, final_bound, math.inf,
                          nodes, time.perf_counter() - t0)
    bound = min(final_bound, inc_obj)
    gap = (inc_obj - bound) / max(1.0, abs(inc_obj))
    return MilpResult(status, incumbent, inc_obj, bound, max(gap, 0.0),
                      nodes, time.perf_counter() - t0)
