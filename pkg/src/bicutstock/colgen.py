"""Column generation: the pricing loop, the initial pool, lexicographic points.

The loop alternates LP reoptimization with pricing on both dual families:
object-side columns are priced with the demand-row duals, cycle-side
columns with the cycle-cover duals.  It stops when neither side beats its
reduced-cost threshold, or when the demand duals repeat unchanged for a
configured number of consecutive iterations (degenerate stall guard).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (ExtraRow, Instance, IntegerSolution, MasterModel, Pattern,
                    build_master, build_mono_master, evaluate_point)
from .pricing import (PricedPattern, homogeneous_patterns, knapsack_1d,
                      price_2d, reduced_cost_threshold)
from .solver import LpResult, MilpResult, SolveLimits, solve_lp, solve_milp

IMPROVE_TOL = 1e-6
STALL_TOL = 1e-9


def _default_pricing_limits() -> SolveLimits:
    return SolveLimits(time_limit=15.0, gap=0.01)


def _default_master_limits() -> SolveLimits:
    return SolveLimits(time_limit=60.0, gap=0.0001)


@dataclass
class ColgenConfig:
    mode: str = "dynamic"                       # "static" | "dynamic"
    pricing_limits: SolveLimits = field(default_factory=_default_pricing_limits)
    master_limits: SolveLimits = field(default_factory=_default_master_limits)
    stall_cap: int = 5
    copy_cap: int = 120

    def __post_init__(self):
        if self.mode not in ("static", "dynamic"):
            raise ValueError(f"unknown column generation mode {self.mode!r}")
        if self.stall_cap < 1:
            raise ValueError("stall cap must be >= 1")

    @property
    def dynamic(self) -> bool:
        return self.mode == "dynamic"


@dataclass
class ColgenTrace:
    iterations: int = 0
    columns_added: int = 0
    lp_objective: float | None = None
    stalled: bool = False
    log: list[str] = field(default_factory=list)


def _price_side(instance: Instance, values: np.ndarray,
                config: ColgenConfig) -> PricedPattern:
    if instance.kind == "1d":
        return knapsack_1d(instance.object_length, instance.item_lengths, values)
    return price_2d(instance, values, limits=config.pricing_limits,
                    copy_cap=config.copy_cap)


def generate_columns(master: MasterModel, config: ColgenConfig
                     ) -> tuple[list[Pattern], LpResult, ColgenTrace]:
    """Grow the master's pattern pool until no column prices out.

    Returns the (mutated) pattern list, the terminal LP result and a
    trace.  An infeasible LP is returned as-is so callers can treat it as
    subproblem infeasibility.
    """
    trace = ColgenTrace()
    prev_duals: np.ndarray | None = None
    streak = 0
    while True:
        trace.iterations += 1
        res = solve_lp(master.to_lp(relax=True))
        if res.status != "optimal":
            return master.patterns, res, trace
        dx = master.demand_x_rows
        dy = master.demand_y_rows
        demand_duals = np.concatenate([res.duals[dx.start:dx.stop],
                                       res.duals[dy.start:dy.stop]])
        if prev_duals is not None and demand_duals.shape == prev_duals.shape \
                and np.all(np.abs(demand_duals - prev_duals) <= STALL_TOL):
            streak += 1
        else:
            streak = 1
        prev_duals = demand_duals
        if streak >= config.stall_cap:
            trace.stalled = True
            trace.lp_objective = res.objective
            trace.log.append(f"iter {trace.iterations}: stall guard fired")
            return master.patterns, res, trace

        improved = False
        for side, rows in (("x", dx), ("y", dy)):
            if side not in master.sides or len(rows) == 0:
                continue
            values = res.duals[rows.start:rows.stop]
            priced = _price_side(master.instance, values, config)
            if priced.pattern.is_empty:
                continue
            threshold = reduced_cost_threshold(master, res.duals, side)
            if priced.value > threshold + IMPROVE_TOL:
                if master.add_pattern(priced.pattern):
                    # re-check the certificate the pricing claims
                    recomputed = float(np.dot(priced.pattern.counts, values))
                    assert recomputed > threshold, "priced column does not beat its threshold"
                    improved = True
                    trace.columns_added += 1
                    trace.log.append(
                        f"iter {trace.iterations}: +{side} {priced.pattern.counts} "
                        f"value={priced.value:.6f} threshold={threshold:.6f}")
        if not improved:
            trace.lp_objective = res.objective
            return master.patterns, res, trace


def initial_columns(instance: Instance, config: ColgenConfig
                    ) -> tuple[list[Pattern], list[ColgenTrace]]:
    """Seed pool: homogeneous patterns enriched by two single-objective
    column generation runs (object cover, then cycle cover), merged and
    deduplicated."""
    homog = homogeneous_patterns(instance)
    merged: list[Pattern] = []
    seen: set[tuple[int, ...]] = set()

    def absorb(pats):
        for p in pats:
            if p.counts not in seen:
                seen.add(p.counts)
                merged.append(p)

    absorb(homog)
    traces = []
    for side in ("x", "y"):
        mono = build_mono_master(instance, homog, side)
        _, _, tr = generate_columns(mono, config)
        traces.append(tr)
        absorb(mono.patterns)
    return merged, traces


@dataclass
class LexResult:
    """Front endpoints: zL1 minimizes objects then cycles, zL2 the reverse."""

    zL1: tuple[int, int] | None
    zL2: tuple[int, int] | None
    zI: tuple[int, int] | None
    sol_L1: IntegerSolution | None
    sol_L2: IntegerSolution | None
    proven: bool
    milp_count: int
    colgen_iterations: int
    columns_added: int
    patterns: list[Pattern]
    aborted: bool = False


def lexicographic_points(instance: Instance, patterns, config: ColgenConfig,
                         cycle_rows: bool = True) -> LexResult:
    """Solve the four endpoint MILPs; in dynamic mode each one is preceded
    by column generation on its LP relaxation."""
    patterns = list(patterns)
    cg_iters = 0
    cols_added = 0
    milps = 0
    proven = True

    def run(obj_x: float, obj_y: float, extra: ExtraRow | None
            ) -> tuple[MasterModel, MilpResult]:
        nonlocal patterns, cg_iters, cols_added, milps, proven
        mm = build_master(instance, patterns, cycle_rows=cycle_rows)
        mm.set_objective(x=obj_x, y=obj_y)
        if extra is not None:
            mm.add_extra_row(extra)
        if config.dynamic:
            _, _, tr = generate_columns(mm, config)
            cg_iters += tr.iterations
            cols_added += tr.columns_added
            patterns = mm.patterns
        res = solve_milp(mm.to_lp(), config.master_limits)
        milps += 1
        if res.status != "optimal":
            proven = False
        return mm, res

    def endpoint(first_is_objects: bool):
        if first_is_objects:
            m1, r1 = run(1.0, 0.0, None)
        else:
            m1, r1 = run(0.0, 1.0, None)
        if r1.x is None:
            return None, None
        stage1 = m1.extract_solution(r1.x)
        bound = stage1.f1 if first_is_objects else stage1.f2
        extra = ExtraRow("lex_fix", x_coeff=1.0 if first_is_objects else 0.0,
                         y_coeff=0.0 if first_is_objects else 1.0,
                         rhs=float(bound))
        if first_is_objects:
            m2, r2 = run(0.0, 1.0, extra)
        else:
            m2, r2 = run(1.0, 0.0, extra)
        if r2.x is None:
            return evaluate_point(stage1), stage1
        sol = m2.extract_solution(r2.x)
        return evaluate_point(sol), sol

    zL1, sol_L1 = endpoint(first_is_objects=True)
    zL2, sol_L2 = endpoint(first_is_objects=False)
    aborted = zL1 is None or zL2 is None
    zI = (zL1[0], zL2[1]) if not aborted else None
    return LexResult(zL1, zL2, zI, sol_L1, sol_L2, proven and not aborted,
                     milps, cg_iters, cols_added, patterns, aborted)
