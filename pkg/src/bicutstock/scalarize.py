"""The three front-producing methods.

* :func:`solve_lec` -- lexicographic epsilon-constraint: alternate an
  objects-minimizing subproblem under a cycle budget with a
  cycles-minimizing subproblem under the resulting object budget,
  tightening the cycle budget to one below the last count until the
  objects subproblem goes infeasible.
* :func:`solve_fpa` -- frontier partitioning: a custom weighted sum whose
  weights make it lexicographic, plus one criterion-space cut per
  iteration that excludes everything the last point dominates.
* :func:`solve_awt` -- augmented weighted Chebyshev distance to the ideal
  point, sweeping the weight over a grid derived from the endpoint gap.

Every method can regenerate columns before each subproblem (dynamic mode)
or run on the initial pool alone (static mode).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .colgen import (ColgenConfig, LexResult, generate_columns,
                     initial_columns, lexicographic_points)
from .front import Front, FrontPoint, nondominated_filter
from .model import ExtraRow, Instance, Pattern, build_master
from .solver import solve_milp


@dataclass
class MethodConfig:
    method: str = "lec"                      # "lec" | "fpa" | "awt"
    colgen: ColgenConfig = field(default_factory=ColgenConfig)
    permutation: tuple[int, int] = (2, 1)    # FPA: objective solved first is i2
    gamma: float = 1.0                       # minimum objective step
    zeta: float = 0.3                        # FPA weight margin, in (0, gamma)
    epsilon: float = 1.0                     # FPA cut step, in (0, gamma]
    rho: float = 1e-4                        # AWT augmentation weight
    use_cycle_rows: bool = True              # drop for redundancy experiments

    def __post_init__(self):
        if self.method not in ("lec", "fpa", "awt"):
            raise ValueError(f"unknown method {self.method!r}")
        if tuple(self.permutation) not in ((1, 2), (2, 1)):
            raise ValueError("permutation must be (1,2) or (2,1)")
        if self.gamma < 1:
            raise ValueError("gamma must be >= 1 for integer objectives")
        if not 0 < self.zeta < self.gamma:
            raise ValueError("zeta must lie strictly inside (0, gamma)")
        if not 0 < self.epsilon <= self.gamma:
            raise ValueError("epsilon must lie in (0, gamma]")
        if self.rho <= 0:
            raise ValueError("rho must be positive")


@dataclass
class FrontResult:
    """One method run: its front plus the bookkeeping the reports need."""

    instance_id: str
    method: str
    colgen_mode: str
    front: Front
    raw_points: list[FrontPoint]        # recorded order, before filtering
    zL1: tuple[int, int] | None
    zL2: tuple[int, int] | None
    subproblems: int                    # sigma4 seed
    colgen_iterations: int              # "it" in reports
    columns: int                        # "nc": final pool size
    initial_column_count: int
    elapsed: float
    aborted: bool
    counting: str
    patterns: list[Pattern]
    trace: list[str]


def _prepare(instance: Instance, config: MethodConfig, patterns,
             trace: list[str]) -> tuple[list[Pattern], int, int]:
    if patterns is None:
        patterns, cga_traces = initial_columns(instance, config.colgen)
        cg_iters = sum(t.iterations for t in cga_traces)
        trace.append(f"initial pool: {len(patterns)} columns "
                     f"({cg_iters} seeding iterations)")
    else:
        patterns = list(patterns)
        cg_iters = 0
        trace.append(f"initial pool: {len(patterns)} columns (given)")
    return patterns, cg_iters, len(patterns)


def solve_lec(instance: Instance, config: MethodConfig,
              patterns=None) -> FrontResult:
    t0 = time.perf_counter()
    trace: list[str] = []
    patterns, cg_iters, init_n = _prepare(instance, config, patterns, trace)
    eps: int | None = None  # no cycle budget on the first pass
    raw: list[FrontPoint] = []
    subs = 0
    aborted = False
    while True:
        mm = build_master(instance, patterns, cycle_rows=config.use_cycle_rows)
        mm.set_objective(x=1.0)
        if eps is not None:
            mm.add_extra_row(ExtraRow("cycle_budget", y_coeff=1.0, rhs=float(eps)))
        if config.colgen.dynamic:
            _, _, tr = generate_columns(mm, config.colgen)
            cg_iters += tr.iterations
            patterns = mm.patterns
        r1 = solve_milp(mm.to_lp(), config.colgen.master_limits)
        subs += 1
        trace.append(f"lec sub1 eps={eps} status={r1.status} obj={r1.objective}")
        if r1.status == "infeasible":
            break
        if r1.x is None:
            aborted = True
            break
        f1_budget = mm.extract_solution(r1.x).f1

        mm2 = build_master(instance, patterns, cycle_rows=config.use_cycle_rows)
        mm2.set_objective(y=1.0)
        mm2.add_extra_row(ExtraRow("object_budget", x_coeff=1.0, rhs=float(f1_budget)))
        if config.colgen.dynamic:
            _, _, tr = generate_columns(mm2, config.colgen)
            cg_iters += tr.iterations
            patterns = mm2.patterns
        r2 = solve_milp(mm2.to_lp(), config.colgen.master_limits)
        subs += 1
        trace.append(f"lec sub2 budget={f1_budget} status={r2.status} obj={r2.objective}")
        if r2.x is None:
            aborted = True
            break
        sol = mm2.extract_solution(r2.x)
        proven = r1.status == "optimal" and r2.status == "optimal"
        raw.append(FrontPoint(sol.f1, sol.f2, sol, "lec", proven))
        eps = sol.f2 - 1

    front = nondominated_filter(raw, instance.identifier)
    zL1 = (raw[0].f1, raw[0].f2) if raw else None
    zL2 = (raw[-1].f1, raw[-1].f2) if raw else None
    return FrontResult(instance.identifier, "lec", config.colgen.mode, front,
                       raw, zL1, zL2, subs, cg_iters, len(patterns), init_n,
                       time.perf_counter() - t0, aborted,
                       "one per master MILP, incl. the terminal infeasible pass",
                       patterns, trace)


def cws_weights(zL1: tuple[int, int], zL2: tuple[int, int], gamma: float,
                zeta: float, permutation: tuple[int, int]) -> tuple[float, float]:
    """Weights that make the weighted sum decide the permutation's second
    objective first and break ties on the other one."""
    if tuple(zL1) == tuple(zL2):
        raise ValueError("degenerate endpoints: single-point front")
    i1, i2 = permutation
    span = abs(zL1[i1 - 1] - zL2[i1 - 1])
    w = {i1: (gamma - zeta) / span, i2: 1.0}
    return w[1], w[2]


def solve_fpa(instance: Instance, config: MethodConfig,
              patterns=None) -> FrontResult:
    t0 = time.perf_counter()
    trace: list[str] = []
    patterns, cg_iters, init_n = _prepare(instance, config, patterns, trace)
    lex = lexicographic_points(instance, patterns, config.colgen,
                               cycle_rows=config.use_cycle_rows)
    patterns = lex.patterns
    cg_iters += lex.colgen_iterations
    subs = lex.milp_count
    trace.append(f"fpa endpoints zL1={lex.zL1} zL2={lex.zL2}")

    def finish(raw, aborted):
        return FrontResult(instance.identifier, "fpa", config.colgen.mode,
                           nondominated_filter(raw, instance.identifier), raw,
                           lex.zL1, lex.zL2, subs, cg_iters, len(patterns),
                           init_n, time.perf_counter() - t0, aborted,
                           "endpoint MILPs plus one per scalarized subproblem",
                           patterns, trace)

    if lex.aborted:
        return finish([], True)
    if lex.zL1 == lex.zL2:
        return finish([FrontPoint(*lex.zL1, lex.sol_L1, "fpa", lex.proven)], False)

    w1, w2 = cws_weights(lex.zL1, lex.zL2, config.gamma, config.zeta,
                         config.permutation)
    i1 = config.permutation[0]
    ideal_i1 = lex.zI[i1 - 1]
    cuts: list[ExtraRow] = []
    raw: list[FrontPoint] = []
    aborted = False
    while True:
        mm = build_master(instance, patterns, cycle_rows=config.use_cycle_rows)
        mm.set_objective(x=w1, y=w2)
        for cut in cuts:
            mm.add_extra_row(cut)
        if config.colgen.dynamic:
            _, _, tr = generate_columns(mm, config.colgen)
            cg_iters += tr.iterations
            patterns = mm.patterns
        r = solve_milp(mm.to_lp(), config.colgen.master_limits)
        subs += 1
        trace.append(f"fpa isp cuts={len(cuts)} status={r.status} obj={r.objective}")
        if r.status == "infeasible":
            break
        if r.x is None:
            aborted = True
            break
        sol = mm.extract_solution(r.x)
        raw.append(FrontPoint(sol.f1, sol.f2, sol, "fpa", r.status == "optimal"))
        reached = sol.f1 if i1 == 1 else sol.f2
        if reached <= ideal_i1:
            break
        cuts.append(ExtraRow(f"partition_cut_{len(cuts) + 1}",
                             x_coeff=1.0 if i1 == 1 else 0.0,
                             y_coeff=1.0 if i1 == 2 else 0.0,
                             rhs=float(reached - config.epsilon)))
    return finish(raw, aborted)


def awt_parameters(zL1: tuple[int, int], zL2: tuple[int, int]
                   ) -> tuple[float, float, float]:
    """Normalization factors and the weight-grid step between endpoints."""
    d1 = abs(zL2[0] - zL1[0])
    d2 = abs(zL2[1] - zL1[1])
    gap = zL1[1] - zL2[1]
    if d1 == 0 or d2 == 0 or gap <= 0:
        raise ValueError("degenerate endpoints: single-point front")
    return 1.0 / d1, 1.0 / d2, 1.0 / gap


def solve_awt(instance: Instance, config: MethodConfig,
              patterns=None) -> FrontResult:
    t0 = time.perf_counter()
    trace: list[str] = []
    patterns, cg_iters, init_n = _prepare(instance, config, patterns, trace)
    lex = lexicographic_points(instance, patterns, config.colgen,
                               cycle_rows=config.use_cycle_rows)
    patterns = lex.patterns
    cg_iters += lex.colgen_iterations
    subs = lex.milp_count
    trace.append(f"awt endpoints zL1={lex.zL1} zL2={lex.zL2}")

    def finish(raw, aborted):
        return FrontResult(instance.identifier, "awt", config.colgen.mode,
                           nondominated_filter(raw, instance.identifier), raw,
                           lex.zL1, lex.zL2, subs, cg_iters, len(patterns),
                           init_n, time.perf_counter() - t0, aborted,
                           "endpoint MILPs plus one per weight",
                           patterns, trace)

    if lex.aborted:
        return finish([], True)
    pt_L1 = FrontPoint(*lex.zL1, lex.sol_L1, "awt", lex.proven)
    if lex.zL1 == lex.zL2:
        return finish([pt_L1], False)
    pt_L2 = FrontPoint(*lex.zL2, lex.sol_L2, "awt", lex.proven)
    try:
        beta1, beta2, delta = awt_parameters(lex.zL1, lex.zL2)
    except ValueError:
        return finish([pt_L1, pt_L2], False)

    f1_ideal, f2_ideal = lex.zI
    rho = config.rho
    raw: list[FrontPoint] = [pt_L1, pt_L2]
    aborted = False
    k = 1
    while True:
        w = 1.0 - k * delta
        if w <= 1e-12:  # guard against drift along the weight grid
            break
        mm = build_master(instance, patterns, cycle_rows=config.use_cycle_rows)
        mm.set_objective(x=rho * beta1, y=rho * beta2, u=1.0,
                         offset=-rho * (beta1 * f1_ideal + beta2 * f2_ideal))
        mm.add_extra_row(ExtraRow("chebyshev_objects", x_coeff=beta1 * w,
                                  u_coeff=-1.0, rhs=beta1 * w * f1_ideal))
        mm.add_extra_row(ExtraRow("chebyshev_cycles", y_coeff=beta2 * (1.0 - w),
                                  u_coeff=-1.0, rhs=beta2 * (1.0 - w) * f2_ideal))
        if config.colgen.dynamic:
            _, _, tr = generate_columns(mm, config.colgen)
            cg_iters += tr.iterations
            patterns = mm.patterns
        r = solve_milp(mm.to_lp(), config.colgen.master_limits)
        subs += 1
        trace.append(f"awt isp w={w:.6f} status={r.status} obj={r.objective}")
        if r.x is None:
            aborted = True
            break
        sol = mm.extract_solution(r.x)
        raw.append(FrontPoint(sol.f1, sol.f2, sol, "awt", r.status == "optimal"))
        k += 1
    return finish(raw, aborted)


_SOLVERS = {"lec": solve_lec, "fpa": solve_fpa, "awt": solve_awt}


def solve_method(instance: Instance, config: MethodConfig,
                 patterns=None) -> FrontResult:
    return _SOLVERS[config.method](instance, config, patterns)
