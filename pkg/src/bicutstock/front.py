"""Nondominated fronts and the evaluation metrics computed over them.

Points live in the (total objects, total cycles) plane and both counts
are minimized.  A point is kept only if no other point is at least as
good in both coordinates (weak dominance removes it too), so a front is
strictly increasing in f1 and strictly decreasing in f2 once sorted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .model import IntegerSolution


@dataclass(frozen=True)
class FrontPoint:
    f1: float
    f2: float
    solution: IntegerSolution | None = field(default=None, compare=False)
    method: str = field(default="", compare=False)
    proven: bool = field(default=True, compare=False)


@dataclass(frozen=True)
class Front:
    points: tuple[FrontPoint, ...]
    instance_id: str = ""

    def __post_init__(self):
        for a, b in zip(self.points, self.points[1:]):
            if not (a.f1 < b.f1 and a.f2 > b.f2):
                raise ValueError("front points are not mutually nondominated")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def pairs(self) -> list[tuple[float, float]]:
        return [(p.f1, p.f2) for p in self.points]


def nondominated_filter(points: Iterable[FrontPoint], instance_id: str = "") -> Front:
    """Keep the points no other point weakly dominates; duplicates collapse
    to their first occurrence."""
    pts = list(points)
    order = sorted(range(len(pts)), key=lambda k: (pts[k].f1, pts[k].f2, k))
    kept: list[FrontPoint] = []
    for idx in order:
        p = pts[idx]
        if kept:
            last = kept[-1]
            if p.f1 == last.f1 or p.f2 >= last.f2:
                continue  # dominated, weakly dominated, or duplicate
        kept.append(p)
    return Front(tuple(kept), instance_id)


def union_fronts(fronts: Sequence[Front]) -> Front:
    """Filtered union; pass fronts in method order so the first contributor
    keeps provenance of shared points."""
    ids = [f.instance_id for f in fronts if f.instance_id]
    if len(set(ids)) > 1:
        raise ValueError(f"cannot union fronts over mixed instances: {sorted(set(ids))}")
    merged: list[FrontPoint] = []
    for f in fronts:
        merged.extend(f.points)
    return nondominated_filter(merged, ids[0] if ids else "")


def hypervolume(front: Front, reference: tuple[float, float]) -> float:
    """Area dominated by the front inside the box closed by ``reference``."""
    if not front.points:
        return 0.0
    r1, r2 = reference
    if r1 <= max(p.f1 for p in front) or r2 <= max(p.f2 for p in front):
        raise ValueError("reference point must strictly dominate no front point")
    total = 0.0
    prev_f2 = r2
    for p in front.points:
        total += (r1 - p.f1) * (prev_f2 - p.f2)
        prev_f2 = p.f2
    return total


@dataclass
class MetricsReport:
    cardinality: int                 # sigma1
    hypervolume: float               # sigma2
    objects_amplitude: float         # sigma3_o: f1 span between the endpoints
    cycles_amplitude: float          # sigma3_c: f2 span between the endpoints
    subproblems: int                 # sigma4
    per_second: float | None         # sigma5; None when elapsed time is zero
    per_subproblem: float            # sigma6
    reference: tuple[float, float]

    def as_row(self) -> dict:
        return {
            "sigma1": self.cardinality,
            "sigma2": self.hypervolume,
            "sigma3_o": self.objects_amplitude,
            "sigma3_c": self.cycles_amplitude,
            "sigma4": self.subproblems,
            "sigma5": self.per_second,
            "sigma6": self.per_subproblem,
        }


def metrics(front: Front, run_report, reference: tuple[float, float]) -> MetricsReport:
    """Evaluate a front; ``run_report`` supplies zL1/zL2, subproblem count
    and elapsed seconds (any object with those attributes works)."""
    card = len(front)
    hv = hypervolume(front, reference) if card else 0.0
    zL1 = getattr(run_report, "zL1", None)
    zL2 = getattr(run_report, "zL2", None)
    if zL1 is not None and zL2 is not None:
        amp_o = float(zL2[0] - zL1[0])
        amp_c = float(zL1[1] - zL2[1])
    elif card:
        amp_o = front.points[-1].f1 - front.points[0].f1
        amp_c = front.points[0].f2 - front.points[-1].f2
    else:
        amp_o = amp_c = 0.0
    subs = int(getattr(run_report, "subproblems", 0))
    elapsed = float(getattr(run_report, "elapsed", 0.0))
    per_second = (card / elapsed) if elapsed > 0 else (0.0 if card == 0 else None)
    per_sub = card / subs if subs else 0.0
    return MetricsReport(card, hv, amp_o, amp_c, subs, per_second, per_sub, reference)


def performance_profile(rows: Sequence[Mapping], metric: str, sense: str
                        ) -> dict[str, list[tuple[float, float]]]:
    """Step curves rho(tau) = share of instances solved within ratio tau of
    the best method.  ``rows`` carry "instance", "method" and the metric;
    a missing/None value marks a failed cell (ratio +inf)."""
    if sense not in ("maximize", "minimize"):
        raise ValueError("sense must be 'maximize' or 'minimize'")
    instances: list[str] = []
    methods: list[str] = []
    table: dict[tuple[str, str], float | None] = {}
    for row in rows:
        inst, meth = row["instance"], row["method"]
        if inst not in instances:
            instances.append(inst)
        if meth not in methods:
            methods.append(meth)
        value = row.get(metric)
        if value is not None:
            value = float(value)
            if sense == "maximize" and value <= 0:
                raise ValueError("nonpositive values cannot be profiled under maximize")
        table[(inst, meth)] = value

    ratios: dict[str, list[float]] = {m: [] for m in methods}
    for inst in instances:
        vals = [table.get((inst, m)) for m in methods]
        finite = [v for v in vals if v is not None]
        best = (max(finite) if sense == "maximize" else min(finite)) if finite else None
        for m, v in zip(methods, vals):
            if v is None or best is None:
                ratios[m].append(math.inf)
            elif v == best:
                ratios[m].append(1.0)
            elif sense == "maximize":
                ratios[m].append(best / v)
            else:
                ratios[m].append(v / best if best > 0 else math.inf)

    breakpoints = sorted({r for rs in ratios.values() for r in rs if math.isfinite(r)})
    if 1.0 not in breakpoints:
        breakpoints.insert(0, 1.0)
    n = len(instances)
    curves: dict[str, list[tuple[float, float]]] = {}
    for m in methods:
        curves[m] = [(tau, sum(1 for r in ratios[m] if r <= tau) / n)
                     for tau in breakpoints]
    return curves
