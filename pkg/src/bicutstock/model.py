"""Problem data and the bi-objective master model.

An instance asks how to cut identical stock objects into ``m`` demanded
item types.  The saw cuts stacks of up to ``p`` objects at once, so a
plan is judged on two conflicting counts: total objects cut (f1) and
total saw cycles run (f2).  With one column per cutting pattern ``j``
carrying an object count ``x_j`` and a cycle count ``y_j``:

    minimize (f1, f2) = (sum_j x_j, sum_j y_j)
    s.t.  sum_j a_ij x_j >= d_i             i = 1..m   (item demand)
          sum_j a_ij y_j >= ceil(d_i / p)   i = 1..m   (cycle cover)
          x_j - p y_j <= 0                  j = 1..n   (cycle link)
          x_j, y_j integer >= 0.

Demand rows are ">=": overproduction is always allowed.  The cycle-cover
rows are implied by the demand and link rows under integrality but
tighten the LP relaxation; they are kept by default and can be dropped
for comparison runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .solver import LinearProgram


def saw_capacity(saw_height: float, thickness: float) -> int:
    """Number of objects cut per cycle: floor(saw_height / thickness)."""
    if thickness <= 0:
        raise ValueError("thickness must be positive")
    if saw_height < thickness:
        raise ValueError("saw height smaller than object thickness")
    return int(saw_height // thickness)


def _merge_duplicates(dims: list[tuple], demands: list[int]) -> tuple[list[tuple], list[int]]:
    """Merge repeated item dimensions by summing their demands (order kept)."""
    seen: dict[tuple, int] = {}
    out_dims: list[tuple] = []
    out_dem: list[int] = []
    for dim, dem in zip(dims, demands):
        if dim in seen:
            out_dem[seen[dim]] += dem
        else:
            seen[dim] = len(out_dims)
            out_dims.append(dim)
            out_dem.append(dem)
    return out_dims, out_dem


@dataclass(frozen=True)
class Instance:
    """Immutable problem data; construct via :func:`make_1d` / :func:`make_2d`."""

    kind: str                           # "1d" | "2d"
    object_length: int
    item_lengths: tuple[int, ...]
    demands: tuple[int, ...]
    capacity: int                       # objects per saw cycle (p)
    object_width: int | None = None     # 2d only
    item_widths: tuple[int, ...] | None = None
    allow_rotation: bool = False
    identifier: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in ("1d", "2d"):
            raise ValueError(f"unknown instance kind {self.kind!r}")
        m = len(self.item_lengths)
        if m < 1:
            raise ValueError("instance needs at least one item type")
        if len(self.demands) != m:
            raise ValueError("demands do not match item count")
        if self.capacity < 1:
            raise ValueError("saw capacity must be >= 1")
        if any(d < 1 for d in self.demands):
            raise ValueError("demands must be positive")
        if self.object_length < 1:
            raise ValueError("object length must be positive")
        if self.kind == "1d":
            if any(l < 1 for l in self.item_lengths):
                raise ValueError("item lengths must be positive")
            if any(l > self.object_length for l in self.item_lengths):
                raise ValueError("item longer than the object")
            if len(set(self.item_lengths)) != m:
                raise ValueError("duplicate item lengths (merge before constructing)")
        else:
            if self.object_width is None or self.item_widths is None:
                raise ValueError("2d instance needs object and item widths")
            if len(self.item_widths) != m:
                raise ValueError("item widths do not match item count")
            if self.object_width < 1 or any(w < 1 for w in self.item_widths):
                raise ValueError("widths must be positive")
            dims = list(zip(self.item_lengths, self.item_widths))
            if len(set(dims)) != m:
                raise ValueError("duplicate item dimensions (merge before constructing)")
            for l, w in dims:
                if not self.fits(l, w):
                    raise ValueError(f"item {l}x{w} does not fit the object")

    @property
    def m(self) -> int:
        return len(self.item_lengths)

    @property
    def total_demand(self) -> int:
        return sum(self.demands)

    def cycle_demand(self, i: int) -> int:
        return math.ceil(self.demands[i] / self.capacity)

    def fits(self, length: int, width: int | None = None) -> bool:
        """Does an item fit the object in some allowed orientation?"""
        if self.kind == "1d":
            return length <= self.object_length
        assert width is not None
        if length <= self.object_length and width <= self.object_width:
            return True
        return self.allow_rotation and width <= self.object_length and length <= self.object_width


def make_1d(object_length: int, item_lengths, demands, capacity: int,
            identifier: str = "") -> Instance:
    """Build a 1d instance, merging duplicate lengths by summing demand."""
    dims, dem = _merge_duplicates([(int(l),) for l in item_lengths],
                                  [int(d) for d in demands])
    return Instance("1d", int(object_length), tuple(d[0] for d in dims),
                    tuple(dem), int(capacity), identifier=identifier)


def make_2d(object_length: int, object_width: int, item_lengths, item_widths,
            demands, capacity: int, allow_rotation: bool = True,
            identifier: str = "") -> Instance:
    """Build a 2d instance, merging duplicate (length, width) pairs."""
    dims, dem = _merge_duplicates(
        [(int(l), int(w)) for l, w in zip(item_lengths, item_widths)],
        [int(d) for d in demands])
    return Instance("2d", int(object_length), tuple(d[0] for d in dims),
                    tuple(dem), int(capacity), object_width=int(object_width),
                    item_widths=tuple(d[1] for d in dims),
                    allow_rotation=allow_rotation, identifier=identifier)


@dataclass(frozen=True)
class Strip:
    """One width-strip of a two-stage layout: (item index, rotated) placements."""

    width: int
    placements: tuple[tuple[int, bool], ...]


@dataclass(frozen=True)
class Pattern:
    """A cutting pattern: per-item counts plus, for 2d, its strip layout.

    Equality and hashing use the count vector only; the master model sees
    nothing else.  An all-zero pattern is a legal pricing result but is
    rejected as a master column.
    """

    counts: tuple[int, ...]
    layout: tuple[Strip, ...] | None = field(default=None, compare=False)
    source_tag: str = field(default="priced", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))

    @property
    def is_empty(self) -> bool:
        return all(c == 0 for c in self.counts)


def validate_pattern(instance: Instance, pattern: Pattern) -> None:
    """Raise ValueError unless the pattern's geometry fits the instance."""
    if len(pattern.counts) != instance.m:
        raise ValueError("pattern count vector has wrong length")
    if any(c < 0 for c in pattern.counts):
        raise ValueError("negative pattern counts")
    if instance.kind == "1d":
        used = sum(l * c for l, c in zip(instance.item_lengths, pattern.counts))
        if used > instance.object_length:
            raise ValueError("pattern exceeds object length")
        return
    if pattern.is_empty and pattern.layout in (None, ()):
        return
    if pattern.layout is None:
        raise ValueError("2d pattern needs a strip layout")
    from_layout = [0] * instance.m
    width_total = 0
    for strip in pattern.layout:
        width_total += strip.width
        length_used = 0
        for item, rotated in strip.placements:
            if rotated and not instance.allow_rotation:
                raise ValueError("rotated placement but rotation is disallowed")
            l, w = instance.item_lengths[item], instance.item_widths[item]
            if rotated:
                l, w = w, l
            if w > strip.width:
                raise ValueError("item wider than its strip")
            length_used += l
            from_layout[item] += 1
        if length_used > instance.object_length:
            raise ValueError("strip exceeds object length")
    if width_total > instance.object_width:
        raise ValueError("strips exceed object width")
    if tuple(from_layout) != pattern.counts:
        raise ValueError("layout inconsistent with pattern counts")


@dataclass(frozen=True)
class IntegerSolution:
    """Per-pattern object and cycle counts of one integer master solution."""

    x: tuple[int, ...]
    y: tuple[int, ...]

    @property
    def f1(self) -> int:
        return sum(self.x)

    @property
    def f2(self) -> int:
        return sum(self.y)


def evaluate_point(solution: IntegerSolution) -> tuple[int, int]:
    """Objective pair (total objects, total cycles)."""
    return solution.f1, solution.f2


def check_feasible(instance: Instance, patterns: list[Pattern],
                   solution: IntegerSolution) -> tuple[bool, str | None]:
    """Check demand, cycle-cover and link rows; returns (ok, first violation)."""
    n = len(patterns)
    if len(solution.x) != n or len(solution.y) != n:
        raise ValueError("solution length does not match pattern count")
    for j in range(n):
        if solution.x[j] < 0 or solution.y[j] < 0:
            return False, f"nonnegativity[{j}]"
    for i in range(instance.m):
        got = sum(p.counts[i] * solution.x[j] for j, p in enumerate(patterns))
        if got < instance.demands[i]:
            return False, f"demand_x[{i}]"
    for i in range(instance.m):
        got = sum(p.counts[i] * solution.y[j] for j, p in enumerate(patterns))
        if got < instance.cycle_demand(i):
            return False, f"demand_y[{i}]"
    for j in range(n):
        if solution.x[j] > instance.capacity * solution.y[j]:
            return False, f"linking[{j}]"
    return True, None


@dataclass
class ExtraRow:
    """A scalarization row whose coefficient on any new column is uniform
    per variable family (so pricing can account for it without knowing the
    pattern).  Example: an epsilon cut ``sum_j y_j <= eps`` has
    ``y_coeff=1``."""

    name: str
    x_coeff: float = 0.0
    y_coeff: float = 0.0
    u_coeff: float = 0.0
    sense: str = "<="
    rhs: float = 0.0


class MasterModel:
    """Restricted master over a pattern set; a mutable builder owned by one
    solve at a time.

    Column order is the x block then the y block (then ``u`` if present);
    row order is demand rows, cycle-cover rows, link rows, then extra
    scalarization rows.  Rebuilding from the same inputs yields the
    identical ordering.
    """

    def __init__(self, instance: Instance, patterns, relax: bool = False,
                 sides: tuple[str, ...] = ("x", "y"), cycle_rows: bool = True):
        patterns = list(patterns)
        if not patterns:
            raise ValueError("empty pattern set")
        self.instance = instance
        self.relax = relax
        self.sides = tuple(sides)
        self.cycle_rows = cycle_rows and ("y" in self.sides)
        self.demand_rows = "x" in self.sides
        self.patterns: list[Pattern] = []
        self._keys: set[tuple[int, ...]] = set()
        for p in patterns:
            self.add_pattern(p)
        self.extra_rows: list[ExtraRow] = []
        self.obj_x = 0.0
        self.obj_y = 0.0
        self.obj_u = 0.0
        self.obj_offset = 0.0
        self.has_u = False

    # -- construction -----------------------------------------------------
    def add_pattern(self, pattern: Pattern) -> bool:
        """Append a column; returns False if the counts already exist."""
        if pattern.is_empty:
            raise ValueError("empty pattern cannot enter the master")
        validate_pattern(self.instance, pattern)
        if pattern.counts in self._keys:
            return False
        self._keys.add(pattern.counts)
        self.patterns.append(pattern)
        return True

    def has_pattern(self, pattern: Pattern) -> bool:
        return pattern.counts in self._keys

    def set_objective(self, x: float = 0.0, y: float = 0.0, u: float | None = None,
                      offset: float = 0.0) -> None:
        self.obj_x = float(x)
        self.obj_y = float(y)
        if u is not None:
            self.has_u = True
            self.obj_u = float(u)
        self.obj_offset = float(offset)

    def add_extra_row(self, row: ExtraRow) -> None:
        if row.u_coeff != 0.0:
            self.has_u = True
        self.extra_rows.append(row)

    # -- layout helpers ---------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.patterns)

    def x_col(self, j: int) -> int:
        assert "x" in self.sides
        return j

    def y_col(self, j: int) -> int:
        assert "y" in self.sides
        return (self.n if "x" in self.sides else 0) + j

    def u_col(self) -> int:
        assert self.has_u
        return self.n * len(self.sides)

    @property
    def demand_x_rows(self) -> range:
        m = self.instance.m
        return range(0, m) if self.demand_rows else range(0)

    @property
    def demand_y_rows(self) -> range:
        m = self.instance.m
        start = m if self.demand_rows else 0
        return range(start, start + m) if self.cycle_rows else range(start, start)

    def objective_coeff(self, side: str) -> float:
        return self.obj_x if side == "x" else self.obj_y

    # -- lowering ---------------------------------------------------------
    def to_lp(self, relax: bool | None = None) -> LinearProgram:
        relax = self.relax if relax is None else relax
        inst = self.instance
        n, m, p = self.n, inst.m, inst.capacity
        ncols = n * len(self.sides) + (1 if self.has_u else 0)
        lp = LinearProgram(ncols)
        # loose but finite caps keep branch and bound finite; no optimal
        # solution of any subproblem we build is cut off by them
        y_cap = float(inst.total_demand)
        x_cap = float(p) * y_cap
        if "x" in self.sides:
            for j in range(n):
                col = self.x_col(j)
                lp.obj[col] = self.obj_x
                lp.ub[col] = x_cap
                lp.integer[col] = not relax
        if "y" in self.sides:
            for j in range(n):
                col = self.y_col(j)
                lp.obj[col] = self.obj_y
                lp.ub[col] = y_cap
                lp.integer[col] = not relax
        if self.has_u:
            lp.obj[self.u_col()] = self.obj_u
        lp.offset = self.obj_offset
        counts = np.array([pat.counts for pat in self.patterns], dtype=float)  # (n, m)
        if "x" in self.sides:
            for i in range(m):
                lp.add_row({self.x_col(j): counts[j, i] for j in range(n)
                            if counts[j, i]}, ">=", float(inst.demands[i]))
        if self.cycle_rows:
            for i in range(m):
                lp.add_row({self.y_col(j): counts[j, i] for j in range(n)
                            if counts[j, i]}, ">=", float(inst.cycle_demand(i)))
        if "x" in self.sides and "y" in self.sides:
            for j in range(n):
                lp.add_row({self.x_col(j): 1.0, self.y_col(j): -float(p)}, "<=", 0.0)
        for row in self.extra_rows:
            coeffs: dict[int, float] = {}
            if row.x_coeff and "x" in self.sides:
                for j in range(n):
                    coeffs[self.x_col(j)] = row.x_coeff
            if row.y_coeff and "y" in self.sides:
                for j in range(n):
                    coeffs[self.y_col(j)] = row.y_coeff
            if row.u_coeff:
                coeffs[self.u_col()] = row.u_coeff
            lp.add_row(coeffs, row.sense, row.rhs)
        lp.integral_objective = (not self.has_u and not relax
                                 and float(self.obj_x).is_integer()
                                 and float(self.obj_y).is_integer()
                                 and float(self.obj_offset).is_integer())
        return lp

    def extract_solution(self, x: np.ndarray) -> IntegerSolution:
        """Read an integer master solution back out of a MILP vector."""
        xs = tuple(int(round(x[self.x_col(j)])) for j in range(self.n)) \
            if "x" in self.sides else (0,) * self.n
        ys = tuple(int(round(x[self.y_col(j)])) for j in range(self.n)) \
            if "y" in self.sides else (0,) * self.n
        return IntegerSolution(xs, ys)


def build_master(instance: Instance, patterns, relax: bool = False,
                 cycle_rows: bool = True) -> MasterModel:
    """The full bi-objective restricted master (objective left unset)."""
    return MasterModel(instance, patterns, relax=relax, sides=("x", "y"),
                       cycle_rows=cycle_rows)


def build_mono_master(instance: Instance, patterns, side: str) -> MasterModel:
    """Single-objective cover model used to seed the initial column pool.

    ``side="x"`` covers the raw demands with object counts; ``side="y"``
    covers the cycle demands ceil(d_i/p) with cycle counts.  The unit
    objective on the chosen side is set here.
    """
    if side not in ("x", "y"):
        raise ValueError("side must be 'x' or 'y'")
    mm = MasterModel(instance, patterns, relax=False, sides=(side,))
    mm.set_objective(x=1.0 if side == "x" else 0.0,
                     y=1.0 if side == "y" else 0.0)
    return mm
