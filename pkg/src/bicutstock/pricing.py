"""Pattern generators: the pricing subproblems and the trivial seeds.

1d pricing is an unbounded integer knapsack solved exactly by dynamic
programming.  2d pricing builds a two-stage guillotine placement MILP over
item copies: copies are sorted by non-ascending width, copy ``k`` may open
a strip of its own width, and any later (narrower) copy may join an open
strip as long as the strip's total length fits the object.  Homogeneous
patterns pack a single item type at its geometric maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Instance, MasterModel, Pattern, Strip, validate_pattern
from .solver import LinearProgram, SolveLimits, solve_milp


class PricingTooLarge(RuntimeError):
    """Exact 2d pricing refused: the copy expansion exceeds the cap."""


@dataclass(frozen=True)
class PricedPattern:
    pattern: Pattern
    value: float


def knapsack_1d(capacity: int, lengths, values) -> PricedPattern:
    """Exact unbounded knapsack; ties go to the lexicographically smallest
    count vector (so zero values return the empty pattern)."""
    lengths = [int(l) for l in lengths]
    vals = np.asarray(values, dtype=float)
    m = len(lengths)
    if len(vals) != m:
        raise ValueError("values do not match lengths")
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite item values")
    if any(l < 1 or l > capacity for l in lengths):
        raise ValueError("item lengths must lie in [1, capacity]")

    # suffix[k][c] = best value over items k.. within capacity c
    suffix = np.zeros((m + 1, capacity + 1))
    for k in range(m - 1, -1, -1):
        row = suffix[k + 1].copy()
        lk, vk = lengths[k], float(vals[k])
        if vk > 0:
            # along each residue chain c = r, r+lk, ... the update is a
            # running maximum of (value - copies * vk)
            for r in range(min(lk, capacity + 1)):
                chain = row[r::lk]
                if chain.size < 2:
                    continue
                steps = np.arange(chain.size, dtype=float)
                adj = chain - steps * vk
                np.maximum.accumulate(adj, out=adj)
                chain[:] = adj + steps * vk
        suffix[k] = row

    counts = [0] * m
    c = capacity
    for k in range(m):
        lk, vk = lengths[k], float(vals[k])
        best_a, best_v = 0, -math.inf
        for a in range(c // lk + 1):
            v = a * vk + suffix[k + 1][c - a * lk]
            if v > best_v + 1e-9:
                best_v, best_a = v, a
        counts[k] = best_a
        c -= best_a * lk
    value = float(np.dot(counts, vals))
    return PricedPattern(Pattern(tuple(counts), source_tag="priced"), value)


def capped_demand(instance: Instance) -> tuple[int, ...]:
    """Per-item copy budget: demand capped at the object-area bound."""
    if instance.kind != "2d":
        raise ValueError("capped_demand applies to 2d instances")
    area = instance.object_length * instance.object_width
    return tuple(min(d, area // (l * w)) for l, w, d in
                 zip(instance.item_lengths, instance.item_widths, instance.demands))


def price_2d(instance: Instance, values, allow_rotation: bool | None = None,
             limits: SolveLimits | None = None, copy_cap: int = 120) -> PricedPattern:
    """Exact two-stage guillotine pricing via a copy-expansion MILP.

    Each demanded copy (capped by :func:`capped_demand`) becomes a binary
    choice per open strip; with rotation every copy gains a rotated twin
    and at most one of the pair may be placed.
    """
    if instance.kind != "2d":
        raise ValueError("price_2d applies to 2d instances")
    vals = np.asarray(values, dtype=float)
    if len(vals) != instance.m:
        raise ValueError("values do not match item count")
    if allow_rotation is None:
        allow_rotation = instance.allow_rotation
    L, W = instance.object_length, instance.object_width
    caps = capped_demand(instance)

    # copies: (type, length, width, rotated, pair_id)
    copies = []
    pair_id = 0
    for i in range(instance.m):
        li, wi = instance.item_lengths[i], instance.item_widths[i]
        for _ in range(caps[i]):
            members = []
            if li <= L and wi <= W:
                members.append((i, li, wi, False, pair_id))
            if allow_rotation and wi <= L and li <= W and (li, wi) != (wi, li):
                members.append((i, wi, li, True, pair_id))
            copies.extend(members)
            pair_id += 1
    if len(copies) > copy_cap:
        raise PricingTooLarge(
            f"{len(copies)} copies exceed the exact-pricing cap of {copy_cap}")
    if not copies:
        return PricedPattern(Pattern((0,) * instance.m, layout=()), 0.0)

    copies.sort(key=lambda c: (-c[2], c[0], c[3]))
    S = len(copies)
    widths = [c[2] for c in copies]
    lengths = [c[1] for c in copies]
    cvals = [float(vals[c[0]]) for c in copies]

    var_of = {}
    for i in range(S):
        for k in range(i + 1):
            var_of[(i, k)] = len(var_of)
    lp = LinearProgram(len(var_of))
    lp.ub[:] = 1.0
    lp.integer[:] = True
    for (i, k), col in var_of.items():
        lp.obj[col] = -cvals[i]  # maximize value
    # each copy (or rotated pair) placed at most once
    groups: dict[int, list[int]] = {}
    for i, c in enumerate(copies):
        groups.setdefault(c[4], []).append(i)
    for members in groups.values():
        coeffs = {var_of[(i, k)]: 1.0 for i in members for k in range(i + 1)}
        lp.add_row(coeffs, "<=", 1.0)
    # strip length: members of strip k plus its opener fit the object
    for k in range(S - 1):
        coeffs = {var_of[(i, k)]: float(lengths[i]) for i in range(k + 1, S)}
        coeffs[var_of[(k, k)]] = -float(L - lengths[k])
        lp.add_row(coeffs, "<=", 0.0)
    # strip widths fit the object
    lp.add_row({var_of[(k, k)]: float(widths[k]) for k in range(S)}, "<=", float(W))

    res = solve_milp(lp, limits)
    if res.x is None:
        return PricedPattern(Pattern((0,) * instance.m, layout=()), 0.0)
    chosen = res.x > 0.5
    counts = [0] * instance.m
    strips = []
    for k in range(S):
        if not chosen[var_of[(k, k)]]:
            continue
        placements = [(copies[k][0], copies[k][3])]
        counts[copies[k][0]] += 1
        for i in range(k + 1, S):
            if chosen[var_of[(i, k)]]:
                placements.append((copies[i][0], copies[i][3]))
                counts[copies[i][0]] += 1
        strips.append(Strip(widths[k], tuple(placements)))
    pattern = Pattern(tuple(counts), layout=tuple(strips), source_tag="priced")
    validate_pattern(instance, pattern)  # geometry re-checked, never trusted
    value = float(np.dot(counts, vals))
    return PricedPattern(pattern, value)


def homogeneous_patterns(instance: Instance) -> list[Pattern]:
    """Single-item maximal patterns; with rotation, the better orientation."""
    out: list[Pattern] = []
    seen: set[tuple[int, ...]] = set()
    m = instance.m
    L = instance.object_length
    for i in range(m):
        li = instance.item_lengths[i]
        if instance.kind == "1d":
            a = L // li
            counts = tuple(a if j == i else 0 for j in range(m))
            pat = Pattern(counts, source_tag="homogeneous")
        else:
            W = instance.object_width
            wi = instance.item_widths[i]
            plain = (L // li) * (W // wi) if li <= L and wi <= W else 0
            rot = 0
            if instance.allow_rotation and wi <= L and li <= W:
                rot = (L // wi) * (W // li)
            count, rotated = (plain, False) if plain >= rot else (rot, True)
            if count == 0:
                continue
            sl, sw = (li, wi) if not rotated else (wi, li)
            per_strip = L // sl
            strips = tuple(Strip(sw, tuple((i, rotated) for _ in range(per_strip)))
                           for _ in range(W // sw))
            counts = tuple(count if j == i else 0 for j in range(m))
            pat = Pattern(counts, layout=strips, source_tag="homogeneous")
        if pat.counts in seen or pat.is_empty:
            continue
        validate_pattern(instance, pat)
        seen.add(pat.counts)
        out.append(pat)
    return out


def reduced_cost_threshold(master: MasterModel, duals: np.ndarray, side: str) -> float:
    """Knapsack value a new column on ``side`` must beat to improve the LP.

    A fresh column's reduced cost is its objective coefficient minus the
    dual-weighted demand coefficients (the priced value) minus its entries
    in the pattern-independent extra rows; its own link row is new, so
    that dual is zero.  The column improves iff value > threshold.
    """
    if side not in ("x", "y"):
        raise ValueError("side must be 'x' or 'y'")
    thr = master.objective_coeff(side)
    n_link = master.n if len(master.sides) == 2 else 0
    start = len(master.demand_x_rows) + len(master.demand_y_rows) + n_link
    for k, row in enumerate(master.extra_rows):
        coeff = row.x_coeff if side == "x" else row.y_coeff
        if coeff:
            thr -= float(duals[start + k]) * coeff
    return thr


def enumerate_patterns_1d(instance: Instance, limit: int = 200_000) -> list[Pattern]:
    """Every feasible nonzero 1d count vector, lexicographic order."""
    if instance.kind != "1d":
        raise ValueError("enumeration implemented for 1d instances")
    lengths = instance.item_lengths
    m = instance.m
    out: list[Pattern] = []

    def rec(idx: int, room: int, prefix: list[int]):
        if idx == m:
            if any(prefix):
                if len(out) >= limit:
                    raise PricingTooLarge("pattern enumeration exceeds limit")
                out.append(Pattern(tuple(prefix), source_tag="enumerated"))
            return
        for a in range(room // lengths[idx] + 1):
            prefix.append(a)
            rec(idx + 1, room - a * lengths[idx], prefix)
            prefix.pop()

    rec(0, instance.object_length, [])
    return out
