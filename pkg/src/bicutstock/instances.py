"""Deterministic instance generation and the text instance format.

All randomness comes from an explicit splitmix64 stream so identical
parameters and seed reproduce instances bit-exactly on any platform:

* ``next_u64``: state += 0x9E3779B97F4A7C15; mix with the standard
  splitmix64 finalizer (xor-shift 30/27/31, multipliers 0xBF58476D1CE4E5B9
  and 0x94D049BB133111EB), all mod 2**64.
* ``uniform()`` = next_u64 / 2**64, in [0, 1).
* ``randint(lo, hi)`` = lo + next_u64 % (hi - lo + 1); the modulo bias is
  negligible for our ranges and keeps the mapping trivially portable.

Rounding is floor(x + 0.5) throughout.

Text formats (whitespace separated, UTF-8):

* 1d: header ``m L p``, then m lines ``l_i d_i``.
* 2d: header ``m L W p R`` (R is 1 when rotation is allowed), then m
  lines ``l_i w_i d_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .model import Instance, make_1d, make_2d

_MASK64 = (1 << 64) - 1

# (v1, v2): item lengths are drawn uniformly from [v1*L, v2*L]
CLASS_RANGES = {"S": (0.01, 0.2), "M": (0.01, 0.8), "G": (0.2, 0.8)}

# Verbal shape classes formalized as predicates over (length, width),
# collected in one table so the choices stay auditable.  ratio is the
# long/short aspect ratio; the area terciles split [25*25, 100*100].
_AREA_LO = 25 * 25
_AREA_T1 = _AREA_LO + (100 * 100 - _AREA_LO) // 3        # 3750
_AREA_T2 = _AREA_LO + 2 * (100 * 100 - _AREA_LO) // 3    # 6875

SHAPE_CLASSES: dict[int, tuple[str, object]] = {
    1: ("small and square",
        lambda l, w: max(l, w) <= 1.25 * min(l, w) and l * w <= _AREA_T1),
    3: ("medium length and narrow",
        lambda l, w: 50 <= max(l, w) <= 75 and max(l, w) >= 2 * min(l, w)),
    6: ("large and square",
        lambda l, w: max(l, w) <= 1.25 * min(l, w) and l * w >= _AREA_T2),
    11: ("medium size and square",
         lambda l, w: max(l, w) <= 1.25 * min(l, w) and _AREA_T1 < l * w < _AREA_T2),
    14: ("long and narrow or long and tall",
         lambda l, w: max(l, w) >= 75 and max(l, w) >= 2 * min(l, w)),
}


class GenerationError(RuntimeError):
    """A shape filter starved or parameters cannot produce an instance."""


class ParseError(ValueError):
    """Malformed instance file; the message names the offending line."""


class SplitMix64:
    """Documented 64-bit PRNG; see the module docstring for the contract."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return self.next_u64() / 2.0 ** 64

    def randint(self, lo: int, hi: int) -> int:
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.next_u64() % (hi - lo + 1)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class Gen1DParams:
    m: int
    length_class: str                  # "S" | "M" | "G"
    object_length: int = 10_000
    mean_demand: float = 100.0
    capacity: int | str = 7            # a number or "dmax"
    seed: int = 0

    def __post_init__(self):
        if self.length_class not in CLASS_RANGES:
            raise ValueError(f"unknown length class {self.length_class!r}")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.object_length < 1:
            raise ValueError("object length must be positive")
        if self.mean_demand <= 0:
            raise ValueError("mean demand must be positive")
        _check_capacity_spec(self.capacity)

    @property
    def identifier(self) -> str:
        return (f"1d_{self.length_class}_m{self.m}_L{self.object_length}"
                f"_c{self.capacity}_seed{self.seed}")


@dataclass(frozen=True)
class Gen2DParams:
    m: int                              # one of 20, 30, 50, 100
    shape_id: int                       # one of 1, 3, 6, 11, 14
    capacity: int | str = 7             # 7 or "dmax"
    allow_rotation: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.m not in (20, 30, 50, 100):
            raise ValueError("2d designs use m in {20, 30, 50, 100}")
        if self.shape_id not in SHAPE_CLASSES:
            raise ValueError(f"unknown shape id {self.shape_id}")
        _check_capacity_spec(self.capacity)

    @property
    def identifier(self) -> str:
        return f"2d_id{self.shape_id}_m{self.m}_c{self.capacity}_seed{self.seed}"


def _check_capacity_spec(spec) -> None:
    if isinstance(spec, str):
        if spec != "dmax":
            raise ValueError("capacity spec must be a number or 'dmax'")
    elif int(spec) < 1:
        raise ValueError("capacity must be >= 1")


def _resolve_capacity(spec, demands) -> int:
    return max(demands) if spec == "dmax" else int(spec)


def _draw_demands(rng: SplitMix64, m: int, mean_demand: float) -> list[int]:
    shares = [1.0 - rng.uniform() for _ in range(m)]  # uniform over (0, 1]
    total = sum(shares)
    return [max(1, _round_half_up(m * mean_demand * r / total)) for r in shares]


def generate_1d(params: Gen1DParams) -> Instance:
    """Length-class design: l_i uniform in [v1*L, v2*L], demands are
    normalized shares of m * mean_demand; duplicates merge."""
    rng = SplitMix64(params.seed)
    v1, v2 = CLASS_RANGES[params.length_class]
    L = params.object_length
    lengths = []
    for _ in range(params.m):
        u = rng.uniform()
        raw = v1 * L + u * (v2 - v1) * L
        lengths.append(min(max(_round_half_up(raw), 1), L))
    demands = _draw_demands(rng, params.m, params.mean_demand)
    merged: dict[int, int] = {}
    for l, d in zip(lengths, demands):
        merged[l] = merged.get(l, 0) + d
    cap = _resolve_capacity(params.capacity, list(merged.values()))
    return make_1d(L, list(merged.keys()), list(merged.values()), cap,
                   identifier=params.identifier)


def generate_2d(params: Gen2DParams, max_draws: int = 100_000) -> Instance:
    """Shape-class design over a long object: L, W uniform in [100, 200]
    with L >= W; items drawn uniformly from [25, 100]^2 through the shape
    predicate; demands uniform in [10, 200]."""
    rng = SplitMix64(params.seed)
    L = rng.randint(100, 200)
    W = rng.randint(100, 200)
    if W > L:
        L, W = W, L
    _, predicate = SHAPE_CLASSES[params.shape_id]
    lengths, widths, demands = [], [], []
    for _ in range(params.m):
        for attempt in range(max_draws):
            l = rng.randint(25, 100)
            w = rng.randint(25, 100)
            fits = (l <= L and w <= W) or \
                   (params.allow_rotation and w <= L and l <= W)
            if fits and predicate(l, w):
                break
        else:
            raise GenerationError(
                f"shape {params.shape_id} starved after {max_draws} draws")
        lengths.append(l)
        widths.append(w)
        demands.append(rng.randint(10, 200))
    merged: dict[tuple[int, int], int] = {}
    for l, w, d in zip(lengths, widths, demands):
        merged[(l, w)] = merged.get((l, w), 0) + d
    cap = _resolve_capacity(params.capacity, list(merged.values()))
    return make_2d(L, W, [k[0] for k in merged], [k[1] for k in merged],
                   list(merged.values()), cap,
                   allow_rotation=params.allow_rotation,
                   identifier=params.identifier)


def write_instance(instance: Instance, path) -> None:
    path = Path(path)
    lines = []
    if instance.kind == "1d":
        lines.append(f"{instance.m} {instance.object_length} {instance.capacity}")
        for l, d in zip(instance.item_lengths, instance.demands):
            lines.append(f"{l} {d}")
    else:
        lines.append(f"{instance.m} {instance.object_length} "
                     f"{instance.object_width} {instance.capacity} "
                     f"{1 if instance.allow_rotation else 0}")
        for l, w, d in zip(instance.item_lengths, instance.item_widths,
                           instance.demands):
            lines.append(f"{l} {w} {d}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_ints(text: str, lineno: int, expect: int, path) -> list[int]:
    parts = text.split()
    if len(parts) != expect:
        raise ParseError(f"{path}:{lineno}: expected {expect} fields, "
                         f"got {len(parts)}")
    try:
        return [int(p) for p in parts]
    except ValueError as exc:
        raise ParseError(f"{path}:{lineno}: non-integer field") from exc


def read_instance(path) -> Instance:
    path = Path(path)
    raw = [ln for ln in path.read_text(encoding="utf-8").splitlines()]
    lines = [(i + 1, ln) for i, ln in enumerate(raw) if ln.strip()]
    if not lines:
        raise ParseError(f"{path}:1: empty instance file")
    lineno, header = lines[0]
    fields = header.split()
    if len(fields) == 3:
        m, L, p = _parse_ints(header, lineno, 3, path)
        body = lines[1:]
        if len(body) != m:
            raise ParseError(f"{path}:{lineno}: header promises {m} items, "
                             f"file has {len(body)}")
        lengths, demands = [], []
        for ln_no, ln in body:
            l, d = _parse_ints(ln, ln_no, 2, path)
            if not 1 <= l <= L:
                raise ParseError(f"{path}:{ln_no}: item length {l} outside [1, {L}]")
            if d < 1:
                raise ParseError(f"{path}:{ln_no}: demand must be positive")
            lengths.append(l)
            demands.append(d)
        try:
            return make_1d(L, lengths, demands, p, identifier=path.stem)
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
    if len(fields) == 5:
        m, L, W, p, rot = _parse_ints(header, lineno, 5, path)
        body = lines[1:]
        if len(body) != m:
            raise ParseError(f"{path}:{lineno}: header promises {m} items, "
                             f"file has {len(body)}")
        lengths, widths, demands = [], [], []
        for ln_no, ln in body:
            l, w, d = _parse_ints(ln, ln_no, 3, path)
            fits = (l <= L and w <= W) or (rot == 1 and w <= L and l <= W)
            if not fits:
                raise ParseError(f"{path}:{ln_no}: item {l}x{w} does not fit "
                                 f"the {L}x{W} object")
            if d < 1:
                raise ParseError(f"{path}:{ln_no}: demand must be positive")
            lengths.append(l)
            widths.append(w)
            demands.append(d)
        try:
            return make_2d(L, W, lengths, widths, demands, p,
                           allow_rotation=rot == 1, identifier=path.stem)
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
    raise ParseError(f"{path}:{lineno}: header must have 3 (1d) or 5 (2d) fields")
